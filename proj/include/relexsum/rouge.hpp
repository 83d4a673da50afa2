#pragma once

// Self-contained ROUGE-1, ROUGE-2 and ROUGE-SU4 with Porter stemming and
// stopword removal. Clipped multiset counting throughout.

#include <cctype>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "relexsum/porter.hpp"
#include "relexsum/stopwords.hpp"

namespace relexsum {

// tokenize on whitespace/punctuation, lowercase, drop stopwords, stem
inline std::vector<std::string> rouge_preprocess(const std::string& text,
                                                 const StopwordSet& stopwords) {
    std::vector<std::string> stems;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        if (!stopwords.count(cur)) stems.push_back(porter::stem(cur));
        cur.clear();
    };
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch)))
            cur += std::tolower(static_cast<unsigned char>(ch));
        else
            flush();
    }
    flush();
    return stems;
}

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool reference_empty = false;
};

namespace detail {

inline RougeScore from_counts(double overlap, double sys_count,
                              double ref_count) {
    RougeScore s;
    s.precision = sys_count > 0.0 ? overlap / sys_count : 0.0;
    s.recall = ref_count > 0.0 ? overlap / ref_count : 0.0;
    s.reference_empty = ref_count == 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

inline double clipped_overlap(const std::map<std::string, int>& sys,
                              const std::map<std::string, int>& ref) {
    double overlap = 0.0;
    for (const auto& [unit, n] : sys) {
        auto it = ref.find(unit);
        if (it != ref.end()) overlap += std::min(n, it->second);
    }
    return overlap;
}

inline std::map<std::string, int> ngrams(const std::vector<std::string>& toks,
                                         int n) {
    std::map<std::string, int> counts;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        std::string key;
        for (int j = 0; j < n; ++j) key += toks[i + j] + "\x1f";
        counts[key] += 1;
    }
    return counts;
}

// skip-bigrams with gap <= `max_gap`, plus unigrams via a begin marker
inline std::map<std::string, int> su_units(const std::vector<std::string>& in,
                                           int max_gap) {
    std::vector<std::string> toks;
    toks.push_back("\x02" "BEGIN");
    toks.insert(toks.end(), in.begin(), in.end());
    std::map<std::string, int> counts;
    for (std::size_t i = 0; i < toks.size(); ++i)
        for (std::size_t j = i + 1;
             j < toks.size() && j <= i + static_cast<std::size_t>(max_gap) + 1;
             ++j)
            counts[toks[i] + "\x1f" + toks[j]] += 1;
    return counts;
}

}  // namespace detail

struct ScoredPair {
    std::vector<std::string> system;     // preprocessed stems
    std::vector<std::string> reference;  // preprocessed stems
};

inline RougeScore rouge_n(const ScoredPair& pair, int n) {
    if (n != 1 && n != 2)
        throw std::invalid_argument("rouge_n supports n in {1, 2}");
    auto sys = detail::ngrams(pair.system, n);
    auto ref = detail::ngrams(pair.reference, n);
    double sys_total = 0.0, ref_total = 0.0;
    for (const auto& [u, c] : sys) sys_total += c;
    for (const auto& [u, c] : ref) ref_total += c;
    return detail::from_counts(detail::clipped_overlap(sys, ref), sys_total,
                               ref_total);
}

inline RougeScore rouge_su4(const ScoredPair& pair) {
    auto sys = detail::su_units(pair.system, 4);
    auto ref = detail::su_units(pair.reference, 4);
    double sys_total = 0.0, ref_total = 0.0;
    for (const auto& [u, c] : sys) sys_total += c;
    for (const auto& [u, c] : ref) ref_total += c;
    return detail::from_counts(detail::clipped_overlap(sys, ref), sys_total,
                               ref_total);
}

// ---------------------------------------------------------------------------
// corpus-level evaluation

enum class Aggregate { Macro, Micro };

struct RougeRow {
    std::string decision_id;  // "ALL" for the aggregate row
    RougeScore r1, r2, su4;
};

struct RougeReport {
    std::vector<RougeRow> per_decision;
    RougeRow aggregate;
};

inline RougeReport evaluate_rouge(
    const std::vector<std::pair<std::string, ScoredPair>>& pairs,
    Aggregate mode = Aggregate::Macro) {
    RougeReport report;
    report.aggregate.decision_id = "ALL";

    struct Totals {
        double overlap = 0, sys = 0, ref = 0;
    };
    Totals t1, t2, tsu;
    auto accumulate = [](Totals& t, const std::map<std::string, int>& sys,
                         const std::map<std::string, int>& ref) {
        for (const auto& [u, c] : sys) t.sys += c;
        for (const auto& [u, c] : ref) t.ref += c;
        t.overlap += detail::clipped_overlap(sys, ref);
    };

    for (const auto& [id, pair] : pairs) {
        RougeRow row;
        row.decision_id = id;
        row.r1 = rouge_n(pair, 1);
        row.r2 = rouge_n(pair, 2);
        row.su4 = rouge_su4(pair);
        report.per_decision.push_back(row);
        accumulate(t1, detail::ngrams(pair.system, 1),
                   detail::ngrams(pair.reference, 1));
        accumulate(t2, detail::ngrams(pair.system, 2),
                   detail::ngrams(pair.reference, 2));
        accumulate(tsu, detail::su_units(pair.system, 4),
                   detail::su_units(pair.reference, 4));
    }
    if (report.per_decision.empty()) return report;

    if (mode == Aggregate::Macro) {
        auto mean = [&](auto select) {
            RougeScore m;
            for (const auto& row : report.per_decision) {
                const RougeScore& s = select(row);
                m.precision += s.precision;
                m.recall += s.recall;
                m.f1 += s.f1;
            }
            double n = static_cast<double>(report.per_decision.size());
            m.precision /= n;
            m.recall /= n;
            m.f1 /= n;
            return m;
        };
        report.aggregate.r1 = mean([](const RougeRow& r) -> const RougeScore& {
            return r.r1;
        });
        report.aggregate.r2 = mean([](const RougeRow& r) -> const RougeScore& {
            return r.r2;
        });
        report.aggregate.su4 = mean([](const RougeRow& r) -> const RougeScore& {
            return r.su4;
        });
    } else {
        report.aggregate.r1 = detail::from_counts(t1.overlap, t1.sys, t1.ref);
        report.aggregate.r2 = detail::from_counts(t2.overlap, t2.sys, t2.ref);
        report.aggregate.su4 =
            detail::from_counts(tsu.overlap, tsu.sys, tsu.ref);
    }
    return report;
}

// Report file: per-decision and aggregate rows, plain tabular text.
inline void write_rouge_report(const RougeReport& report, std::ostream& out) {
    out << "decision\tmetric\tprecision\trecall\tf1\n";
    out.precision(6);
    out << std::fixed;
    auto emit = [&](const RougeRow& row) {
        auto line = [&](const char* metric, const RougeScore& s) {
            out << row.decision_id << '\t' << metric << '\t' << s.precision
                << '\t' << s.recall << '\t' << s.f1 << '\n';
        };
        line("R-1", row.r1);
        line("R-2", row.r2);
        line("R-SU4", row.su4);
    };
    for (const auto& row : report.per_decision) emit(row);
    emit(report.aggregate);
}

}  // namespace relexsum
