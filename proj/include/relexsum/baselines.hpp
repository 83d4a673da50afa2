#pragma once

// Utterance-level baselines (longest DA, prototype DA) and the
// agglomerative clustering used in the system-clusterings setting.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "relexsum/corpus.hpp"
#include "relexsum/pipeline.hpp"

namespace relexsum {

struct TfIdfVector {
    std::map<std::string, double> weights;  // stem -> weight
    double norm = 0.0;

    void finish() {
        norm = 0.0;
        for (const auto& [s, w] : weights) norm += w * w;
        norm = std::sqrt(norm);
    }
};

inline double cosine(const TfIdfVector& a, const TfIdfVector& b) {
    if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
    double dot = 0.0;
    const auto& small = a.weights.size() <= b.weights.size() ? a : b;
    const auto& large = a.weights.size() <= b.weights.size() ? b : a;
    for (const auto& [s, w] : small.weights) {
        auto it = large.weights.find(s);
        if (it != large.weights.end()) dot += w * it->second;
    }
    return dot / (a.norm * b.norm);
}

// IDF over all DRDAs in the corpus: idf = ln(N / df), 0 for unseen terms.
class IdfTable {
  public:
    IdfTable(const Corpus& corpus, const StopwordSet& stopwords) {
        int n = 0;
        std::map<std::string, int> df;
        for (const auto& m : corpus.meetings)
            for (const auto& da : m.das) {
                ++n;
                std::set<std::string> seen;
                for (const auto& t : da.tokens)
                    if (!stopwords.count(to_lower(t.surface)))
                        seen.insert(t.stem);
                for (const auto& s : seen) df[s] += 1;
            }
        n_ = n;
        df_ = std::move(df);
    }

    double idf(const std::string& stem) const {
        auto it = df_.find(stem);
        if (it == df_.end() || n_ == 0) return 0.0;
        return std::log(static_cast<double>(n_) / it->second);
    }

    TfIdfVector vectorize(const DialogueAct& da,
                          const StopwordSet& stopwords) const {
        TfIdfVector v;
        for (const auto& t : da.tokens)
            if (!stopwords.count(to_lower(t.surface)))
                v.weights[t.stem] += 1.0;
        for (auto& [s, w] : v.weights) w *= idf(s);
        v.finish();
        return v;
    }

  private:
    int n_ = 0;
    std::map<std::string, int> df_;
};

inline std::string da_text(const DialogueAct& da) {
    std::string out;
    for (const auto& t : da.tokens) {
        if (!out.empty()) out += ' ';
        out += t.surface;
    }
    return out;
}

// the DA with most tokens; ties go to the earliest
inline Summary longest_da(const DecisionDocument& dd) {
    if (dd.das.empty()) throw std::invalid_argument("empty document");
    const DialogueAct* best = &dd.das.front();
    for (const auto& da : dd.das)
        if (da.tokens.size() > best->tokens.size()) best = &da;
    Summary s;
    s.decision_id = dd.decision_id;
    s.method = "longest";
    s.texts.push_back(da_text(*best));
    return s;
}

// the DA with the largest TF-IDF cosine to the cluster centroid
inline Summary prototype_da(const DecisionDocument& dd, const IdfTable& idf,
                            const StopwordSet& stopwords,
                            std::vector<std::string>* warnings = nullptr) {
    if (dd.das.empty()) throw std::invalid_argument("empty document");
    std::vector<TfIdfVector> vecs;
    for (const auto& da : dd.das) vecs.push_back(idf.vectorize(da, stopwords));

    TfIdfVector centroid;
    for (const auto& v : vecs)
        for (const auto& [s, w] : v.weights) centroid.weights[s] += w;
    for (auto& [s, w] : centroid.weights) w /= vecs.size();
    centroid.finish();

    if (centroid.norm == 0.0) {
        if (warnings)
            warnings->push_back("document '" + dd.decision_id +
                                "' has all-zero TF-IDF vectors; "
                                "falling back to longest DA");
        Summary s = longest_da(dd);
        s.method = "prototype";
        return s;
    }
    std::size_t best = 0;
    double best_sim = -1.0;
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        double sim = cosine(vecs[i], centroid);
        if (sim > best_sim) {
            best_sim = sim;
            best = i;
        }
    }
    Summary s;
    s.decision_id = dd.decision_id;
    s.method = "prototype";
    s.texts.push_back(da_text(dd.das[best]));
    return s;
}

// ---------------------------------------------------------------------------
// system clusterings: average-link agglomerative clustering over TF-IDF
// cosine of the meeting's DRDAs

struct ClusterConfig {
    double threshold = 0.3;  // merge while best-pair similarity >= threshold
    int target_count = 0;    // when > 0, merge down to this many clusters
};

inline std::map<std::string, std::string> cluster_drdas(
    const Meeting& meeting, const Corpus& corpus, const StopwordSet& stopwords,
    const ClusterConfig& config = {}) {
    std::vector<const DialogueAct*> drdas;
    for (const auto& da : meeting.das)
        if (!da.decision_ids.empty() || meeting.decisions.empty())
            drdas.push_back(&da);
    if (drdas.empty())
        for (const auto& da : meeting.das) drdas.push_back(&da);

    IdfTable idf(corpus, stopwords);
    std::vector<TfIdfVector> vecs;
    for (const auto* da : drdas) vecs.push_back(idf.vectorize(*da, stopwords));

    std::vector<std::vector<int>> clusters;
    for (int i = 0; i < static_cast<int>(drdas.size()); ++i)
        clusters.push_back({i});

    auto avg_link = [&](const std::vector<int>& a, const std::vector<int>& b) {
        double sum = 0.0;
        for (int i : a)
            for (int j : b) sum += cosine(vecs[i], vecs[j]);
        return sum / (a.size() * b.size());
    };

    for (;;) {
        bool have_target = config.target_count > 0;
        if (have_target &&
            static_cast<int>(clusters.size()) <= config.target_count)
            break;
        if (clusters.size() < 2) break;
        double best = -1.0;
        std::pair<int, int> best_pair{-1, -1};
        for (std::size_t i = 0; i < clusters.size(); ++i)
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                double sim = avg_link(clusters[i], clusters[j]);
                // ties merge the lexicographically smallest pair; iteration
                // order guarantees that with a strict improvement test
                if (sim > best) {
                    best = sim;
                    best_pair = {static_cast<int>(i), static_cast<int>(j)};
                }
            }
        if (!have_target && best < config.threshold) break;
        auto [i, j] = best_pair;
        clusters[i].insert(clusters[i].end(), clusters[j].begin(),
                           clusters[j].end());
        std::sort(clusters[i].begin(), clusters[i].end());
        clusters.erase(clusters.begin() + j);
    }

    std::map<std::string, std::string> assignment;
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (int i : clusters[c])
            assignment[drdas[i]->id] =
                meeting.id + "_c" + std::to_string(c);
    return assignment;
}

}  // namespace relexsum
