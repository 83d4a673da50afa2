#pragma once

// Corpus ingestion: pre-parsed meeting transcripts with dialogue acts,
// constituent/dependency parses and decision annotations. Corpus objects
// are immutable after load and safe for shared read-only access.

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "relexsum/porter.hpp"
#include "relexsum/stopwords.hpp"

namespace relexsum {

using json = nlohmann::json;

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Token {
    int index = 0;
    std::string surface;
    std::string stem;
    std::string pos;
};

struct ConstituentNode {
    std::string label;
    int lo = 0, hi = 0;           // token interval [lo, hi)
    std::optional<int> head;      // token index within span
    std::vector<ConstituentNode> children;
};

inline constexpr int kRootSentinel = -1;

struct DependencyEdge {
    std::string relation;
    int head = kRootSentinel;  // token index, or kRootSentinel
    int dependent = 0;
};

struct AdjacencyPairInfo {
    std::string ap_type;
    std::string part;  // "source" | "target"
    std::string other_da_id;
    bool other_is_decision_related = false;
    std::optional<bool> target_is_positive_feedback;
    std::optional<bool> source_is_question;
};

struct DialogueAct {
    std::string id;
    std::string meeting_id;
    int order = 0;
    std::string speaker;
    std::string speaker_role;
    std::string da_type;
    std::string topic;
    std::vector<Token> tokens;
    ConstituentNode parse;
    std::vector<DependencyEdge> deps;
    std::optional<AdjacencyPairInfo> adjacency_pair;
    std::vector<std::string> decision_ids;

    // incoming dependency relation of a token, if any
    const DependencyEdge* incoming_edge(int token_index) const {
        for (const auto& e : deps)
            if (e.dependent == token_index) return &e;
        return nullptr;
    }
};

struct Decision {
    std::string id;
    std::string abstract;
};

struct Meeting {
    std::string id;
    std::vector<DialogueAct> das;
    std::vector<Decision> decisions;
};

struct Corpus {
    std::vector<Meeting> meetings;
};

struct DecisionDocument {
    std::string decision_id;
    std::vector<DialogueAct> das;  // sorted ascending by order
    std::optional<std::string> gold_abstract;
    int segment_count = 4;  // L
};

struct IndicatorCandidate {
    int da_index = 0;
    int token_index = 0;
};

struct ArgumentCandidate {
    int da_index = 0;
    const ConstituentNode* constituent = nullptr;
};

// ---------------------------------------------------------------------------
// eligibility rules

inline bool is_noun_or_verb(const std::string& pos) {
    return pos.rfind("NN", 0) == 0 || pos.rfind("VB", 0) == 0;
}

inline bool is_to_clause(const ConstituentNode& node, const DialogueAct& da) {
    if (node.label != "S" && node.label != "SBAR") return false;
    if (node.lo >= node.hi || node.lo >= static_cast<int>(da.tokens.size()))
        return false;
    return to_lower(da.tokens[node.lo].surface) == "to";
}

inline bool is_eligible_argument(const ConstituentNode& node,
                                 const DialogueAct& da) {
    return node.label == "NP" || node.label == "PP" || is_to_clause(node, da);
}

// Headword of a constituent: the annotated head when present, otherwise a
// documented fallback (rightmost noun for NP, the preposition's object's
// head for PP, leftmost verb for VP/S, else a span endpoint).
inline int headword_of(const ConstituentNode& node, const DialogueAct& da) {
    if (node.head) return *node.head;
    auto rightmost_noun = [&](int lo, int hi) -> int {
        for (int i = hi - 1; i >= lo; --i)
            if (da.tokens[i].pos.rfind("NN", 0) == 0) return i;
        return -1;
    };
    if (node.label == "NP") {
        int i = rightmost_noun(node.lo, node.hi);
        return i >= 0 ? i : node.hi - 1;
    }
    if (node.label == "PP") {
        for (const auto& child : node.children)
            if (child.label == "NP") return headword_of(child, da);
        int i = rightmost_noun(node.lo, node.hi);
        return i >= 0 ? i : node.hi - 1;
    }
    for (int i = node.lo; i < node.hi; ++i)
        if (da.tokens[i].pos.rfind("VB", 0) == 0) return i;
    return node.lo;
}

// ---------------------------------------------------------------------------
// JSON parsing with strict field validation

namespace detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& known,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw LoadError("unknown field '" + it.key() + "' in " + where);
}

inline ConstituentNode parse_constituent(const json& j,
                                         const std::string& where) {
    if (!j.is_object()) throw LoadError("constituent not an object in " + where);
    reject_unknown(j, {"label", "lo", "hi", "head", "children"}, where);
    ConstituentNode node;
    node.label = j.at("label").get<std::string>();
    node.lo = j.at("lo").get<int>();
    node.hi = j.at("hi").get<int>();
    if (j.contains("head")) node.head = j.at("head").get<int>();
    if (j.contains("children"))
        for (const auto& c : j.at("children"))
            node.children.push_back(parse_constituent(c, where));
    return node;
}

inline void validate_constituent(const ConstituentNode& node, int n_tokens,
                                 const std::string& where) {
    if (node.lo < 0 || node.hi > n_tokens || node.lo >= node.hi)
        throw LoadError("constituent span [" + std::to_string(node.lo) + "," +
                        std::to_string(node.hi) + ") out of range in " + where);
    if (node.head && (*node.head < node.lo || *node.head >= node.hi))
        throw LoadError("constituent head outside span in " + where);
    for (const auto& c : node.children) {
        if (c.lo < node.lo || c.hi > node.hi)
            throw LoadError("child span escapes parent in " + where);
        validate_constituent(c, n_tokens, where);
    }
}

inline json constituent_to_json(const ConstituentNode& node) {
    json j;
    j["label"] = node.label;
    j["lo"] = node.lo;
    j["hi"] = node.hi;
    if (node.head) j["head"] = *node.head;
    if (!node.children.empty()) {
        json kids = json::array();
        for (const auto& c : node.children) kids.push_back(constituent_to_json(c));
        j["children"] = kids;
    }
    return j;
}

}  // namespace detail

inline Corpus parse_corpus_json(const json& root) {
    if (!root.is_object()) throw LoadError("corpus root must be an object");
    detail::reject_unknown(root, {"meetings"}, "corpus root");
    Corpus corpus;
    if (!root.contains("meetings")) return corpus;
    for (const auto& jm : root.at("meetings")) {
        detail::reject_unknown(jm, {"id", "dialogue_acts", "decisions"},
                               "meeting");
        Meeting meeting;
        meeting.id = jm.at("id").get<std::string>();
        const std::string mwhere = "meeting '" + meeting.id + "'";

        std::set<std::string> decision_ids;
        if (jm.contains("decisions")) {
            for (const auto& jd : jm.at("decisions")) {
                detail::reject_unknown(jd, {"id", "abstract"},
                                       mwhere + " decision");
                Decision d;
                d.id = jd.at("id").get<std::string>();
                if (jd.contains("abstract"))
                    d.abstract = jd.at("abstract").get<std::string>();
                if (!decision_ids.insert(d.id).second)
                    throw LoadError("duplicate decision id '" + d.id + "' in " +
                                    mwhere);
                meeting.decisions.push_back(std::move(d));
            }
        }

        std::set<int> orders;
        std::set<std::string> da_ids;
        if (jm.contains("dialogue_acts")) {
            for (const auto& jda : jm.at("dialogue_acts")) {
                detail::reject_unknown(
                    jda,
                    {"id", "order", "speaker", "speaker_role", "da_type",
                     "topic", "tokens", "constituents", "dependencies",
                     "adjacency_pair", "decision_ids"},
                    mwhere + " dialogue act");
                DialogueAct da;
                da.id = jda.at("id").get<std::string>();
                da.meeting_id = meeting.id;
                const std::string where = mwhere + " DA '" + da.id + "'";
                da.order = jda.at("order").get<int>();
                if (!orders.insert(da.order).second)
                    throw LoadError("duplicate order " +
                                    std::to_string(da.order) + " in " + where);
                if (!da_ids.insert(da.id).second)
                    throw LoadError("duplicate DA id in " + where);
                da.speaker = jda.value("speaker", "");
                da.speaker_role = jda.value("speaker_role", "");
                da.da_type = jda.value("da_type", "");
                da.topic = jda.value("topic", "");

                int idx = 0;
                for (const auto& jt : jda.at("tokens")) {
                    detail::reject_unknown(jt, {"surface", "stem", "pos"},
                                           where + " token");
                    Token t;
                    t.index = idx++;
                    t.surface = jt.at("surface").get<std::string>();
                    t.pos = jt.at("pos").get<std::string>();
                    if (t.surface.empty())
                        throw LoadError("empty token surface in " + where);
                    if (t.pos.empty())
                        throw LoadError("empty token pos in " + where);
                    if (jt.contains("stem"))
                        t.stem = jt.at("stem").get<std::string>();
                    else
                        t.stem = porter::stem(to_lower(t.surface));
                    da.tokens.push_back(std::move(t));
                }
                if (da.tokens.empty())
                    throw LoadError("DA with zero tokens in " + where);

                da.parse = detail::parse_constituent(jda.at("constituents"),
                                                     where);
                detail::validate_constituent(da.parse, da.tokens.size(), where);
                if (da.parse.lo != 0 ||
                    da.parse.hi != static_cast<int>(da.tokens.size()))
                    throw LoadError("parse root does not cover tokens in " +
                                    where);

                if (jda.contains("dependencies")) {
                    for (const auto& je : jda.at("dependencies")) {
                        detail::reject_unknown(je, {"rel", "head", "dep"},
                                               where + " dependency");
                        DependencyEdge e;
                        e.relation = je.at("rel").get<std::string>();
                        e.head = je.at("head").get<int>();
                        e.dependent = je.at("dep").get<int>();
                        int n = da.tokens.size();
                        if (e.dependent < 0 || e.dependent >= n ||
                            e.head < kRootSentinel || e.head >= n)
                            throw LoadError("dependency index out of range in " +
                                            where);
                        if (da.incoming_edge(e.dependent))
                            throw LoadError("token with two heads in " + where);
                        da.deps.push_back(std::move(e));
                    }
                }

                if (jda.contains("adjacency_pair")) {
                    const auto& jap = jda.at("adjacency_pair");
                    detail::reject_unknown(
                        jap,
                        {"ap_type", "part", "other_da_id",
                         "other_is_decision_related",
                         "target_is_positive_feedback", "source_is_question"},
                        where + " adjacency pair");
                    AdjacencyPairInfo ap;
                    ap.ap_type = jap.at("ap_type").get<std::string>();
                    ap.part = jap.at("part").get<std::string>();
                    if (ap.part != "source" && ap.part != "target")
                        throw LoadError("adjacency pair part must be "
                                        "source|target in " + where);
                    ap.other_da_id = jap.at("other_da_id").get<std::string>();
                    ap.other_is_decision_related =
                        jap.value("other_is_decision_related", false);
                    if (jap.contains("target_is_positive_feedback"))
                        ap.target_is_positive_feedback =
                            jap.at("target_is_positive_feedback").get<bool>();
                    if (jap.contains("source_is_question"))
                        ap.source_is_question =
                            jap.at("source_is_question").get<bool>();
                    da.adjacency_pair = std::move(ap);
                }

                if (jda.contains("decision_ids"))
                    for (const auto& jd : jda.at("decision_ids"))
                        da.decision_ids.push_back(jd.get<std::string>());
                for (const auto& did : da.decision_ids)
                    if (!decision_ids.count(did))
                        throw LoadError("dangling decision reference '" + did +
                                        "' in " + where);
                meeting.das.push_back(std::move(da));
            }
        }

        // adjacency-pair cross references
        for (const auto& da : meeting.das)
            if (da.adjacency_pair && !da_ids.count(da.adjacency_pair->other_da_id))
                throw LoadError("dangling adjacency-pair reference '" +
                                da.adjacency_pair->other_da_id + "' in " +
                                mwhere + " DA '" + da.id + "'");
        corpus.meetings.push_back(std::move(meeting));
    }
    return corpus;
}

inline Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open corpus file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError(std::string("corpus parse failure: ") + e.what());
    }
    return parse_corpus_json(root);
}

inline json corpus_to_json(const Corpus& corpus) {
    json root;
    root["meetings"] = json::array();
    for (const auto& m : corpus.meetings) {
        json jm;
        jm["id"] = m.id;
        jm["dialogue_acts"] = json::array();
        for (const auto& da : m.das) {
            json j;
            j["id"] = da.id;
            j["order"] = da.order;
            j["speaker"] = da.speaker;
            j["speaker_role"] = da.speaker_role;
            j["da_type"] = da.da_type;
            j["topic"] = da.topic;
            j["tokens"] = json::array();
            for (const auto& t : da.tokens)
                j["tokens"].push_back(
                    {{"surface", t.surface}, {"stem", t.stem}, {"pos", t.pos}});
            j["constituents"] = detail::constituent_to_json(da.parse);
            if (!da.deps.empty()) {
                j["dependencies"] = json::array();
                for (const auto& e : da.deps)
                    j["dependencies"].push_back({{"rel", e.relation},
                                                 {"head", e.head},
                                                 {"dep", e.dependent}});
            }
            if (da.adjacency_pair) {
                const auto& ap = *da.adjacency_pair;
                json japp;
                japp["ap_type"] = ap.ap_type;
                japp["part"] = ap.part;
                japp["other_da_id"] = ap.other_da_id;
                japp["other_is_decision_related"] = ap.other_is_decision_related;
                if (ap.target_is_positive_feedback)
                    japp["target_is_positive_feedback"] =
                        *ap.target_is_positive_feedback;
                if (ap.source_is_question)
                    japp["source_is_question"] = *ap.source_is_question;
                j["adjacency_pair"] = japp;
            }
            if (!da.decision_ids.empty()) j["decision_ids"] = da.decision_ids;
            jm["dialogue_acts"].push_back(std::move(j));
        }
        if (!m.decisions.empty()) {
            jm["decisions"] = json::array();
            for (const auto& d : m.decisions)
                jm["decisions"].push_back({{"id", d.id}, {"abstract", d.abstract}});
        }
        root["meetings"].push_back(std::move(jm));
    }
    return root;
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write corpus file: " + path);
    out << corpus_to_json(corpus).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// decision documents

// true mode: one document per annotated decision. A DA supporting several
// decisions appears in each of their documents.
inline std::vector<DecisionDocument> build_decision_documents(
    const Corpus& corpus, int segment_count = 4,
    std::vector<std::string>* warnings = nullptr) {
    std::vector<DecisionDocument> docs;
    for (const auto& m : corpus.meetings) {
        for (const auto& decision : m.decisions) {
            DecisionDocument dd;
            dd.decision_id = decision.id;
            dd.segment_count = segment_count;
            dd.gold_abstract = decision.abstract;
            for (const auto& da : m.das)
                if (std::find(da.decision_ids.begin(), da.decision_ids.end(),
                              decision.id) != da.decision_ids.end())
                    dd.das.push_back(da);
            if (dd.das.empty()) {
                if (warnings)
                    warnings->push_back("decision '" + decision.id +
                                        "' has no supporting DAs; skipped");
                continue;
            }
            std::sort(dd.das.begin(), dd.das.end(),
                      [](const DialogueAct& a, const DialogueAct& b) {
                          return a.order < b.order;
                      });
            docs.push_back(std::move(dd));
        }
    }
    return docs;
}

// provided mode: documents follow an externally supplied clustering
// (da_id -> cluster_id), e.g. from baselines::cluster_drdas.
inline std::vector<DecisionDocument> build_decision_documents(
    const Corpus& corpus, const std::map<std::string, std::string>& clusters,
    int segment_count = 4, std::vector<std::string>* warnings = nullptr) {
    std::map<std::string, DecisionDocument> by_cluster;
    for (const auto& m : corpus.meetings) {
        for (const auto& da : m.das) {
            auto it = clusters.find(da.id);
            if (it == clusters.end()) continue;
            auto& dd = by_cluster[it->second];
            dd.decision_id = it->second;
            dd.segment_count = segment_count;
            dd.das.push_back(da);
        }
    }
    std::vector<DecisionDocument> docs;
    for (auto& [id, dd] : by_cluster) {
        std::stable_sort(dd.das.begin(), dd.das.end(),
                         [](const DialogueAct& a, const DialogueAct& b) {
                             return std::tie(a.meeting_id, a.order) <
                                    std::tie(b.meeting_id, b.order);
                         });
        docs.push_back(std::move(dd));
    }
    if (warnings)
        for (const auto& [da_id, cluster] : clusters) {
            bool found = false;
            for (const auto& m : corpus.meetings)
                for (const auto& da : m.das)
                    if (da.id == da_id) found = true;
            if (!found)
                warnings->push_back("cluster file references unknown DA '" +
                                    da_id + "'");
        }
    return docs;
}

// ---------------------------------------------------------------------------
// candidates and segments

inline void collect_argument_nodes(const ConstituentNode& node,
                                   const DialogueAct& da,
                                   std::vector<const ConstituentNode*>& out) {
    if (is_eligible_argument(node, da)) out.push_back(&node);
    for (const auto& c : node.children) collect_argument_nodes(c, da, out);
}

inline std::pair<std::vector<IndicatorCandidate>,
                 std::vector<ArgumentCandidate>>
extract_candidates(const DecisionDocument& dd) {
    std::vector<IndicatorCandidate> indicators;
    std::vector<ArgumentCandidate> arguments;
    for (int z = 0; z < static_cast<int>(dd.das.size()); ++z) {
        const auto& da = dd.das[z];
        for (const auto& t : da.tokens)
            if (is_noun_or_verb(t.pos)) indicators.push_back({z, t.index});
        std::vector<const ConstituentNode*> nodes;
        collect_argument_nodes(da.parse, da, nodes);
        for (const auto* n : nodes) arguments.push_back({z, n});
    }
    return {std::move(indicators), std::move(arguments)};
}

// segment id: floor(da_index * L / n); contiguous near-equal blocks
inline int segment_of(const DecisionDocument& dd, int da_index) {
    int n = dd.das.size();
    if (da_index < 0 || da_index >= n)
        throw std::out_of_range("da_index " + std::to_string(da_index) +
                                " out of range for document '" +
                                dd.decision_id + "'");
    return static_cast<int>(
        (static_cast<long long>(da_index) * dd.segment_count) / n);
}

inline std::string argument_text(const DecisionDocument& dd,
                                 const ArgumentCandidate& cand) {
    const auto& da = dd.das[cand.da_index];
    std::string out;
    for (int i = cand.constituent->lo; i < cand.constituent->hi; ++i) {
        if (!out.empty()) out += ' ';
        out += da.tokens[i].surface;
    }
    return out;
}

// Cluster-assignment file: lines `da_id <TAB> cluster_id`.
inline std::map<std::string, std::string> load_cluster_file(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open cluster file: " + path);
    std::map<std::string, std::string> clusters;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw LoadError("cluster file line " + std::to_string(lineno) +
                            ": expected `da_id<TAB>cluster_id`");
        clusters[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return clusters;
}

inline void save_cluster_file(const std::map<std::string, std::string>& clusters,
                              const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write cluster file: " + path);
    for (const auto& [da, c] : clusters) out << da << '\t' << c << '\n';
}

}  // namespace relexsum
