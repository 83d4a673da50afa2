#pragma once

// Discrete feature extraction for indicator words and argument constituents.
// All extraction functions are pure; evaluation order over candidates fixes
// the vocabulary ids, so identical input yields identical vocabularies.

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "relexsum/corpus.hpp"
#include "relexsum/stopwords.hpp"

namespace relexsum {

enum class Tmpl : int {
    UnigramStem = 0,
    Pos,
    ConstituentLabel,
    DependencyLabel,
    DaType,
    SpeakerRole,
    Topic,
    ApPresent,
    ApType,
    ApOtherDecisionRelated,
    ApPart,
    ApTargetPositiveFeedback,
    ApSourceIsQuestion,
    WnFirstSynset,
    WnHypernymPath,
    ArgNumWords,
    ArgHasCapitalized,
    ArgHasProperNoun,
    ClausePosition,
    PositionToFirstCue,
    Count,
};

inline constexpr int kNumTemplates = static_cast<int>(Tmpl::Count);

enum class Phase { Cue, Content };
enum class Role { Indicator, Argument };

inline const char* template_name(Tmpl t) {
    static constexpr const char* names[] = {
        "unigram_stem", "pos", "constituent_label", "dependency_label",
        "da_type", "speaker_role", "topic", "ap_present", "ap_type",
        "ap_other_decision_related", "ap_part", "ap_target_positive_feedback",
        "ap_source_is_question", "wn_first_synset", "wn_hypernym_path",
        "arg_num_words", "arg_has_capitalized", "arg_has_proper_noun",
        "clause_position", "position_to_first_cue"};
    return names[static_cast<int>(t)];
}

inline bool template_is_argument_only(Tmpl t) {
    return t == Tmpl::ArgNumWords || t == Tmpl::ArgHasCapitalized ||
           t == Tmpl::ArgHasProperNoun;
}

inline bool template_is_content_only(Tmpl t) {
    return t == Tmpl::ClausePosition || t == Tmpl::PositionToFirstCue;
}

// One value per template; absent templates omitted.
struct FeatureVector {
    std::map<Tmpl, std::string> entries;

    void set(Tmpl t, std::string value) { entries[t] = std::move(value); }
    const std::string* get(Tmpl t) const {
        auto it = entries.find(t);
        return it == entries.end() ? nullptr : &it->second;
    }
};

// ---------------------------------------------------------------------------
// hypernym lexicon (static replacement for a WordNet binary)

struct HypernymEntry {
    std::string synset;
    std::string hypernym_path;
};

class HypernymLexicon {
  public:
    void add(const std::string& stem, const std::string& pos,
             HypernymEntry entry) {
        entries_[stem + "\t" + pos] = std::move(entry);
    }
    const HypernymEntry* lookup(const std::string& stem,
                                const std::string& pos) const {
        auto it = entries_.find(stem + "\t" + pos);
        return it == entries_.end() ? nullptr : &it->second;
    }
    std::size_t size() const { return entries_.size(); }

  private:
    std::unordered_map<std::string, HypernymEntry> entries_;
};

// Lexicon file: `stem<TAB>pos<TAB>synset<TAB>hyp1>hyp2>...`, one per line.
inline HypernymLexicon load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open lexicon file: " + path);
    HypernymLexicon lex;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<std::string, 4> fields;
        std::size_t start = 0;
        for (int f = 0; f < 4; ++f) {
            auto tab = line.find('\t', start);
            if (f < 3 && tab == std::string::npos)
                throw LoadError("lexicon line " + std::to_string(lineno) +
                                ": expected 4 tab-separated fields");
            fields[f] = line.substr(start, tab == std::string::npos
                                               ? std::string::npos
                                               : tab - start);
            start = tab + 1;
        }
        lex.add(fields[0], fields[1], {fields[2], fields[3]});
    }
    return lex;
}

// Penn tag -> WordNet-style coarse POS (n/v/a/r); empty when neither.
inline std::string coarse_pos(const std::string& ptb) {
    if (ptb.rfind("NN", 0) == 0) return "n";
    if (ptb.rfind("VB", 0) == 0) return "v";
    if (ptb.rfind("JJ", 0) == 0) return "a";
    if (ptb.rfind("RB", 0) == 0) return "r";
    return "";
}

// ---------------------------------------------------------------------------
// cue context (content phase)

struct CuePosition {
    int da_index = 0;
    int token_index = 0;
    bool operator<(const CuePosition& o) const {
        return std::tie(da_index, token_index) <
               std::tie(o.da_index, o.token_index);
    }
};

struct CueContext {
    std::vector<CuePosition> cues;  // ordered by position

    std::optional<CuePosition> first_cue() const {
        if (cues.empty()) return std::nullopt;
        return cues.front();
    }
};

struct FeatureOptions {
    Phase phase = Phase::Cue;
    bool coarse_pos_tags = false;  // full PTB tags by default
};

// ---------------------------------------------------------------------------
// extraction helpers

namespace detail {

// Deepest constituent with a multi-token span containing the token.
inline const ConstituentNode* enclosing_phrase(const ConstituentNode& node,
                                               int token) {
    if (token < node.lo || token >= node.hi) return nullptr;
    for (const auto& c : node.children)
        if (const auto* hit = enclosing_phrase(c, token))
            if (hit->hi - hit->lo > 1) return hit;
    return node.hi - node.lo > 1 ? &node : nullptr;
}

// first / second / other, by top-level clause (S/SBAR children of the root)
inline std::string clause_position(const DialogueAct& da, int token) {
    std::vector<std::pair<int, int>> clauses;
    for (const auto& c : da.parse.children)
        if (c.label == "S" || c.label == "SBAR")
            clauses.emplace_back(c.lo, c.hi);
    if (clauses.empty()) return "first";
    int idx = 0;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (token >= clauses[i].first && token < clauses[i].second) {
            idx = static_cast<int>(i);
            break;
        }
        if (token >= clauses[i].second) idx = static_cast<int>(i) + 1;
    }
    if (idx == 0) return "first";
    if (idx == 1) return "second";
    return "other";
}

inline void add_shared_features(FeatureVector& fv, const DecisionDocument& dd,
                                int da_index, int token_index,
                                const FeatureOptions& opts,
                                const CueContext* cue_ctx,
                                const HypernymLexicon* lexicon) {
    const auto& da = dd.das[da_index];
    const auto& tok = da.tokens[token_index];

    fv.set(Tmpl::UnigramStem, tok.stem);
    fv.set(Tmpl::Pos, opts.coarse_pos_tags && !coarse_pos(tok.pos).empty()
                          ? coarse_pos(tok.pos)
                          : tok.pos);
    if (const auto* node = enclosing_phrase(da.parse, token_index))
        fv.set(Tmpl::ConstituentLabel, node->label);
    if (const auto* edge = da.incoming_edge(token_index))
        fv.set(Tmpl::DependencyLabel, edge->relation);

    if (!da.da_type.empty()) fv.set(Tmpl::DaType, da.da_type);
    if (!da.speaker_role.empty()) fv.set(Tmpl::SpeakerRole, da.speaker_role);
    if (!da.topic.empty()) fv.set(Tmpl::Topic, da.topic);

    if (da.adjacency_pair) {
        const auto& ap = *da.adjacency_pair;
        fv.set(Tmpl::ApPresent, "true");
        fv.set(Tmpl::ApType, ap.ap_type);
        fv.set(Tmpl::ApOtherDecisionRelated,
               ap.other_is_decision_related ? "true" : "false");
        fv.set(Tmpl::ApPart, ap.part);
        if (ap.part == "source" && ap.target_is_positive_feedback)
            fv.set(Tmpl::ApTargetPositiveFeedback,
                   *ap.target_is_positive_feedback ? "true" : "false");
        if (ap.part == "target" && ap.source_is_question)
            fv.set(Tmpl::ApSourceIsQuestion,
                   *ap.source_is_question ? "true" : "false");
    } else {
        fv.set(Tmpl::ApPresent, "false");
    }

    if (lexicon) {
        std::string cp = coarse_pos(tok.pos);
        if (!cp.empty())
            if (const auto* e = lexicon->lookup(tok.stem, cp)) {
                fv.set(Tmpl::WnFirstSynset, e->synset);
                fv.set(Tmpl::WnHypernymPath, e->hypernym_path);
            }
    }

    if (opts.phase == Phase::Content) {
        fv.set(Tmpl::ClausePosition, clause_position(da, token_index));
        std::string rel = "before";  // default when the document has no cue
        if (cue_ctx) {
            if (auto first = cue_ctx->first_cue()) {
                CuePosition here{da_index, token_index};
                if (*first < here) rel = "after";
            }
        }
        fv.set(Tmpl::PositionToFirstCue, rel);
    }
}

}  // namespace detail

inline FeatureVector indicator_features(
    const DecisionDocument& dd, const IndicatorCandidate& cand,
    const FeatureOptions& opts, const CueContext* cue_ctx = nullptr,
    const HypernymLexicon* lexicon = nullptr) {
    if (opts.phase == Phase::Content && cue_ctx == nullptr)
        throw std::invalid_argument(
            "content-phase features require a cue context");
    FeatureVector fv;
    detail::add_shared_features(fv, dd, cand.da_index, cand.token_index, opts,
                                cue_ctx, lexicon);
    return fv;
}

inline FeatureVector argument_features(
    const DecisionDocument& dd, const ArgumentCandidate& cand,
    const FeatureOptions& opts, const CueContext* cue_ctx = nullptr,
    const HypernymLexicon* lexicon = nullptr,
    const StopwordSet* stopwords = nullptr) {
    if (opts.phase == Phase::Content && cue_ctx == nullptr)
        throw std::invalid_argument(
            "content-phase features require a cue context");
    const auto& da = dd.das[cand.da_index];
    const auto& node = *cand.constituent;
    int head = headword_of(node, da);

    FeatureVector fv;
    detail::add_shared_features(fv, dd, cand.da_index, head, opts, cue_ctx,
                                lexicon);
    fv.set(Tmpl::ConstituentLabel, node.label);  // the argument's own label

    int n_words = 0;
    bool has_cap = false, has_proper = false;
    for (int i = node.lo; i < node.hi; ++i) {
        const auto& tok = da.tokens[i];
        if (!stopwords || !stopwords->count(to_lower(tok.surface))) ++n_words;
        if (!tok.surface.empty() && std::isupper(
                static_cast<unsigned char>(tok.surface[0])))
            has_cap = true;
        if (tok.pos == "NNP" || tok.pos == "NNPS") has_proper = true;
    }
    fv.set(Tmpl::ArgNumWords, std::to_string(n_words));
    fv.set(Tmpl::ArgHasCapitalized, has_cap ? "true" : "false");
    fv.set(Tmpl::ArgHasProperNoun, has_proper ? "true" : "false");
    return fv;
}

// true iff every non-stopword token in the span is a personal pronoun
inline bool is_pronoun_only(const DecisionDocument& dd,
                            const ArgumentCandidate& cand,
                            const StopwordSet& stopwords) {
    const auto& da = dd.das[cand.da_index];
    for (int i = cand.constituent->lo; i < cand.constituent->hi; ++i) {
        const auto& tok = da.tokens[i];
        if (tok.pos == "PRP" || tok.pos == "PRP$") continue;
        if (!stopwords.count(to_lower(tok.surface))) return false;
    }
    // vacuously true for all-stopword spans; those carry no content either
    return true;
}

// ---------------------------------------------------------------------------
// vocabulary

class FeatureVocabulary {
  public:
    int intern(Tmpl t, const std::string& value) {
        auto& m = by_value_[static_cast<int>(t)];
        auto it = m.find(value);
        if (it != m.end()) return it->second;
        int id = static_cast<int>(values_[static_cast<int>(t)].size());
        m.emplace(value, id);
        values_[static_cast<int>(t)].push_back(value);
        return id;
    }
    // -1 when unseen
    int lookup(Tmpl t, const std::string& value) const {
        const auto& m = by_value_[static_cast<int>(t)];
        auto it = m.find(value);
        return it == m.end() ? -1 : it->second;
    }
    const std::string& value(Tmpl t, int id) const {
        return values_[static_cast<int>(t)][id];
    }
    int cardinality(Tmpl t) const {
        return static_cast<int>(values_[static_cast<int>(t)].size());
    }

  private:
    std::array<std::unordered_map<std::string, int>, kNumTemplates> by_value_;
    std::array<std::vector<std::string>, kNumTemplates> values_;
};

// Interns every feature value occurring in any candidate of any document.
// Closed-set content templates are registered up front so the content
// vocabulary does not depend on which cues were learned.
inline FeatureVocabulary build_vocabulary(
    const std::vector<DecisionDocument>& docs, const FeatureOptions& opts,
    const HypernymLexicon* lexicon = nullptr,
    const StopwordSet* stopwords = nullptr) {
    FeatureVocabulary vocab;
    if (opts.phase == Phase::Content) {
        for (const char* v : {"first", "second", "other"})
            vocab.intern(Tmpl::ClausePosition, v);
        for (const char* v : {"before", "after"})
            vocab.intern(Tmpl::PositionToFirstCue, v);
    }
    CueContext empty_ctx;
    for (const auto& dd : docs) {
        auto [indicators, arguments] = extract_candidates(dd);
        for (const auto& c : indicators) {
            auto fv = indicator_features(dd, c, opts, &empty_ctx, lexicon);
            for (const auto& [t, v] : fv.entries) vocab.intern(t, v);
        }
        for (const auto& c : arguments) {
            auto fv = argument_features(dd, c, opts, &empty_ctx, lexicon,
                                        stopwords);
            for (const auto& [t, v] : fv.entries) vocab.intern(t, v);
        }
    }
    return vocab;
}

}  // namespace relexsum
