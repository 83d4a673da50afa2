#pragma once

// Two-phase learning: cue relations first, then content relations with
// cue-derived discourse features and the pronoun-only argument filter.
// Summaries take the highest-probability instance per relation type.

#include <string>
#include <vector>

#include "relexsum/inference.hpp"

namespace relexsum {

struct RelationInstance {
    int k = 0;
    std::string decision_id;
    std::string da_id;
    int da_index = 0;
    int indicator_token = 0;
    std::string indicator_surface;
    int arg_lo = 0, arg_hi = 0;
    std::string argument_text;
    double probability = 0.0;
};

struct Summary {
    std::string decision_id;
    std::string method;
    std::vector<RelationInstance> items;  // relation method
    std::vector<std::string> texts;       // utterance/token methods

    std::string rendered() const {
        std::string out;
        auto append = [&](const std::string& s) {
            if (!out.empty()) out += ' ';
            out += s;
        };
        for (const auto& item : items) {
            append(item.indicator_surface);
            append(item.argument_text);
        }
        for (const auto& t : texts) append(t);
        return out;
    }
};

struct PhaseResult {
    FeatureVocabulary vocab;
    ModelLayout layout;
    std::vector<CandidateSpace> spaces;
    InferenceResult inference;
    std::vector<RelationInstance> instances;  // argmax per (doc, relation)
};

// argmax triple per (document, relation); ties broken by DA order, then
// leftmost indicator, then leftmost argument. NULL argmaxes yield nothing.
inline std::vector<RelationInstance> extract_instances(
    const std::vector<DecisionDocument>& docs,
    const std::vector<CandidateSpace>& spaces, const VariationalState& state,
    int K) {
    std::vector<RelationInstance> instances;
    for (std::size_t d = 0; d < spaces.size(); ++d) {
        const auto& space = spaces[d];
        const auto& dd = docs[d];
        for (int k = 0; k < K; ++k) {
            const auto& q = state.c_hat[d][k];
            int best = -1;
            auto key = [&](int c) {
                const auto& tr = space.triples[c];
                return std::make_tuple(
                    dd.das[tr.da].order,
                    space.indicators[tr.ind].token_index,
                    space.arguments[tr.arg].constituent->lo);
            };
            for (int c = 0; c < static_cast<int>(space.triples.size()); ++c) {
                if (best < 0 || q[c] > q[best] ||
                    (q[c] == q[best] && key(c) < key(best)))
                    best = c;
            }
            if (best < 0) continue;  // NULL-only document
            if (space.has_null && q[space.triples.size()] > q[best])
                continue;  // NULL wins
            const auto& tr = space.triples[best];
            const auto& da = dd.das[tr.da];
            RelationInstance inst;
            inst.k = k;
            inst.decision_id = dd.decision_id;
            inst.da_id = da.id;
            inst.da_index = tr.da;
            inst.indicator_token = space.indicators[tr.ind].token_index;
            inst.indicator_surface =
                da.tokens[inst.indicator_token].surface;
            inst.arg_lo = space.arguments[tr.arg].constituent->lo;
            inst.arg_hi = space.arguments[tr.arg].constituent->hi;
            inst.argument_text = argument_text(dd, space.arguments[tr.arg]);
            inst.probability = q[best];
            instances.push_back(std::move(inst));
        }
    }
    return instances;
}

struct PipelineOptions {
    HyperParams hyper;       // K here is the content-phase K
    int k_cue = 5;
    InferenceConfig config;
    ConstraintBounds bounds;
    bool use_constraints = true;
    const HypernymLexicon* lexicon = nullptr;
    const StopwordSet* stopwords = nullptr;
    bool coarse_pos_tags = false;
};

inline PhaseResult learn_cue_model(const std::vector<DecisionDocument>& docs,
                                   const PipelineOptions& opts) {
    PhaseResult phase;
    FeatureOptions fopts{Phase::Cue, opts.coarse_pos_tags};
    phase.vocab = build_vocabulary(docs, fopts, opts.lexicon, opts.stopwords);
    phase.layout = ModelLayout::from_vocabulary(phase.vocab);

    HyperParams hyper = opts.hyper;
    hyper.K = opts.k_cue;
    SpaceOptions sopts;
    sopts.features = fopts;
    sopts.lexicon = opts.lexicon;
    sopts.stopwords = opts.stopwords;
    for (const auto& dd : docs)
        phase.spaces.push_back(
            build_candidate_space(dd, phase.vocab, hyper, sopts));

    std::vector<ConstraintSpec> constraints;
    if (opts.use_constraints)
        constraints = build_default_constraints(phase.spaces, hyper.K, hyper,
                                                opts.bounds);
    phase.inference = run_inference(phase.spaces, constraints, opts.config,
                                    hyper, phase.layout);
    phase.instances = extract_instances(docs, phase.spaces,
                                        phase.inference.state, hyper.K);
    return phase;
}

// Per-document cue contexts keyed to the earliest cue instance.
inline std::vector<CueContext> annotate_cue_context(
    const std::vector<DecisionDocument>& docs,
    const std::vector<RelationInstance>& cue_instances) {
    std::vector<CueContext> contexts(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& inst : cue_instances)
            if (inst.decision_id == docs[d].decision_id)
                contexts[d].cues.push_back(
                    {inst.da_index, inst.indicator_token});
        std::sort(contexts[d].cues.begin(), contexts[d].cues.end());
    }
    return contexts;
}

inline PhaseResult learn_content_model(
    const std::vector<DecisionDocument>& docs,
    const std::vector<CueContext>& cue_ctxs, const PipelineOptions& opts,
    std::vector<std::string>* warnings = nullptr) {
    PhaseResult phase;
    FeatureOptions fopts{Phase::Content, opts.coarse_pos_tags};
    phase.vocab = build_vocabulary(docs, fopts, opts.lexicon, opts.stopwords);
    phase.layout = ModelLayout::from_vocabulary(phase.vocab);

    HyperParams hyper = opts.hyper;
    static const StopwordSet empty_stopwords;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        SpaceOptions sopts;
        sopts.features = fopts;
        sopts.cue_ctx = &cue_ctxs[d];
        sopts.lexicon = opts.lexicon;
        sopts.stopwords = opts.stopwords ? opts.stopwords : &empty_stopwords;
        sopts.drop_pronoun_only_arguments = true;
        phase.spaces.push_back(
            build_candidate_space(docs[d], phase.vocab, hyper, sopts));
        if (phase.spaces.back().triples.empty() && warnings)
            warnings->push_back("document '" + docs[d].decision_id +
                                "' has no content candidates; NULL only");
    }

    std::vector<ConstraintSpec> constraints;
    if (opts.use_constraints)
        constraints = build_default_constraints(phase.spaces, hyper.K, hyper,
                                                opts.bounds);
    phase.inference = run_inference(phase.spaces, constraints, opts.config,
                                    hyper, phase.layout);
    phase.instances = extract_instances(docs, phase.spaces,
                                        phase.inference.state, hyper.K);
    return phase;
}

inline Summary summarize(const DecisionDocument& dd,
                         const std::vector<RelationInstance>& instances) {
    Summary summary;
    summary.decision_id = dd.decision_id;
    summary.method = "relation";
    for (const auto& inst : instances)
        if (inst.decision_id == dd.decision_id)
            summary.items.push_back(inst);
    std::sort(summary.items.begin(), summary.items.end(),
              [](const RelationInstance& a, const RelationInstance& b) {
                  return a.k < b.k;
              });
    return summary;
}

// Oracle extract: DRDA word tokens whose stem appears in the gold abstract
// after identical preprocessing; each stem emitted once.
inline Summary upperbound_summary(const DecisionDocument& dd,
                                  const StopwordSet& stopwords) {
    if (!dd.gold_abstract || dd.gold_abstract->empty())
        throw std::invalid_argument("document '" + dd.decision_id +
                                    "' has no gold abstract");
    // preprocessing mirroring the scorer: tokenize, lowercase, drop
    // stopwords, stem
    auto preprocess = [&](const std::string& text) {
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
    };

    std::set<std::string> gold;
    for (const auto& s : preprocess(*dd.gold_abstract)) gold.insert(s);

    Summary summary;
    summary.decision_id = dd.decision_id;
    summary.method = "upperbound";
    std::set<std::string> emitted;
    for (const auto& da : dd.das)
        for (const auto& tok : da.tokens) {
            auto stems = preprocess(tok.surface);
            if (stems.empty()) continue;
            bool all_gold = true;
            for (const auto& s : stems)
                if (!gold.count(s)) all_gold = false;
            if (!all_gold) continue;
            std::string key;
            for (const auto& s : stems) key += s + " ";
            if (emitted.insert(key).second)
                summary.texts.push_back(to_lower(tok.surface));
        }
    return summary;
}

}  // namespace relexsum
