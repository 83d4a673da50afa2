#pragma once

// Generative relation model: per-relation feature distributions (foreground
// and background, for indicators and arguments) plus a location distribution
// over document segments. Provides exact log-joint evaluation and forward
// sampling of synthetic corpora.

#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "relexsum/corpus.hpp"
#include "relexsum/features.hpp"
#include "relexsum/rng.hpp"

namespace relexsum {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct HyperParams {
    int K = 10;              // relation types
    int L = 4;               // document segments
    double theta0 = 0.1;     // Dirichlet concentration, feature distributions
    double lambda0 = 0.1;    // Dirichlet concentration, location distribution
    bool allow_null = false; // NULL choice available everywhere
    double null_eps = 1e-3;  // prior weight of the optional NULL choice
};

// Which feature templates the model emits, given a vocabulary.
struct ModelLayout {
    std::vector<int> indicator_templates;
    std::vector<int> argument_templates;
    std::array<int, kNumTemplates> cardinality{};

    static ModelLayout from_vocabulary(const FeatureVocabulary& vocab) {
        ModelLayout layout;
        for (int t = 0; t < kNumTemplates; ++t) {
            int card = vocab.cardinality(static_cast<Tmpl>(t));
            layout.cardinality[t] = card;
            if (card == 0) continue;
            if (!template_is_argument_only(static_cast<Tmpl>(t)))
                layout.indicator_templates.push_back(t);
            layout.argument_templates.push_back(t);
        }
        return layout;
    }
};

// Parameters of one relation type.
struct RelationParams {
    std::array<std::vector<double>, kNumTemplates> theta_i, theta_bi;
    std::array<std::vector<double>, kNumTemplates> theta_a, theta_ba;
    std::vector<double> lambda;  // over L segments
};

using ModelParams = std::vector<RelationParams>;  // size K

// ---------------------------------------------------------------------------
// candidate spaces

using EncodedFeatures = std::vector<std::pair<int, int>>;  // (template, value)

inline EncodedFeatures encode_features(const FeatureVector& fv,
                                       const FeatureVocabulary& vocab) {
    EncodedFeatures out;
    for (const auto& [t, v] : fv.entries) {
        int id = vocab.lookup(t, v);
        if (id >= 0) out.emplace_back(static_cast<int>(t), id);
    }
    return out;
}

struct CandidateSpace {
    const DecisionDocument* source = nullptr;
    int n_das = 0;
    std::vector<int> da_segment;     // per DA
    std::vector<int> segment_sizes;  // per segment, DA counts
    std::vector<IndicatorCandidate> indicators;
    std::vector<ArgumentCandidate> arguments;
    std::vector<EncodedFeatures> indicator_feats;
    std::vector<EncodedFeatures> argument_feats;
    std::vector<int> w_per_da, x_per_da;

    struct Triple {
        int da;   // DA index z
        int ind;  // index into indicators
        int arg;  // index into arguments
    };
    std::vector<Triple> triples;
    bool has_null = false;
    double null_prior = 1.0;     // prior probability of the NULL choice
    double triple_scale = 1.0;   // prior scale applied to every triple

    int num_choices() const {
        return static_cast<int>(triples.size()) + (has_null ? 1 : 0);
    }
    bool choice_is_null(int c) const {
        return has_null && c == static_cast<int>(triples.size());
    }
};

struct SpaceOptions {
    FeatureOptions features;
    const CueContext* cue_ctx = nullptr;
    const HypernymLexicon* lexicon = nullptr;
    const StopwordSet* stopwords = nullptr;
    bool drop_pronoun_only_arguments = false;  // content phase filter
};

inline CandidateSpace build_candidate_space(const DecisionDocument& dd,
                                            const FeatureVocabulary& vocab,
                                            const HyperParams& hyper,
                                            const SpaceOptions& opts) {
    CandidateSpace space;
    space.source = &dd;
    space.n_das = static_cast<int>(dd.das.size());
    space.segment_sizes.assign(hyper.L, 0);
    for (int z = 0; z < space.n_das; ++z) {
        int s = segment_of(dd, z);
        space.da_segment.push_back(s);
        space.segment_sizes[s] += 1;
    }

    auto [indicators, arguments] = extract_candidates(dd);
    if (opts.drop_pronoun_only_arguments && opts.stopwords) {
        std::vector<ArgumentCandidate> kept;
        for (const auto& a : arguments)
            if (!is_pronoun_only(dd, a, *opts.stopwords)) kept.push_back(a);
        arguments = std::move(kept);
    }
    space.indicators = std::move(indicators);
    space.arguments = std::move(arguments);

    for (const auto& c : space.indicators)
        space.indicator_feats.push_back(encode_features(
            indicator_features(dd, c, opts.features, opts.cue_ctx,
                               opts.lexicon),
            vocab));
    for (const auto& c : space.arguments)
        space.argument_feats.push_back(encode_features(
            argument_features(dd, c, opts.features, opts.cue_ctx, opts.lexicon,
                              opts.stopwords),
            vocab));

    space.w_per_da.assign(space.n_das, 0);
    space.x_per_da.assign(space.n_das, 0);
    for (const auto& c : space.indicators) space.w_per_da[c.da_index] += 1;
    for (const auto& c : space.arguments) space.x_per_da[c.da_index] += 1;

    for (int i = 0; i < static_cast<int>(space.indicators.size()); ++i)
        for (int a = 0; a < static_cast<int>(space.arguments.size()); ++a)
            if (space.indicators[i].da_index == space.arguments[a].da_index)
                space.triples.push_back(
                    {space.indicators[i].da_index, i, a});

    if (space.triples.empty()) {
        space.has_null = true;  // NULL forced; absorbs all prior mass
        space.null_prior = 1.0;
        space.triple_scale = 1.0;
    } else if (hyper.allow_null) {
        space.has_null = true;
        space.null_prior = hyper.null_eps / (1.0 + hyper.null_eps);
        space.triple_scale = 1.0 / (1.0 + hyper.null_eps);
    }
    return space;
}

// ---------------------------------------------------------------------------
// probability pieces

// log[ lambda_k[seg(z)] * (1/|seg(z)|) * (1/W_z) * (1/X_z) ]
inline double triple_prior_log(const CandidateSpace& space,
                               const CandidateSpace::Triple& triple,
                               const std::vector<double>& lambda_k) {
    int seg = space.da_segment[triple.da];
    double lam = lambda_k[seg];
    if (lam <= 0.0) return kNegInf;
    return std::log(lam) - std::log(double(space.segment_sizes[seg])) -
           std::log(double(space.w_per_da[triple.da])) -
           std::log(double(space.x_per_da[triple.da]));
}

// Product-of-experts emission: each relation contributes its foreground
// vector when it chose this unit, else its background vector; the product
// is normalized per template over the template's value vocabulary.
inline double feature_emission_log(const EncodedFeatures& feats, Role role,
                                   const std::vector<char>& chosen_by,
                                   const ModelParams& params,
                                   const ModelLayout& layout) {
    double total = 0.0;
    for (const auto& [t, v] : feats) {
        int card = layout.cardinality[t];
        if (card <= 0)
            throw std::invalid_argument("feature template not in layout");
        // log weights over the value vocabulary
        std::vector<double> logw(card, 0.0);
        for (std::size_t k = 0; k < params.size(); ++k) {
            const auto& vec =
                role == Role::Indicator
                    ? (chosen_by[k] ? params[k].theta_i[t]
                                    : params[k].theta_bi[t])
                    : (chosen_by[k] ? params[k].theta_a[t]
                                    : params[k].theta_ba[t]);
            if (static_cast<int>(vec.size()) != card)
                throw std::invalid_argument("parameter dimension mismatch");
            for (int u = 0; u < card; ++u)
                logw[u] += vec[u] > 0.0 ? std::log(vec[u]) : kNegInf;
        }
        double mx = *std::max_element(logw.begin(), logw.end());
        if (mx == kNegInf) return kNegInf;
        double z = 0.0;
        for (double lw : logw) z += std::exp(lw - mx);
        total += logw[v] - (mx + std::log(z));
    }
    return total;
}

inline double log_dirichlet_density(const std::vector<double>& p,
                                    double alpha) {
    double n = static_cast<double>(p.size());
    double out = std::lgamma(n * alpha) - n * std::lgamma(alpha);
    for (double v : p) {
        if (v <= 0.0) {
            if (alpha == 1.0) continue;
            return alpha > 1.0 ? kNegInf
                               : std::numeric_limits<double>::infinity();
        }
        out += (alpha - 1.0) * std::log(v);
    }
    return out;
}

// Latent assignment: per (d, k) a choice index into the candidate space
// (triples, then NULL last when present).
using LatentAssignment = std::vector<std::vector<int>>;  // [doc][k]

inline double log_joint(const ModelParams& params,
                        const LatentAssignment& assignments,
                        const std::vector<CandidateSpace>& spaces,
                        const HyperParams& hyper, const ModelLayout& layout) {
    const int K = static_cast<int>(params.size());
    double total = 0.0;

    for (const auto& rel : params) {
        for (int t : layout.indicator_templates) {
            total += log_dirichlet_density(rel.theta_i[t], hyper.theta0);
            total += log_dirichlet_density(rel.theta_bi[t], hyper.theta0);
        }
        for (int t : layout.argument_templates) {
            total += log_dirichlet_density(rel.theta_a[t], hyper.theta0);
            total += log_dirichlet_density(rel.theta_ba[t], hyper.theta0);
        }
        total += log_dirichlet_density(rel.lambda, hyper.lambda0);
    }

    for (std::size_t d = 0; d < spaces.size(); ++d) {
        const auto& space = spaces[d];
        // selection priors
        for (int k = 0; k < K; ++k) {
            int c = assignments[d][k];
            if (space.choice_is_null(c)) {
                total += std::log(space.null_prior);
            } else {
                total += triple_prior_log(space, space.triples[c],
                                          params[k].lambda) +
                         std::log(space.triple_scale);
            }
        }
        // emissions: every candidate unit emits, foreground for the
        // relations that selected it
        std::vector<char> chosen(K, 0);
        for (std::size_t i = 0; i < space.indicators.size(); ++i) {
            for (int k = 0; k < K; ++k) {
                int c = assignments[d][k];
                chosen[k] = !space.choice_is_null(c) &&
                            space.triples[c].ind == static_cast<int>(i);
            }
            total += feature_emission_log(space.indicator_feats[i],
                                          Role::Indicator, chosen, params,
                                          layout);
        }
        for (std::size_t a = 0; a < space.arguments.size(); ++a) {
            for (int k = 0; k < K; ++k) {
                int c = assignments[d][k];
                chosen[k] = !space.choice_is_null(c) &&
                            space.triples[c].arg == static_cast<int>(a);
            }
            total += feature_emission_log(space.argument_feats[a],
                                          Role::Argument, chosen, params,
                                          layout);
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// synthetic corpora

struct SynthShape {
    int docs = 40;
    int das_per_doc = 8;
    int indicators_per_da = 2;
    int arguments_per_da = 2;
    int indicator_vocab = 12;  // unigram stem values for indicators
    int argument_vocab = 12;   // unigram stem values for argument heads
};

struct PlantedTruth {
    std::string doc_id;
    int k = 0;
    int da_index = 0;
    int indicator_token = 0;
    int arg_lo = 0, arg_hi = 0;
};

struct SynthResult {
    Corpus corpus;
    std::vector<PlantedTruth> truth;
    ModelParams params;  // the parameters the corpus was drawn from
};

// Draw model parameters from the prior; only the unigram-stem template
// carries signal in synthetic corpora, so only it is parameterized here.
inline ModelParams sample_synth_params(const SynthShape& shape,
                                       const HyperParams& hyper, Rng& rng) {
    ModelParams params(hyper.K);
    int t = static_cast<int>(Tmpl::UnigramStem);
    for (auto& rel : params) {
        rel.theta_i[t] = rng.dirichlet_symmetric(shape.indicator_vocab,
                                                 hyper.theta0);
        rel.theta_bi[t] = rng.dirichlet_symmetric(shape.indicator_vocab,
                                                  hyper.theta0);
        rel.theta_a[t] = rng.dirichlet_symmetric(shape.argument_vocab,
                                                 hyper.theta0);
        rel.theta_ba[t] = rng.dirichlet_symmetric(shape.argument_vocab,
                                                  hyper.theta0);
        rel.lambda = rng.dirichlet_symmetric(hyper.L, hyper.lambda0);
    }
    return params;
}

// Well-separated planted parameters: each relation k concentrates its
// foreground stems on a disjoint block of the vocabulary and its location
// mass on `seg`; backgrounds are uniform.
inline ModelParams make_planted_params(const SynthShape& shape,
                                       const HyperParams& hyper, int seg,
                                       double fg_mass = 0.95) {
    ModelParams params(hyper.K);
    int t = static_cast<int>(Tmpl::UnigramStem);
    auto concentrated = [&](int vocab, int k) {
        int block = std::max(1, vocab / hyper.K);
        int lo = k * block, hi = std::min(vocab, lo + block);
        std::vector<double> p(vocab,
                              (1.0 - fg_mass) / std::max(1, vocab - (hi - lo)));
        for (int v = lo; v < hi; ++v) p[v] = fg_mass / (hi - lo);
        double sum = 0.0;
        for (double v : p) sum += v;
        for (double& v : p) v /= sum;
        return p;
    };
    for (int k = 0; k < hyper.K; ++k) {
        auto& rel = params[k];
        rel.theta_i[t] = concentrated(shape.indicator_vocab, k);
        rel.theta_bi[t] = std::vector<double>(shape.indicator_vocab,
                                              1.0 / shape.indicator_vocab);
        rel.theta_a[t] = concentrated(shape.argument_vocab, k);
        rel.theta_ba[t] = std::vector<double>(shape.argument_vocab,
                                              1.0 / shape.argument_vocab);
        rel.lambda.assign(hyper.L, 0.02 / (hyper.L - 1));
        rel.lambda[seg] = 0.98;
    }
    return params;
}

// Exact forward sampling of the generative process. Emits a corpus in the
// standard input format: one meeting, one decision per document; indicator
// tokens are verbs `iw<v>`, argument heads sit inside one-token NPs `aw<v>`.
inline SynthResult sample_corpus(const ModelParams& params,
                                 const HyperParams& hyper,
                                 const SynthShape& shape,
                                 std::uint64_t seed) {
    if (shape.docs < 1 || shape.das_per_doc < 1 ||
        shape.indicators_per_da < 1 || shape.arguments_per_da < 1)
        throw std::invalid_argument("infeasible synthetic shape");
    Rng rng(seed);
    const int K = static_cast<int>(params.size());
    const int t = static_cast<int>(Tmpl::UnigramStem);

    SynthResult result;
    result.params = params;
    Meeting meeting;
    meeting.id = "synth";

    int order = 0;
    for (int d = 0; d < shape.docs; ++d) {
        std::string doc_id = "doc" + std::to_string(d);
        meeting.decisions.push_back(
            {doc_id, "synthetic decision " + std::to_string(d)});

        int n = shape.das_per_doc;
        // segment membership mirrors segment_of
        std::vector<std::vector<int>> segment_das(hyper.L);
        for (int z = 0; z < n; ++z)
            segment_das[static_cast<int>(
                            (static_cast<long long>(z) * hyper.L) / n)]
                .push_back(z);

        // step 2: choose (segment, DA, indicator, argument) per relation
        struct Choice { int z, ind_slot, arg_slot; };
        std::vector<Choice> choices(K);
        for (int k = 0; k < K; ++k) {
            int s;
            do {
                s = static_cast<int>(rng.categorical(params[k].lambda));
            } while (segment_das[s].empty());
            int z = segment_das[s][rng.uniform_index(segment_das[s].size())];
            choices[k] = {z,
                          static_cast<int>(
                              rng.uniform_index(shape.indicators_per_da)),
                          static_cast<int>(
                              rng.uniform_index(shape.arguments_per_da))};
        }

        // steps 3-4: emit unit features from the normalized product
        auto product_dist = [&](bool indicator, const std::vector<char>& fg) {
            int vocab = indicator ? static_cast<int>(params[0].theta_i[t].size())
                                  : static_cast<int>(params[0].theta_a[t].size());
            std::vector<double> logw(vocab, 0.0);
            for (int k = 0; k < K; ++k) {
                const auto& vec = indicator
                                      ? (fg[k] ? params[k].theta_i[t]
                                               : params[k].theta_bi[t])
                                      : (fg[k] ? params[k].theta_a[t]
                                               : params[k].theta_ba[t]);
                for (int v = 0; v < vocab; ++v)
                    logw[v] += vec[v] > 0.0 ? std::log(vec[v]) : kNegInf;
            }
            double mx = *std::max_element(logw.begin(), logw.end());
            double z = 0.0;
            for (double lw : logw) z += std::exp(lw - mx);
            std::vector<double> p(vocab);
            for (int v = 0; v < vocab; ++v)
                p[v] = std::exp(logw[v] - mx) / z;
            return p;
        };

        for (int z = 0; z < n; ++z) {
            DialogueAct da;
            da.id = doc_id + "_da" + std::to_string(z);
            da.meeting_id = meeting.id;
            da.order = order++;
            da.speaker = "S";
            da.speaker_role = "participant";
            da.da_type = "inform";
            da.topic = "synthetic";
            da.decision_ids = {doc_id};

            std::vector<char> fg(K, 0);
            for (int j = 0; j < shape.indicators_per_da; ++j) {
                for (int k = 0; k < K; ++k)
                    fg[k] = choices[k].z == z && choices[k].ind_slot == j;
                int v = static_cast<int>(
                    rng.categorical(product_dist(true, fg)));
                Token tok;
                tok.index = static_cast<int>(da.tokens.size());
                tok.surface = "iw" + std::to_string(v);
                tok.stem = tok.surface;
                tok.pos = "VB";
                da.tokens.push_back(tok);
            }
            std::vector<std::pair<int, int>> arg_spans;
            for (int j = 0; j < shape.arguments_per_da; ++j) {
                for (int k = 0; k < K; ++k)
                    fg[k] = choices[k].z == z && choices[k].arg_slot == j;
                int v = static_cast<int>(
                    rng.categorical(product_dist(false, fg)));
                Token tok;
                tok.index = static_cast<int>(da.tokens.size());
                tok.surface = "aw" + std::to_string(v);
                tok.stem = tok.surface;
                tok.pos = "JJ";
                arg_spans.emplace_back(tok.index, tok.index + 1);
                da.tokens.push_back(tok);
            }

            da.parse.label = "S";
            da.parse.lo = 0;
            da.parse.hi = static_cast<int>(da.tokens.size());
            for (auto [lo, hi] : arg_spans) {
                ConstituentNode np;
                np.label = "NP";
                np.lo = lo;
                np.hi = hi;
                np.head = lo;
                da.parse.children.push_back(np);
            }
            meeting.das.push_back(std::move(da));
        }

        for (int k = 0; k < K; ++k) {
            const auto& c = choices[k];
            result.truth.push_back(
                {doc_id, k, c.z, c.ind_slot,
                 shape.indicators_per_da + c.arg_slot,
                 shape.indicators_per_da + c.arg_slot + 1});
        }
    }
    result.corpus.meetings.push_back(std::move(meeting));
    return result;
}

inline void save_ground_truth(const std::vector<PlantedTruth>& truth,
                              const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write ground-truth file: " + path);
    for (const auto& t : truth)
        out << t.doc_id << '\t' << t.k << '\t' << t.da_index << '\t'
            << t.indicator_token << '\t' << t.arg_lo << '\t' << t.arg_hi
            << '\n';
}

inline std::vector<PlantedTruth> load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open ground-truth file: " + path);
    std::vector<PlantedTruth> truth;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        PlantedTruth t;
        std::istringstream is(line);
        if (!(is >> t.doc_id >> t.k >> t.da_index >> t.indicator_token >>
              t.arg_lo >> t.arg_hi))
            throw LoadError("malformed ground-truth line: " + line);
        truth.push_back(t);
    }
    return truth;
}

}  // namespace relexsum
