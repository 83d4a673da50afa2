#pragma once

// Mean-field variational coordinate descent with posterior regularization:
// conjugate Dirichlet updates, unconstrained q(z) from digamma expectations,
// KL projection onto expectation constraints via projected gradient ascent
// on the dual, random restarts and convergence control.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "relexsum/model.hpp"
#include "relexsum/rng.hpp"

namespace relexsum {

// ---------------------------------------------------------------------------
// small math helpers

inline double digamma(double x) {
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12 -
                      inv2 * (1.0 / 120 -
                              inv2 * (1.0 / 252 -
                                      inv2 * (1.0 / 240 - inv2 / 132))));
    return result;
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// KL(Dir(alpha) || Dir(beta, ..., beta))
inline double dirichlet_kl_to_symmetric(const std::vector<double>& alpha,
                                        double beta) {
    double a0 = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    double n = static_cast<double>(alpha.size());
    double kl = std::lgamma(a0) - std::lgamma(n * beta) +
                n * std::lgamma(beta);
    double psi_a0 = digamma(a0);
    for (double a : alpha)
        kl += -std::lgamma(a) + (a - beta) * (digamma(a) - psi_a0);
    return kl;
}

// ---------------------------------------------------------------------------
// variational state

// Dirichlet concentrations, shaped exactly like the probability parameters.
struct VariationalState {
    ModelParams dirichlets;                            // concentrations
    std::vector<std::vector<std::vector<double>>> c_hat;  // [doc][k][choice]
};

// Posterior-mean point estimates, for reporting and artifacts.
inline ModelParams posterior_mean(const ModelParams& dirichlets,
                                  const ModelLayout& layout) {
    ModelParams mean = dirichlets;
    auto normalize = [](std::vector<double>& v) {
        double s = std::accumulate(v.begin(), v.end(), 0.0);
        for (double& x : v) x /= s;
    };
    for (auto& rel : mean) {
        for (int t : layout.indicator_templates) {
            normalize(rel.theta_i[t]);
            normalize(rel.theta_bi[t]);
        }
        for (int t : layout.argument_templates) {
            normalize(rel.theta_a[t]);
            normalize(rel.theta_ba[t]);
        }
        normalize(rel.lambda);
    }
    return mean;
}

// ---------------------------------------------------------------------------
// constraints

enum class Direction { Leq, Geq };

// Expectation constraint E_q[f] <= b or >= b where f is additive across
// (document, relation) factors; `terms` hold per-choice counts for every
// factor the constraint touches.
struct ConstraintSpec {
    std::string id;
    Direction direction = Direction::Leq;
    double bound = 0.0;
    struct Term {
        int doc = 0;
        int k = 0;
        std::vector<double> counts;  // per choice (incl. NULL, which counts 0)
    };
    std::vector<Term> terms;
};

inline double constraint_expectation(
    const ConstraintSpec& c,
    const std::vector<std::vector<std::vector<double>>>& q) {
    double e = 0.0;
    for (const auto& term : c.terms) {
        const auto& qc = q[term.doc][term.k];
        for (std::size_t i = 0; i < term.counts.size(); ++i)
            e += term.counts[i] * qc[i];
    }
    return e;
}

// signed violation: positive when the constraint is not satisfied
inline double constraint_violation(
    const ConstraintSpec& c,
    const std::vector<std::vector<std::vector<double>>>& q) {
    double e = constraint_expectation(c, q);
    return c.direction == Direction::Leq ? e - c.bound : c.bound - e;
}

// ---------------------------------------------------------------------------
// syntactic patterns

namespace detail {

inline const ConstituentNode* find_parent(const ConstituentNode& root,
                                          const ConstituentNode* target) {
    for (const auto& c : root.children) {
        if (&c == target) return &root;
        if (target->lo >= c.lo && target->hi <= c.hi)
            if (const auto* p = find_parent(c, target)) return p;
    }
    return nullptr;
}

// token attaches directly under `node`: inside its span but not inside any
// multi-token child
inline bool attaches_under(const ConstituentNode& node, int token) {
    if (token < node.lo || token >= node.hi) return false;
    for (const auto& c : node.children)
        if (token >= c.lo && token < c.hi && c.hi - c.lo > 1) return false;
    return true;
}

}  // namespace detail

// The three licensed indicator-argument configurations: verb + NP object or
// subject, verb + sibling PP / to-clause, and head noun + sibling PP.
inline bool syntactic_match(const DecisionDocument& dd,
                            const IndicatorCandidate& ind,
                            const ArgumentCandidate& arg) {
    if (ind.da_index != arg.da_index) return false;
    const auto& da = dd.das[ind.da_index];
    const auto& tok = da.tokens[ind.token_index];
    const auto& node = *arg.constituent;
    bool indicator_is_verb = tok.pos.rfind("VB", 0) == 0;
    bool indicator_is_noun = tok.pos.rfind("NN", 0) == 0;

    if (indicator_is_verb && node.label == "NP") {
        int head = headword_of(node, da);
        if (const auto* edge = da.incoming_edge(head))
            if ((edge->relation == "dobj" || edge->relation == "nsubj") &&
                edge->head == ind.token_index)
                return true;
    }
    if (indicator_is_verb &&
        (node.label == "PP" || is_to_clause(node, da))) {
        if (const auto* parent = detail::find_parent(da.parse, &node))
            if (detail::attaches_under(*parent, ind.token_index)) return true;
    }
    if (indicator_is_noun && node.label == "PP") {
        // find an NP headed by the indicator that is a sibling of the arg
        const auto* arg_parent = detail::find_parent(da.parse, &node);
        if (arg_parent) {
            std::function<bool(const ConstituentNode&)> scan =
                [&](const ConstituentNode& cur) -> bool {
                if (cur.label == "NP" && &cur != &node &&
                    headword_of(cur, da) == ind.token_index &&
                    detail::find_parent(da.parse, &cur) == arg_parent)
                    return true;
                for (const auto& c : cur.children)
                    if (scan(c)) return true;
                return false;
            };
            if (scan(da.parse)) return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// default constraint set (syntactic / prevalence / occurrence / discourse)

struct ConstraintBounds {
    double syntactic_fraction = 0.8;   // >= 0.8 D per relation
    double prevalence_fraction = 0.8;  // >= 0.8 D per relation
    double indicator_occurrence = 2.0; // <= 2 relation types per word
    double argument_occurrence = 2.0;  // <= 2 argument memberships per word
    double span_occurrence = 1.0;      // <= 1 relation type per exact span
    double discourse_fraction = 0.5;   // >= 0.5 D in the last segment
};

inline std::vector<ConstraintSpec> build_default_constraints(
    const std::vector<CandidateSpace>& spaces, int K,
    const HyperParams& hyper, const ConstraintBounds& bounds = {}) {
    const int D = static_cast<int>(spaces.size());
    std::vector<ConstraintSpec> out;

    // per relation: syntactic, prevalence, discourse
    for (int k = 0; k < K; ++k) {
        ConstraintSpec syn, prev, disc;
        syn.id = "syntactic/k" + std::to_string(k);
        syn.direction = Direction::Geq;
        syn.bound = bounds.syntactic_fraction * D;
        prev.id = "prevalence/k" + std::to_string(k);
        prev.direction = Direction::Geq;
        prev.bound = bounds.prevalence_fraction * D;
        disc.id = "discourse/k" + std::to_string(k);
        disc.direction = Direction::Geq;
        disc.bound = bounds.discourse_fraction * D;
        for (int d = 0; d < D; ++d) {
            const auto& space = spaces[d];
            int nc = space.num_choices();
            std::vector<double> syn_counts(nc, 0.0), prev_counts(nc, 0.0),
                disc_counts(nc, 0.0);
            for (std::size_t c = 0; c < space.triples.size(); ++c) {
                const auto& tr = space.triples[c];
                prev_counts[c] = 1.0;
                if (syntactic_match(*space.source, space.indicators[tr.ind],
                                    space.arguments[tr.arg]))
                    syn_counts[c] = 1.0;
                if (space.da_segment[tr.da] == hyper.L - 1)
                    disc_counts[c] = 1.0;
            }
            syn.terms.push_back({d, k, syn_counts});
            prev.terms.push_back({d, k, prev_counts});
            disc.terms.push_back({d, k, disc_counts});
        }
        out.push_back(std::move(syn));
        out.push_back(std::move(prev));
        out.push_back(std::move(disc));
    }

    // per document: occurrence constraints over words and exact spans
    for (int d = 0; d < D; ++d) {
        const auto& space = spaces[d];
        int nc = space.num_choices();

        std::set<std::pair<int, int>> indicator_words;
        for (const auto& c : space.indicators)
            indicator_words.insert({c.da_index, c.token_index});
        for (const auto& [da, tok] : indicator_words) {
            ConstraintSpec spec;
            spec.id = "occurrence-indicator/d" + std::to_string(d) + "/da" +
                      std::to_string(da) + "/t" + std::to_string(tok);
            spec.direction = Direction::Leq;
            spec.bound = bounds.indicator_occurrence;
            std::vector<double> counts(nc, 0.0);
            for (std::size_t c = 0; c < space.triples.size(); ++c) {
                const auto& ind = space.indicators[space.triples[c].ind];
                if (ind.da_index == da && ind.token_index == tok)
                    counts[c] = 1.0;
            }
            for (int k = 0; k < K; ++k) spec.terms.push_back({d, k, counts});
            out.push_back(std::move(spec));
        }

        std::set<std::tuple<int, int, int>> spans;
        std::set<std::pair<int, int>> arg_words;
        for (const auto& c : space.arguments) {
            spans.insert({c.da_index, c.constituent->lo, c.constituent->hi});
            for (int i = c.constituent->lo; i < c.constituent->hi; ++i)
                arg_words.insert({c.da_index, i});
        }
        for (const auto& [da, tok] : arg_words) {
            ConstraintSpec spec;
            spec.id = "occurrence-argword/d" + std::to_string(d) + "/da" +
                      std::to_string(da) + "/t" + std::to_string(tok);
            spec.direction = Direction::Leq;
            spec.bound = bounds.argument_occurrence;
            std::vector<double> counts(nc, 0.0);
            for (std::size_t c = 0; c < space.triples.size(); ++c) {
                const auto& arg = space.arguments[space.triples[c].arg];
                if (arg.da_index == da && tok >= arg.constituent->lo &&
                    tok < arg.constituent->hi)
                    counts[c] = 1.0;
            }
            for (int k = 0; k < K; ++k) spec.terms.push_back({d, k, counts});
            out.push_back(std::move(spec));
        }
        for (const auto& [da, lo, hi] : spans) {
            ConstraintSpec spec;
            spec.id = "occurrence-span/d" + std::to_string(d) + "/da" +
                      std::to_string(da) + "/" + std::to_string(lo) + ":" +
                      std::to_string(hi);
            spec.direction = Direction::Leq;
            spec.bound = bounds.span_occurrence;
            std::vector<double> counts(nc, 0.0);
            for (std::size_t c = 0; c < space.triples.size(); ++c) {
                const auto& arg = space.arguments[space.triples[c].arg];
                if (arg.da_index == da && arg.constituent->lo == lo &&
                    arg.constituent->hi == hi)
                    counts[c] = 1.0;
            }
            for (int k = 0; k < K; ++k) spec.terms.push_back({d, k, counts});
            out.push_back(std::move(spec));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// coordinate updates

// Conjugate Dirichlet update: prior concentration plus expected counts
// under c_hat.
inline void update_q_theta(VariationalState& state,
                           const std::vector<CandidateSpace>& spaces,
                           const ModelLayout& layout,
                           const HyperParams& hyper) {
    const int K = hyper.K;
    state.dirichlets.assign(K, RelationParams{});
    for (auto& rel : state.dirichlets) {
        for (int t : layout.indicator_templates) {
            rel.theta_i[t].assign(layout.cardinality[t], hyper.theta0);
            rel.theta_bi[t].assign(layout.cardinality[t], hyper.theta0);
        }
        for (int t : layout.argument_templates) {
            rel.theta_a[t].assign(layout.cardinality[t], hyper.theta0);
            rel.theta_ba[t].assign(layout.cardinality[t], hyper.theta0);
        }
        rel.lambda.assign(hyper.L, hyper.lambda0);
    }

    for (std::size_t d = 0; d < spaces.size(); ++d) {
        const auto& space = spaces[d];
        for (int k = 0; k < K; ++k) {
            const auto& q = state.c_hat[d][k];
            auto& rel = state.dirichlets[k];

            // P(relation k chose unit u) for indicators and arguments
            std::vector<double> p_ind(space.indicators.size(), 0.0);
            std::vector<double> p_arg(space.arguments.size(), 0.0);
            for (std::size_t c = 0; c < space.triples.size(); ++c) {
                p_ind[space.triples[c].ind] += q[c];
                p_arg[space.triples[c].arg] += q[c];
                rel.lambda[space.da_segment[space.triples[c].da]] += q[c];
            }
            for (std::size_t u = 0; u < space.indicators.size(); ++u)
                for (const auto& [t, v] : space.indicator_feats[u]) {
                    rel.theta_i[t][v] += p_ind[u];
                    rel.theta_bi[t][v] += 1.0 - p_ind[u];
                }
            for (std::size_t u = 0; u < space.arguments.size(); ++u)
                for (const auto& [t, v] : space.argument_feats[u]) {
                    rel.theta_a[t][v] += p_arg[u];
                    rel.theta_ba[t][v] += 1.0 - p_arg[u];
                }
        }
    }
}

namespace detail {

// E[log theta_v] under Dirichlet concentrations
struct LogExpectations {
    // same shapes as ModelParams, values psi(a_v) - psi(a_0)
    ModelParams elog;

    static LogExpectations from(const ModelParams& dirichlets,
                                const ModelLayout& layout) {
        LogExpectations out;
        out.elog = dirichlets;
        auto apply = [](std::vector<double>& v) {
            double a0 = std::accumulate(v.begin(), v.end(), 0.0);
            double psi0 = digamma(a0);
            for (double& a : v) a = digamma(a) - psi0;
        };
        for (auto& rel : out.elog) {
            for (int t = 0; t < kNumTemplates; ++t) {
                if (!rel.theta_i[t].empty()) apply(rel.theta_i[t]);
                if (!rel.theta_bi[t].empty()) apply(rel.theta_bi[t]);
                if (!rel.theta_a[t].empty()) apply(rel.theta_a[t]);
                if (!rel.theta_ba[t].empty()) apply(rel.theta_ba[t]);
            }
            apply(rel.lambda);
        }
        (void)layout;
        return out;
    }
};

inline void normalize_in_place(std::vector<double>& logw) {
    double mx = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (double lw : logw) z += std::exp(lw - mx);
    double logz = mx + std::log(z);
    for (double& lw : logw) lw = std::exp(lw - logz);
}

}  // namespace detail

// Normalized q'(z) per (document, relation) factor from the digamma
// expectations of the current Dirichlet state.
inline std::vector<std::vector<std::vector<double>>> unconstrained_qz(
    const VariationalState& state, const std::vector<CandidateSpace>& spaces,
    const ModelLayout& layout, const HyperParams& hyper) {
    auto ex = detail::LogExpectations::from(state.dirichlets, layout);
    std::vector<std::vector<std::vector<double>>> q(spaces.size());
    for (std::size_t d = 0; d < spaces.size(); ++d) {
        const auto& space = spaces[d];
        q[d].resize(hyper.K);
        for (int k = 0; k < hyper.K; ++k) {
            const auto& rel = ex.elog[k];
            std::vector<double> logw(space.num_choices(), 0.0);
            for (std::size_t c = 0; c < space.triples.size(); ++c) {
                const auto& tr = space.triples[c];
                int seg = space.da_segment[tr.da];
                double lw = rel.lambda[seg] -
                            std::log(double(space.segment_sizes[seg])) -
                            std::log(double(space.w_per_da[tr.da])) -
                            std::log(double(space.x_per_da[tr.da])) +
                            std::log(space.triple_scale);
                for (const auto& [t, v] : space.indicator_feats[tr.ind])
                    lw += rel.theta_i[t][v] - rel.theta_bi[t][v];
                for (const auto& [t, v] : space.argument_feats[tr.arg])
                    lw += rel.theta_a[t][v] - rel.theta_ba[t][v];
                logw[c] = lw;
            }
            if (space.has_null)
                logw[space.triples.size()] = std::log(space.null_prior);
            detail::normalize_in_place(logw);
            q[d][k] = std::move(logw);
        }
    }
    return q;
}

// ---------------------------------------------------------------------------
// KL projection onto the constraint set, solved in the dual

struct InferenceConfig {
    int restarts = 10;
    double tol = 1e-5;        // relative free-energy change
    int max_sweeps = 200;
    double dual_step = 0.05;
    int dual_max_iters = 500;
    double dual_tol = 1e-6;
    std::uint64_t seed = 0;
    int threads = 1;
    double feasibility_slack = 1e-3;
};

struct DualState {
    std::vector<double> mu;      // one non-negative multiplier per constraint
    std::vector<double> trace;   // dual objective per accepted step
    bool converged = false;
    std::vector<std::string> violated;  // ids with violation > slack
    double max_violation = 0.0;
};

struct InfeasibleConstraints : std::runtime_error {
    explicit InfeasibleConstraints(const std::string& msg)
        : std::runtime_error(msg) {}
};

// q(t) ∝ q'(t) exp(-sum_c mu_c f_c(t)) per factor; mu maximizes the dual
// g(mu) = -b.mu - sum_factors log Z_factor(mu) by projected gradient ascent
// with step halving on dual decrease.
inline std::pair<std::vector<std::vector<std::vector<double>>>, DualState>
project(const std::vector<std::vector<std::vector<double>>>& q_prime,
        const std::vector<ConstraintSpec>& constraints,
        const InferenceConfig& config) {
    DualState dual;
    if (constraints.empty()) return {q_prime, dual};

    const int C = static_cast<int>(constraints.size());
    // signed counts: >= constraints are negated into <= form
    struct FactorRef {
        int constraint;
        const std::vector<double>* counts;
        double sign;
    };
    std::map<std::pair<int, int>, std::vector<FactorRef>> touched;
    std::vector<double> bound(C);
    for (int c = 0; c < C; ++c) {
        double sign = constraints[c].direction == Direction::Leq ? 1.0 : -1.0;
        bound[c] = sign * constraints[c].bound;
        for (const auto& term : constraints[c].terms)
            touched[{term.doc, term.k}].push_back({c, &term.counts, sign});
    }

    std::vector<double> mu(C, 0.0);
    auto q = q_prime;

    // recompute q on touched factors for the current mu; returns the dual
    // objective and fills the expectation of each (signed) count function
    auto evaluate = [&](const std::vector<double>& mu_cur,
                        std::vector<double>& expectation) {
        std::fill(expectation.begin(), expectation.end(), 0.0);
        double dual_obj = 0.0;
        for (int c = 0; c < C; ++c) dual_obj -= mu_cur[c] * bound[c];
        for (const auto& [factor, refs] : touched) {
            const auto& base = q_prime[factor.first][factor.second];
            auto& out = q[factor.first][factor.second];
            std::vector<double> logw(base.size());
            for (std::size_t i = 0; i < base.size(); ++i)
                logw[i] = base[i] > 0.0 ? std::log(base[i]) : kNegInf;
            for (const auto& ref : refs)
                for (std::size_t i = 0; i < ref.counts->size(); ++i)
                    logw[i] -= mu_cur[ref.constraint] * ref.sign *
                               (*ref.counts)[i];
            double mx = *std::max_element(logw.begin(), logw.end());
            double z = 0.0;
            for (double lw : logw) z += std::exp(lw - mx);
            dual_obj -= mx + std::log(z);
            for (std::size_t i = 0; i < base.size(); ++i)
                out[i] = std::exp(logw[i] - mx) / z;
            for (const auto& ref : refs)
                for (std::size_t i = 0; i < ref.counts->size(); ++i)
                    expectation[ref.constraint] +=
                        ref.sign * (*ref.counts)[i] * out[i];
        }
        return dual_obj;
    };

    std::vector<double> expectation(C, 0.0);
    double dual_obj = evaluate(mu, expectation);
    double step = config.dual_step;
    constexpr double kMuCap = 1e5;

    for (int iter = 0; iter < config.dual_max_iters; ++iter) {
        // projected gradient: grad_c = E[f_c] - b_c, mu >= 0
        double grad_norm = 0.0;
        for (int c = 0; c < C; ++c) {
            double g = expectation[c] - bound[c];
            if (mu[c] <= 0.0 && g < 0.0) g = 0.0;
            grad_norm = std::max(grad_norm, std::abs(g));
        }
        if (grad_norm < config.dual_tol) {
            dual.converged = true;
            break;
        }

        bool accepted = false;
        std::vector<double> mu_next(C), exp_next(C);
        for (int half = 0; half < 40; ++half) {
            for (int c = 0; c < C; ++c)
                mu_next[c] = std::max(
                    0.0, mu[c] + step * (expectation[c] - bound[c]));
            double next_obj = evaluate(mu_next, exp_next);
            if (next_obj >= dual_obj - 1e-15) {
                mu = mu_next;
                expectation = exp_next;
                dual_obj = next_obj;
                dual.trace.push_back(dual_obj);
                // accepted steps regrow without an upper cap so that flat
                // directions (unbounded multipliers) are reached quickly;
                // backtracking undoes any overshoot
                step = std::min(step * 2.0, 1e6);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no ascent direction at machine precision
        if (*std::max_element(mu.begin(), mu.end()) > kMuCap) break;
    }
    // final state at the accepted mu
    evaluate(mu, expectation);
    dual.mu = mu;

    for (int c = 0; c < C; ++c) {
        double viol = expectation[c] - bound[c];
        dual.max_violation = std::max(dual.max_violation, viol);
        if (viol > config.feasibility_slack)
            dual.violated.push_back(constraints[c].id);
    }
    if (!dual.violated.empty() &&
        *std::max_element(mu.begin(), mu.end()) > kMuCap * 0.99) {
        std::string msg = "infeasible constraint set; unbounded multipliers on:";
        for (const auto& id : dual.violated) msg += " " + id;
        throw InfeasibleConstraints(msg);
    }
    return {q, dual};
}

// ---------------------------------------------------------------------------
// free energy (negative ELBO)

// E_q[log q] - E_q[log p] with closed-form Dirichlet terms. The emission
// expectation treats each relation's foreground/background draw as an
// independent factor (the same factorization the conjugate updates use),
// which coincides with the exact model for K = 1.
inline double free_energy(const VariationalState& state,
                          const std::vector<CandidateSpace>& spaces,
                          const ModelLayout& layout,
                          const HyperParams& hyper) {
    double f = 0.0;
    for (const auto& rel : state.dirichlets) {
        for (int t : layout.indicator_templates) {
            f += dirichlet_kl_to_symmetric(rel.theta_i[t], hyper.theta0);
            f += dirichlet_kl_to_symmetric(rel.theta_bi[t], hyper.theta0);
        }
        for (int t : layout.argument_templates) {
            f += dirichlet_kl_to_symmetric(rel.theta_a[t], hyper.theta0);
            f += dirichlet_kl_to_symmetric(rel.theta_ba[t], hyper.theta0);
        }
        f += dirichlet_kl_to_symmetric(rel.lambda, hyper.lambda0);
    }

    auto ex = detail::LogExpectations::from(state.dirichlets, layout);
    for (std::size_t d = 0; d < spaces.size(); ++d) {
        const auto& space = spaces[d];
        for (int k = 0; k < hyper.K; ++k) {
            const auto& q = state.c_hat[d][k];
            const auto& rel = ex.elog[k];

            std::vector<double> p_ind(space.indicators.size(), 0.0);
            std::vector<double> p_arg(space.arguments.size(), 0.0);
            for (std::size_t c = 0; c < space.triples.size(); ++c) {
                p_ind[space.triples[c].ind] += q[c];
                p_arg[space.triples[c].arg] += q[c];
            }

            // entropy term and selection prior
            for (std::size_t c = 0; c < q.size(); ++c) {
                f += xlogx(q[c]);
                if (q[c] <= 0.0) continue;
                if (space.choice_is_null(static_cast<int>(c))) {
                    f -= q[c] * std::log(space.null_prior);
                } else {
                    const auto& tr = space.triples[c];
                    int seg = space.da_segment[tr.da];
                    f -= q[c] *
                         (rel.lambda[seg] -
                          std::log(double(space.segment_sizes[seg])) -
                          std::log(double(space.w_per_da[tr.da])) -
                          std::log(double(space.x_per_da[tr.da])) +
                          std::log(space.triple_scale));
                }
            }
            // emissions, foreground with probability p, background otherwise
            for (std::size_t u = 0; u < space.indicators.size(); ++u)
                for (const auto& [t, v] : space.indicator_feats[u])
                    f -= p_ind[u] * rel.theta_i[t][v] +
                         (1.0 - p_ind[u]) * rel.theta_bi[t][v];
            for (std::size_t u = 0; u < space.arguments.size(); ++u)
                for (const auto& [t, v] : space.argument_feats[u])
                    f -= p_arg[u] * rel.theta_a[t][v] +
                         (1.0 - p_arg[u]) * rel.theta_ba[t][v];
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// full runs with restarts

struct TraceRow {
    int restart = 0;
    int sweep = 0;
    double free_energy = 0.0;
    double max_violation = 0.0;
};

struct InferenceResult {
    VariationalState state;
    double free_energy = 0.0;
    int best_restart = -1;
    std::vector<TraceRow> trace;
    std::vector<double> restart_final_energies;
    double final_max_violation = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

struct RestartOutcome {
    VariationalState state;
    double free_energy = std::numeric_limits<double>::quiet_NaN();
    std::vector<TraceRow> trace;
    double max_violation = 0.0;
    bool aborted = false;
};

inline RestartOutcome run_one_restart(
    int restart, const std::vector<CandidateSpace>& spaces,
    const std::vector<ConstraintSpec>& constraints,
    const InferenceConfig& config, const HyperParams& hyper,
    const ModelLayout& layout) {
    Rng rng(config.seed + static_cast<std::uint64_t>(restart));
    RestartOutcome out;
    VariationalState state;
    state.c_hat.resize(spaces.size());
    for (std::size_t d = 0; d < spaces.size(); ++d) {
        state.c_hat[d].resize(hyper.K);
        for (int k = 0; k < hyper.K; ++k)
            state.c_hat[d][k] =
                rng.dirichlet_symmetric(spaces[d].num_choices(), 1.0);
    }

    double prev_f = std::numeric_limits<double>::infinity();
    for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
        update_q_theta(state, spaces, layout, hyper);
        auto q_prime = unconstrained_qz(state, spaces, layout, hyper);
        double max_violation = 0.0;
        if (constraints.empty()) {
            state.c_hat = std::move(q_prime);
        } else {
            auto [q, dual] = project(q_prime, constraints, config);
            state.c_hat = std::move(q);
            max_violation = dual.max_violation;
        }
        double f = free_energy(state, spaces, layout, hyper);
        out.trace.push_back({restart, sweep, f, max_violation});
        out.max_violation = max_violation;
        if (!std::isfinite(f)) {
            out.aborted = true;
            return out;
        }
        double rel = std::abs(f - prev_f) /
                     std::max(1.0, std::abs(prev_f));
        if (std::isfinite(prev_f) && rel < config.tol) {
            prev_f = f;
            break;
        }
        prev_f = f;
    }
    out.state = std::move(state);
    out.free_energy = prev_f;
    return out;
}

}  // namespace detail

inline InferenceResult run_inference(
    const std::vector<CandidateSpace>& spaces,
    const std::vector<ConstraintSpec>& constraints,
    const InferenceConfig& config, const HyperParams& hyper,
    const ModelLayout& layout) {
    if (spaces.empty()) throw std::invalid_argument("empty corpus");
    std::vector<detail::RestartOutcome> outcomes(config.restarts);

    int threads = std::max(1, config.threads);
    if (threads == 1) {
        for (int r = 0; r < config.restarts; ++r)
            outcomes[r] = detail::run_one_restart(r, spaces, constraints,
                                                  config, hyper, layout);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(config.restarts);
        std::atomic<int> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < config.restarts;
                     r = next.fetch_add(1)) {
                    try {
                        outcomes[r] = detail::run_one_restart(
                            r, spaces, constraints, config, hyper, layout);
                    } catch (...) {
                        errors[r] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        // surface the lowest-index failure deterministically
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    InferenceResult result;
    for (int r = 0; r < config.restarts; ++r) {
        auto& o = outcomes[r];
        result.trace.insert(result.trace.end(), o.trace.begin(),
                            o.trace.end());
        result.restart_final_energies.push_back(o.free_energy);
        if (o.aborted) {
            result.warnings.push_back("restart " + std::to_string(r) +
                                      ": non-finite free energy; aborted");
            continue;
        }
        if (result.best_restart < 0 || o.free_energy < result.free_energy) {
            result.best_restart = r;
            result.free_energy = o.free_energy;
            result.final_max_violation = o.max_violation;
        }
    }
    if (result.best_restart < 0)
        throw std::runtime_error("all restarts aborted with non-finite "
                                 "free energy");
    result.state = std::move(outcomes[result.best_restart].state);
    return result;
}

inline void save_trace(const std::vector<TraceRow>& trace,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write trace file: " + path);
    out.precision(12);
    for (const auto& row : trace)
        out << row.restart << '\t' << row.sweep << '\t' << row.free_energy
            << '\t' << row.max_violation << '\n';
}

}  // namespace relexsum
