#pragma once

// Deterministic random generation on top of std::mt19937_64. The standard
// distributions are implementation-defined, so the few draws needed here
// (uniform, gamma, Dirichlet, categorical) are spelled out explicitly to
// keep outputs byte-stable across platforms.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace relexsum {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return std::ldexp(static_cast<double>(engine_() >> 11), -53);
    }

    // uniform in (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }

    std::size_t uniform_index(std::size_t n) {
        // rejection sampling to avoid modulo bias
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = engine_(); } while (x >= limit);
        return static_cast<std::size_t>(x % n);
    }

    double normal() {
        // Box-Muller; one value per call, cache the pair
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Marsaglia-Tsang for alpha >= 1, boost trick for alpha < 1.
    double gamma(double alpha) {
        if (alpha < 1.0) {
            double u = uniform_pos();
            return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
        }
        double d = alpha - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v;
        }
    }

    std::vector<double> dirichlet(const std::vector<double>& alpha) {
        std::vector<double> out(alpha.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            out[i] = gamma(alpha[i]);
            sum += out[i];
        }
        for (double& v : out) v /= sum;
        return out;
    }

    std::vector<double> dirichlet_symmetric(std::size_t n, double alpha) {
        return dirichlet(std::vector<double>(n, alpha));
    }

    std::size_t categorical(const std::vector<double>& probs) {
        double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.size() - 1;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace relexsum
