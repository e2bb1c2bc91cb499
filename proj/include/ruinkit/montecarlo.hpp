#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ruinkit/adjustment.hpp"
#include "ruinkit/kernels.hpp"
#include "ruinkit/model.hpp"
#include "ruinkit/rng.hpp"

namespace ruinkit {

// Snapshot of one simulated surplus path at its stopping time.
struct PathState {
    double surplus;               // K at the stopping time
    double t;                     // stopping time (ruin, horizon, or early exit)
    std::uint64_t premium_count;  // M_t
    std::uint64_t claim_count;    // L_t
    bool ruined;
    std::optional<double> ruin_time;
};

struct RuinEstimate {
    double estimate;
    double ci_low;
    double ci_high;
    std::size_t n_paths;
    std::size_t n_ruined;
    double horizon;
    std::uint64_t seed;
};

// 95% Wilson score interval for k successes in n trials; keeps sensible
// coverage even when the estimate sits at 0 or 1.
inline std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
    if (n == 0) throw std::invalid_argument("wilson_interval: n must be positive");
    const double z = 1.959963984540054;  // 97.5% standard normal quantile
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // At k = 0 (k = n) the lower (upper) endpoint is exactly the boundary;
    // pin it so rounding noise cannot push it inside.
    const double lo = k == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = k == n ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

// Simulate one surplus path at fixed intensities via the merged event
// process: events arrive at rate λ = γ + δ and each is a premium with
// probability δ/λ, else a claim. Between events the surplus drifts up at
// rate c, so ruin can only occur immediately after a claim. Stops at ruin,
// at the horizon, or once the surplus clears safe_level (the surviving-path
// early exit; pass +inf to disable).
inline PathState simulate_path(const ModelSpec& model, double gamma, double delta, double horizon,
                               Xoshiro256& rng,
                               double safe_level = std::numeric_limits<double>::infinity()) {
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_path: horizon must be positive");
    if (!(gamma >= 0.0) || !(delta >= 0.0) || !(gamma + delta > 0.0))
        throw std::invalid_argument(
            "simulate_path: intensities must be nonnegative with a positive sum");
    const double lambda = gamma + delta;
    const double premium_prob = delta / lambda;
    PathState state{model.u, 0.0, 0, 0, false, std::nullopt};
    while (true) {
        const double wait = rng.exponential(lambda);
        if (state.t + wait >= horizon) {
            state.surplus += model.c * (horizon - state.t);
            state.t = horizon;
            break;
        }
        state.t += wait;
        state.surplus += model.c * wait;
        if (rng.uniform01() < premium_prob) {
            state.surplus += model.premium_law.sample(rng);
            ++state.premium_count;
        } else {
            state.surplus -= model.claim_law.sample(rng);
            ++state.claim_count;
            if (state.surplus < 0.0) {
                state.ruined = true;
                state.ruin_time = state.t;
                break;
            }
        }
        if (state.surplus > safe_level) break;
    }
    return state;
}

namespace detail {

// Early-exit level u + 30/r for a fixed intensity pair, or +inf when no
// adjustment coefficient exists there: past that level the residual ruin
// chance is below e^{−30}, negligible against any confidence band.
inline double safe_level_for(const ModelSpec& model, double gamma, double delta) {
    try {
        double r;
        if (model.premium_law.kind() == JumpKind::Exponential &&
            model.claim_law.kind() == JumpKind::Exponential) {
            r = adjustment_exponential(model.c, model.premium_law.exponential_rate(),
                                       model.claim_law.exponential_rate(), gamma, delta)
                    .r;
        } else {
            r = adjustment_general(conditional_model(model, gamma, delta)).r;
        }
        return model.u + 30.0 / r;
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

} // namespace detail

// Estimate the ruin probability by crude Monte Carlo: each path draws its
// own (γ, δ) from the mixing law, then simulates to ruin or the horizon.
// Path i consumes only the substream keyed by (seed, i), so the tally — and
// hence the estimate — is identical however paths are partitioned across
// workers.
inline RuinEstimate estimate_ruin(const ModelSpec& model, std::optional<double> u_override,
                                  double horizon, std::size_t n_paths, std::uint64_t seed) {
    if (n_paths < 100) throw std::invalid_argument("estimate_ruin: needs at least 100 paths");
    if (!(horizon > 0.0)) throw std::invalid_argument("estimate_ruin: horizon must be positive");
    ModelSpec m = model;
    if (u_override) {
        if (!(*u_override >= 0.0))
            throw std::invalid_argument("estimate_ruin: initial capital must be nonnegative");
        m.u = *u_override;
    }

    // Resolve early-exit levels once per atom for atom-based mixing.
    struct AtomLevel {
        double gamma, delta, level;
    };
    std::vector<AtomLevel> atom_levels;
    if (m.mixing.kind() != MixingKind::IndependentGamma)
        for (const auto& atom : m.mixing.atoms())
            atom_levels.push_back(
                {atom.gamma, atom.delta, detail::safe_level_for(m, atom.gamma, atom.delta)});
    const bool exponential_laws = m.premium_law.kind() == JumpKind::Exponential &&
                                  m.claim_law.kind() == JumpKind::Exponential;

    std::size_t ruined = 0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        Xoshiro256 rng(seed, i);
        const auto [gamma, delta] = m.mixing.sample(rng);
        double safe_level = std::numeric_limits<double>::infinity();
        if (!atom_levels.empty()) {
            for (const auto& al : atom_levels)
                if (al.gamma == gamma && al.delta == delta) {
                    safe_level = al.level;
                    break;
                }
        } else if (exponential_laws) {
            // Continuous mixing: the closed-form coefficient is cheap per path.
            const double a = m.premium_law.exponential_rate();
            const double b = m.claim_law.exponential_rate();
            if (m.c + delta / a > gamma / b)
                safe_level = m.u + 30.0 / adjustment_exponential(m.c, a, b, gamma, delta).r;
        }
        if (simulate_path(m, gamma, delta, horizon, rng, safe_level).ruined) ++ruined;
    }

    const auto [lo, hi] = wilson_interval(ruined, n_paths);
    return RuinEstimate{static_cast<double>(ruined) / static_cast<double>(n_paths),
                        lo,
                        hi,
                        n_paths,
                        ruined,
                        horizon,
                        seed};
}

// Sample moments of the terminal surplus K_t with their standard errors.
struct TerminalMoments {
    double sample_mean;
    double sample_variance;  // unbiased (n−1 divisor)
    double se_mean;
    double se_variance;
    std::size_t n_paths;
};

// Simulate K_t directly (no ruin logic): per path draw (γ, δ), then the two
// Poisson counts over [0, t], then the jump sizes. Same substream contract
// as estimate_ruin.
inline TerminalMoments simulate_terminal_value(const ModelSpec& model, double t,
                                               std::size_t n_paths, std::uint64_t seed) {
    if (!(t > 0.0)) throw std::invalid_argument("simulate_terminal_value: t must be positive");
    if (n_paths < 1000)
        throw std::invalid_argument("simulate_terminal_value: needs at least 1000 paths");

    std::vector<double> values(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        Xoshiro256 rng(seed, i);
        const auto [gamma, delta] = model.mixing.sample(rng);
        std::poisson_distribution<long> premium_count(delta * t);
        std::poisson_distribution<long> claim_count(gamma * t);
        const long m_count = premium_count(rng);
        const long l_count = claim_count(rng);
        double v = model.u + model.c * t;
        for (long k = 0; k < m_count; ++k) v += model.premium_law.sample(rng);
        for (long k = 0; k < l_count; ++k) v -= model.claim_law.sample(rng);
        values[i] = v;
    }

    const double nn = static_cast<double>(n_paths);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= nn;
    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= nn;
    m4 /= nn;
    const double variance = m2 * nn / (nn - 1.0);
    const double se_mean = std::sqrt(variance / nn);
    // Var(s²) ≈ (μ₄ − σ⁴·(n−3)/(n−1))/n with plug-in central moments.
    const double se_var = std::sqrt(std::max(0.0, (m4 - m2 * m2 * (nn - 3.0) / (nn - 1.0)) / nn));
    return TerminalMoments{mean, variance, se_mean, se_var, n_paths};
}

} // namespace ruinkit
