#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "ruinkit/adjustment.hpp"
#include "ruinkit/errors.hpp"
#include "ruinkit/model.hpp"

namespace ruinkit {

namespace detail {

// Van der Corput radical inverse of i in the given base; the (base 2, base 3)
// pair over i = 1, 2, ... is the 2-d Halton low-discrepancy sequence.
inline double radical_inverse(std::uint64_t base, std::uint64_t i) {
    double inv_base = 1.0 / static_cast<double>(base);
    double factor = inv_base;
    double value = 0.0;
    while (i > 0) {
        value += static_cast<double>(i % base) * factor;
        i /= base;
        factor *= inv_base;
    }
    return value;
}

} // namespace detail

// Ruin probability at fixed intensities for Exponential(a) premiums and
// Exponential(b) claims:
//   ψ(u) = 1                     when γ/b − δ/a ≥ c (certain ruin, weak inequality),
//   ψ(u) = (1 − r/b)·e^{−ru}     otherwise, with r the adjustment coefficient.
// The c = 0 branch uses the linear-balance coefficient r = (bδ − aγ)/(δ + γ);
// its textbook prefactor (1 + a/b)/(1 + δ/γ) equals 1 − r/b identically, so a
// single expression covers both branches.
inline double ruin_prob_conditional(double u, double c, double a, double b, double gamma,
                                    double delta) {
    if (!(u >= 0.0)) throw std::invalid_argument("ruin_prob_conditional: u must be nonnegative");
    if (!(c >= 0.0)) throw std::invalid_argument("ruin_prob_conditional: c must be nonnegative");
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("ruin_prob_conditional: rates must be positive");
    if (!(gamma > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("ruin_prob_conditional: intensities must be positive");
    if (gamma / b - delta / a >= c) return 1.0;
    const double r = adjustment_exponential(c, a, b, gamma, delta).r;
    return (1.0 - r / b) * std::exp(-r * u);
}

// Ruin probability of the mixed model: the expectation of the conditional
// formula over the mixing law of (Γ, Δ). Exact for degenerate and discrete
// mixing; independent-gamma mixing is integrated by quasi-Monte Carlo
// (Halton points mapped through the gamma quantile functions), which also
// picks up the certain-ruin mass P(Γ/b − Δ/a ≥ c) since the conditional
// formula returns 1 there.
inline double ruin_prob_mixed(const ModelSpec& model, double u, std::size_t mix_samples = 65536) {
    if (model.premium_law.kind() != JumpKind::Exponential ||
        model.claim_law.kind() != JumpKind::Exponential)
        throw UnsupportedJumpLaw("ruin_prob_mixed: closed form requires exponential size laws");
    if (mix_samples < 1)
        throw std::invalid_argument("ruin_prob_mixed: mix_samples must be at least 1");
    const double a = model.premium_law.exponential_rate();
    const double b = model.claim_law.exponential_rate();

    switch (model.mixing.kind()) {
        case MixingKind::Degenerate:
        case MixingKind::Discrete: {
            double sum = 0.0;
            for (const auto& atom : model.mixing.atoms())
                sum += atom.prob * ruin_prob_conditional(u, model.c, a, b, atom.gamma, atom.delta);
            return sum;
        }
        case MixingKind::IndependentGamma: {
            double sum = 0.0;  // fixed-order accumulation: deterministic by construction
            for (std::uint64_t i = 1; i <= mix_samples; ++i) {
                const auto [g, d] = model.mixing.quantile(detail::radical_inverse(2, i),
                                                          detail::radical_inverse(3, i));
                sum += ruin_prob_conditional(u, model.c, a, b, g, d);
            }
            return sum / static_cast<double>(mix_samples);
        }
    }
    throw std::logic_error("ruin_prob_mixed: unreachable");
}

} // namespace ruinkit
