#pragma once

#include <cmath>
#include <stdexcept>

#include "ruinkit/errors.hpp"
#include "ruinkit/kernels.hpp"

namespace ruinkit {

enum class AdjustmentMethod { ClosedForm, Bisection };

// Positive root r of the exponential-moment balance c = ∫ e^{rz} dG(z),
// together with how it was obtained and the residual |balance(r)|.
struct AdjustmentResult {
    double r;
    AdjustmentMethod method;
    double residual;
};

// Adjustment coefficient for Exponential(a) premiums and Exponential(b)
// claims. For c > 0 the balance c + δ/(a+r) = γ/(b−r) is a quadratic in r
// whose root in (0, b) has the closed form below; for c = 0 it is linear.
// delta = 0 is accepted and recovers the classical coefficient b − γ/c.
inline AdjustmentResult adjustment_exponential(double c, double a, double b, double gamma,
                                               double delta) {
    if (!(c >= 0.0)) throw std::invalid_argument("adjustment_exponential: c must be nonnegative");
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("adjustment_exponential: rates must be positive");
    if (!(gamma > 0.0))
        throw std::invalid_argument("adjustment_exponential: claim intensity must be positive");
    if (!(delta >= 0.0))
        throw std::invalid_argument("adjustment_exponential: premium intensity must be nonnegative");
    // Weak inequality: on the boundary c + δ·E[Y] = γ·E[Z] ruin is already certain.
    if (c + delta / a <= gamma / b)
        throw NetProfitViolated("adjustment_exponential: c + delta/a <= gamma/b, ruin is certain");

    double r;
    if (c > 0.0) {
        const double s = (a + b) * c;
        const double disc = (s + delta) * (s + delta) - 2.0 * (s - delta) * gamma + gamma * gamma;
        r = (c * (b - a) - delta - gamma + std::sqrt(disc)) / (2.0 * c);
    } else {
        r = (b * delta - a * gamma) / (delta + gamma);
    }
    const double residual = std::abs(gamma / (b - r) - delta / (a + r) - c);
    return AdjustmentResult{r, AdjustmentMethod::ClosedForm, residual};
}

// Residual |∫ e^{rz} dG(z) − c| of a candidate adjustment coefficient;
// near zero exactly when r solves the balance for this conditional model.
inline double check_adjustment(const ConditionalModel& cm, double r) {
    return std::abs(mgf_balance(cm, r));
}

// Adjustment coefficient for general light-tailed size laws: bisection on
// the balance over (0, r_max), where r_max is the claim law's MGF abscissa
// (the balance blows up to +∞ there). For an unbounded abscissa (empirical
// laws) the upper bracket is grown by doubling until the balance changes
// sign.
inline AdjustmentResult adjustment_general(const ConditionalModel& cm) {
    if (!cm.claim_law.has_mgf() || !cm.premium_law.has_mgf())
        throw NoMGF("adjustment_general: both size laws must possess exponential moments");
    const double margin = cm.c + cm.delta * cm.premium_law.mean() - cm.gamma * cm.claim_law.mean();
    if (margin <= 0.0)
        throw NetProfitViolated("adjustment_general: net profit condition fails, ruin is certain");

    const double abscissa = cm.claim_law.mgf_abscissa();
    double lo, hi;
    if (std::isfinite(abscissa)) {
        const double eps = 1e-12 * abscissa;
        lo = eps;
        hi = abscissa - eps;
        if (!(mgf_balance(cm, hi) > 0.0))
            throw NoAdjustmentCoefficient("adjustment_general: no sign change inside the strip");
    } else {
        lo = 0.0;
        hi = 1.0;
        while (mgf_balance(cm, hi) <= 0.0) {
            hi *= 2.0;
            if (hi > 1e18)
                throw NoAdjustmentCoefficient("adjustment_general: balance never turns positive");
        }
    }
    // balance(0) = −margin < 0, so the root is bracketed in [lo, hi].
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mgf_balance(cm, mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double r = 0.5 * (lo + hi);
    return AdjustmentResult{r, AdjustmentMethod::Bisection, check_adjustment(cm, r)};
}

// Lundberg inequality: ψ(u) ≤ e^{−ru}.
inline double lundberg_bound(double r, double u) {
    if (!(r > 0.0)) throw std::invalid_argument("lundberg_bound: r must be positive");
    if (!(u >= 0.0)) throw std::invalid_argument("lundberg_bound: u must be nonnegative");
    return std::exp(-r * u);
}

} // namespace ruinkit
