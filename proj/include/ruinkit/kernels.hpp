#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "ruinkit/errors.hpp"
#include "ruinkit/model.hpp"

namespace ruinkit {

// Classical risk model obtained by fixing the intensities (γ, δ): events
// arrive at the merged rate λ = γ + δ, and each event is a claim with
// probability γ/λ (positive jump of the aggregate-loss walk) or a premium
// with probability δ/λ (negative jump). Both size laws live on (0, ∞).
struct ConditionalModel {
    double u;
    double c;
    double gamma;   // claim arrival intensity
    double delta;   // premium arrival intensity
    double lambda;  // merged intensity, = gamma + delta
    JumpLaw premium_law;
    JumpLaw claim_law;

    double claim_weight() const { return gamma / lambda; }
    double premium_weight() const { return delta / lambda; }
};

inline ConditionalModel conditional_model(const ModelSpec& model, double gamma, double delta) {
    if (!(gamma > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("conditional_model: intensities must be positive");
    return ConditionalModel{model.u,  model.c,           gamma, delta, gamma + delta,
                            model.premium_law, model.claim_law};
}

// Signed measure dG of the ruin renewal equation c·ν(u) = ∫ ν(u−z) dG(z):
// density γ·F̄_Z(z) at z > 0 (claims) and δ·F̄_Y(z) attached to −z with a
// negative sign (premiums). Total signed mass γ·E[Z] − δ·E[Y].
struct SignedKernel {
    double gamma;  // claim intensity, > 0
    double delta;  // premium intensity, ≥ 0 (zero gives the classical one-sided kernel)
    JumpLaw claim_law;
    JumpLaw premium_law;

    double positive_density(double z) const { return gamma * claim_law.tail(z); }
    double negative_density(double z) const { return delta * premium_law.tail(z); }
    double positive_mass() const { return gamma * claim_law.mean(); }
    double negative_mass() const { return delta * premium_law.mean(); }

    // γ·∫_u^∞ F̄_Z(z) dz — the inflow the renewal operator picks up from the
    // region where the post-jump surplus is negative (where ν ≡ 1).
    double positive_mass_beyond(double u) const {
        return gamma * (claim_law.mean() - claim_law.integrated_tail(u));
    }
};

inline SignedKernel build_signed_kernel(const JumpLaw& claim_law, double gamma,
                                        const JumpLaw& premium_law, double delta) {
    if (!(gamma > 0.0))
        throw std::invalid_argument("build_signed_kernel: claim intensity must be positive");
    if (!(delta >= 0.0))
        throw std::invalid_argument("build_signed_kernel: premium intensity must be nonnegative");
    return SignedKernel{gamma, delta, claim_law, premium_law};
}

inline SignedKernel build_signed_kernel(const ConditionalModel& cm) {
    return build_signed_kernel(cm.claim_law, cm.gamma, cm.premium_law, cm.delta);
}

// ∫ e^{rz} dG(z) − c: the exponential-moment balance whose positive root is
// the adjustment coefficient. Evaluated through the identity
// ∫₀^∞ e^{sz} F̄(z) dz = (M(s) − 1)/s, so no quadrature is involved; for
// exponential laws this reduces to γ/(b−r) − δ/(a+r) − c.
inline double mgf_balance(const ConditionalModel& cm, double r) {
    if (!cm.claim_law.has_mgf() || !cm.premium_law.has_mgf())
        throw NoMGF("mgf_balance: both size laws must possess exponential moments");
    if (r == 0.0)
        return cm.gamma * cm.claim_law.mean() - cm.delta * cm.premium_law.mean() - cm.c;
    if (r >= cm.claim_law.mgf_abscissa() || -r >= cm.premium_law.mgf_abscissa())
        throw OutsideConvergenceStrip("mgf_balance: r outside the convergence strip");
    const double claim_side = (cm.claim_law.mgf(r) - 1.0) / r;      // ∫ e^{rz} F̄_Z
    const double premium_side = (1.0 - cm.premium_law.mgf(-r)) / r; // ∫ e^{−rz} F̄_Y
    return cm.gamma * claim_side - cm.delta * premium_side - cm.c;
}

// Exponential tilt of the signed kernel by the adjustment coefficient r:
// dH(z) = e^{rz} dG(z)/c. At a genuine adjustment coefficient the signed
// total mass ∫ dH equals 1, making ξ(v) = e^{rv}ν(v) satisfy ξ = ξ⋆H on
// [0, ∞).
struct TiltedKernel {
    double r;  // tilt exponent (adjustment coefficient)
    double c;
    double gamma;
    double delta;
    JumpLaw claim_law;
    JumpLaw premium_law;
    double signed_total_mass;  // ∫ dH; 1 (up to roundoff) when r solves the balance

    double positive_density(double z) const {
        return std::exp(r * z) * gamma * claim_law.tail(z) / c;
    }
    double negative_density(double z) const {
        return std::exp(-r * z) * delta * premium_law.tail(z) / c;
    }
    // The tilted unknown: ξ(v) = e^{rv}·ν(v).
    double xi_of(double v, double nu_at_v) const { return std::exp(r * v) * nu_at_v; }
};

inline TiltedKernel build_tilted_kernel(const ConditionalModel& cm, double r) {
    if (!(cm.c > 0.0))
        throw NotApplicable("build_tilted_kernel: the tilt divides by c, so c must be positive");
    if (!(r > 0.0))
        throw std::invalid_argument("build_tilted_kernel: tilt exponent must be positive");
    // ∫ dH = (∫ e^{rz} dG)/c = 1 + mgf_balance/c.
    const double mass = 1.0 + mgf_balance(cm, r) / cm.c;
    return TiltedKernel{r, cm.c, cm.gamma, cm.delta, cm.claim_law, cm.premium_law, mass};
}

} // namespace ruinkit
