#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "ruinkit/errors.hpp"
#include "ruinkit/rng.hpp"

namespace ruinkit {

enum class JumpKind { Exponential, Gamma, Pareto, Empirical };

// Law of a positive jump size (premium or claim amount).
// Exposes exactly what the kernels, solvers and samplers consume:
// moments, the tail F̄(x) = P(J > x), the integrated tail ∫₀ˣ F̄,
// the moment generating function where it exists, and sampling.
class JumpLaw {
public:
    static JumpLaw exponential(double rate) {
        if (!(rate > 0.0)) throw std::invalid_argument("JumpLaw::exponential: rate must be positive");
        return JumpLaw(Exponential{rate});
    }

    static JumpLaw gamma(double shape, double rate) {
        if (!(shape > 0.0)) throw std::invalid_argument("JumpLaw::gamma: shape must be positive");
        if (!(rate > 0.0)) throw std::invalid_argument("JumpLaw::gamma: rate must be positive");
        return JumpLaw(Gamma{shape, rate});
    }

    static JumpLaw pareto(double scale, double tail_index) {
        if (!(scale > 0.0)) throw std::invalid_argument("JumpLaw::pareto: scale must be positive");
        if (!(tail_index > 1.0))
            throw std::invalid_argument("JumpLaw::pareto: tail_index must exceed 1 (finite mean required)");
        return JumpLaw(Pareto{scale, tail_index});
    }

    static JumpLaw empirical(std::vector<double> sample) {
        if (sample.empty()) throw std::invalid_argument("JumpLaw::empirical: sample must be non-empty");
        for (double x : sample)
            if (!(x > 0.0)) throw std::invalid_argument("JumpLaw::empirical: sample values must be positive");
        std::sort(sample.begin(), sample.end());
        Empirical e;
        e.xs = std::move(sample);
        const auto n = e.xs.size();
        e.prefix.resize(n + 1, 0.0);
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += e.xs[i];
            sum_sq += e.xs[i] * e.xs[i];
            e.prefix[i + 1] = sum;
        }
        e.mean = sum / static_cast<double>(n);
        e.second_moment = sum_sq / static_cast<double>(n);
        return JumpLaw(std::move(e));
    }

    JumpKind kind() const {
        return static_cast<JumpKind>(law_.index());
    }

    double mean() const {
        return std::visit([](const auto& l) { return l.mean_impl(); }, law_);
    }

    // E[J²]; throws InfiniteSecondMoment when the law has none (Pareto, tail_index ≤ 2).
    double second_moment() const {
        return std::visit([](const auto& l) { return l.second_moment_impl(); }, law_);
    }

    // F̄(x) = P(J > x); equals 1 for x ≤ 0, nonincreasing, right-continuous.
    double tail(double x) const {
        if (x <= 0.0) return 1.0;
        return std::visit([x](const auto& l) { return l.tail_impl(x); }, law_);
    }

    // ∫₀ˣ F̄(t) dt = E[min(J, x)] for x ≥ 0; tends to mean() as x → ∞.
    double integrated_tail(double x) const {
        if (x <= 0.0) return 0.0;
        return std::visit([x](const auto& l) { return l.integrated_tail_impl(x); }, law_);
    }

    // Whether E[e^{sJ}] is finite for some s > 0.
    bool has_mgf() const {
        return kind() != JumpKind::Pareto;
    }

    // Supremum of {s : E[e^{sJ}] < ∞}; +∞ for empirical laws, throws NoMGF for Pareto.
    double mgf_abscissa() const {
        return std::visit([](const auto& l) { return l.mgf_abscissa_impl(); }, law_);
    }

    // E[e^{sJ}] for s below the abscissa; throws OutsideConvergenceStrip past it.
    double mgf(double s) const {
        return std::visit([s](const auto& l) { return l.mgf_impl(s); }, law_);
    }

    double sample(Xoshiro256& rng) const {
        return std::visit([&rng](const auto& l) { return l.sample_impl(rng); }, law_);
    }

    // Rate parameter when the law is exponential; the closed-form ruin formulas need it.
    double exponential_rate() const {
        if (const auto* e = std::get_if<Exponential>(&law_)) return e->rate;
        throw UnsupportedJumpLaw("exponential_rate: jump law is not exponential");
    }

private:
    struct Exponential {
        double rate;
        double mean_impl() const { return 1.0 / rate; }
        double second_moment_impl() const { return 2.0 / (rate * rate); }
        double tail_impl(double x) const { return std::exp(-rate * x); }
        double integrated_tail_impl(double x) const { return -std::expm1(-rate * x) / rate; }
        double mgf_abscissa_impl() const { return rate; }
        double mgf_impl(double s) const {
            if (s >= rate) throw OutsideConvergenceStrip("exponential mgf requires s < rate");
            return rate / (rate - s);
        }
        double sample_impl(Xoshiro256& rng) const { return rng.exponential(rate); }
    };

    struct Gamma {
        double shape;
        double rate;
        double mean_impl() const { return shape / rate; }
        double second_moment_impl() const { return shape * (shape + 1.0) / (rate * rate); }
        double tail_impl(double x) const { return boost::math::gamma_q(shape, rate * x); }
        double integrated_tail_impl(double x) const {
            // E[min(J,x)] = ∫₀ˣ t f(t) dt + x F̄(x); the first term telescopes to
            // (shape/rate)·P(shape+1, rate·x) via the gamma-density recurrence.
            return (shape / rate) * boost::math::gamma_p(shape + 1.0, rate * x) +
                   x * boost::math::gamma_q(shape, rate * x);
        }
        double mgf_abscissa_impl() const { return rate; }
        double mgf_impl(double s) const {
            if (s >= rate) throw OutsideConvergenceStrip("gamma mgf requires s < rate");
            return std::pow(rate / (rate - s), shape);
        }
        double sample_impl(Xoshiro256& rng) const {
            std::gamma_distribution<double> dist(shape, 1.0 / rate);
            return dist(rng);
        }
    };

    struct Pareto {
        double scale;
        double tail_index;
        double mean_impl() const { return tail_index * scale / (tail_index - 1.0); }
        double second_moment_impl() const {
            if (tail_index <= 2.0)
                throw InfiniteSecondMoment("pareto second moment requires tail_index > 2");
            return tail_index * scale * scale / (tail_index - 2.0);
        }
        double tail_impl(double x) const {
            return x < scale ? 1.0 : std::pow(scale / x, tail_index);
        }
        double integrated_tail_impl(double x) const {
            if (x <= scale) return x;
            return scale + scale / (tail_index - 1.0) *
                               (1.0 - std::pow(scale / x, tail_index - 1.0));
        }
        [[noreturn]] double mgf_abscissa_impl() const {
            throw NoMGF("pareto law has no exponential moments");
        }
        [[noreturn]] double mgf_impl(double) const {
            throw NoMGF("pareto law has no exponential moments");
        }
        double sample_impl(Xoshiro256& rng) const {
            // Inverse transform: F̄⁻¹(v) = scale·v^{-1/α} with v ∈ (0,1].
            return scale * std::pow(1.0 - rng.uniform01(), -1.0 / tail_index);
        }
    };

    struct Empirical {
        std::vector<double> xs;      // sorted ascending
        std::vector<double> prefix;  // prefix[k] = sum of the first k values
        double mean;
        double second_moment;
        double mean_impl() const { return mean; }
        double second_moment_impl() const { return second_moment; }
        double tail_impl(double x) const {
            const auto above = xs.end() - std::upper_bound(xs.begin(), xs.end(), x);
            return static_cast<double>(above) / static_cast<double>(xs.size());
        }
        double integrated_tail_impl(double x) const {
            // E[min(J,x)] over the sample: values ≤ x contribute themselves, the rest x.
            const auto k = static_cast<std::size_t>(
                std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
            return (prefix[k] + static_cast<double>(xs.size() - k) * x) /
                   static_cast<double>(xs.size());
        }
        double mgf_abscissa_impl() const { return std::numeric_limits<double>::infinity(); }
        double mgf_impl(double s) const {
            double sum = 0.0;
            for (double x : xs) sum += std::exp(s * x);
            return sum / static_cast<double>(xs.size());
        }
        double sample_impl(Xoshiro256& rng) const {
            auto idx = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(xs.size()));
            return xs[std::min(idx, xs.size() - 1)];
        }
    };

    using Variant = std::variant<Exponential, Gamma, Pareto, Empirical>;

    explicit JumpLaw(Variant law) : law_(std::move(law)) {}

    Variant law_;
};

enum class MixingKind { Degenerate, Discrete, IndependentGamma };

// One support point of a discrete mixing law: claim intensity gamma,
// premium intensity delta, and its probability.
struct MixingAtom {
    double gamma;
    double delta;
    double prob;
};

// Joint law of the random intensities (Γ, Δ): claims arrive at rate Γ,
// premiums at rate Δ, drawn once per realized world.
class MixingLaw {
public:
    static MixingLaw degenerate(double gamma0, double delta0) {
        if (!(gamma0 > 0.0) || !(delta0 > 0.0))
            throw std::invalid_argument("MixingLaw::degenerate: intensities must be positive");
        MixingLaw m;
        m.kind_ = MixingKind::Degenerate;
        m.atoms_ = {MixingAtom{gamma0, delta0, 1.0}};
        return m;
    }

    static MixingLaw discrete(std::vector<MixingAtom> atoms) {
        if (atoms.empty()) throw std::invalid_argument("MixingLaw::discrete: needs at least one atom");
        double total = 0.0;
        for (const auto& a : atoms) {
            if (!(a.gamma > 0.0) || !(a.delta > 0.0))
                throw std::invalid_argument("MixingLaw::discrete: intensities must be positive");
            if (!(a.prob > 0.0) || a.prob > 1.0)
                throw std::invalid_argument("MixingLaw::discrete: atom probabilities must lie in (0,1]");
            total += a.prob;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("MixingLaw::discrete: atom probabilities must sum to 1");
        MixingLaw m;
        m.kind_ = MixingKind::Discrete;
        m.atoms_ = std::move(atoms);
        return m;
    }

    static MixingLaw independent_gamma(double gamma_shape, double gamma_rate,
                                       double delta_shape, double delta_rate) {
        if (!(gamma_shape > 0.0) || !(gamma_rate > 0.0) || !(delta_shape > 0.0) || !(delta_rate > 0.0))
            throw std::invalid_argument("MixingLaw::independent_gamma: parameters must be positive");
        MixingLaw m;
        m.kind_ = MixingKind::IndependentGamma;
        m.gamma_shape_ = gamma_shape;
        m.gamma_rate_ = gamma_rate;
        m.delta_shape_ = delta_shape;
        m.delta_rate_ = delta_rate;
        return m;
    }

    MixingKind kind() const { return kind_; }

    double mean_gamma() const {
        if (kind_ == MixingKind::IndependentGamma) return gamma_shape_ / gamma_rate_;
        return weighted([](const MixingAtom& a) { return a.gamma; });
    }

    double mean_delta() const {
        if (kind_ == MixingKind::IndependentGamma) return delta_shape_ / delta_rate_;
        return weighted([](const MixingAtom& a) { return a.delta; });
    }

    double var_gamma() const {
        if (kind_ == MixingKind::IndependentGamma) return gamma_shape_ / (gamma_rate_ * gamma_rate_);
        const double m = mean_gamma();
        return weighted([](const MixingAtom& a) { return a.gamma * a.gamma; }) - m * m;
    }

    double var_delta() const {
        if (kind_ == MixingKind::IndependentGamma) return delta_shape_ / (delta_rate_ * delta_rate_);
        const double m = mean_delta();
        return weighted([](const MixingAtom& a) { return a.delta * a.delta; }) - m * m;
    }

    // Cov(Δ, Γ); zero unless the law is discrete with genuinely joint atoms.
    double cov() const {
        if (kind_ != MixingKind::Discrete) return 0.0;
        return weighted([](const MixingAtom& a) { return a.gamma * a.delta; }) -
               mean_gamma() * mean_delta();
    }

    const std::vector<MixingAtom>& atoms() const {
        if (kind_ == MixingKind::IndependentGamma)
            throw std::logic_error("MixingLaw::atoms: continuous mixing law has no atoms");
        return atoms_;
    }

    // Map a pair of uniforms through the two gamma quantile functions.
    // Only meaningful for the continuous (independent gamma) mixing law;
    // this is the hook the quasi-Monte Carlo mixture integration uses.
    std::pair<double, double> quantile(double p_gamma, double p_delta) const {
        if (kind_ != MixingKind::IndependentGamma)
            throw std::logic_error("MixingLaw::quantile: only defined for independent-gamma mixing");
        return {boost::math::gamma_p_inv(gamma_shape_, p_gamma) / gamma_rate_,
                boost::math::gamma_p_inv(delta_shape_, p_delta) / delta_rate_};
    }

    // Draw one realization of (Γ, Δ).
    std::pair<double, double> sample(Xoshiro256& rng) const {
        switch (kind_) {
            case MixingKind::Degenerate:
                return {atoms_[0].gamma, atoms_[0].delta};
            case MixingKind::Discrete: {
                double v = rng.uniform01();
                for (const auto& a : atoms_) {
                    if (v < a.prob) return {a.gamma, a.delta};
                    v -= a.prob;
                }
                return {atoms_.back().gamma, atoms_.back().delta};
            }
            case MixingKind::IndependentGamma: {
                std::gamma_distribution<double> dg(gamma_shape_, 1.0 / gamma_rate_);
                std::gamma_distribution<double> dd(delta_shape_, 1.0 / delta_rate_);
                const double g = dg(rng);
                const double d = dd(rng);
                return {g, d};
            }
        }
        throw std::logic_error("MixingLaw::sample: unreachable");
    }

private:
    MixingLaw() = default;

    template <typename F>
    double weighted(F&& f) const {
        double sum = 0.0;
        for (const auto& a : atoms_) sum += a.prob * f(a);
        return sum;
    }

    MixingKind kind_ = MixingKind::Degenerate;
    std::vector<MixingAtom> atoms_;       // Degenerate (one atom, prob 1) and Discrete
    double gamma_shape_ = 0.0, gamma_rate_ = 0.0;  // IndependentGamma only
    double delta_shape_ = 0.0, delta_rate_ = 0.0;
};

// Full mixed surplus model: K_t = u + c·t + Σ_{i≤M_t} Y_i − Σ_{i≤L_t} Z_i,
// where premiums Y arrive by a Poisson process of random rate Δ and
// claims Z by one of random rate Γ, conditionally independent given (Γ, Δ).
struct ModelSpec {
    double u;             // initial capital, ≥ 0
    double c;             // premium drift rate, ≥ 0
    JumpLaw premium_law;  // law of a single premium size Y
    JumpLaw claim_law;    // law of a single claim size Z
    MixingLaw mixing;     // joint law of (Γ, Δ)

    ModelSpec(double u_, double c_, JumpLaw premium, JumpLaw claim, MixingLaw mix)
        : u(u_), c(c_), premium_law(std::move(premium)), claim_law(std::move(claim)),
          mixing(std::move(mix)) {
        if (!(u >= 0.0)) throw std::invalid_argument("ModelSpec: initial capital must be nonnegative");
        if (!(c >= 0.0)) throw std::invalid_argument("ModelSpec: drift rate must be nonnegative");
    }
};

// E[K_t] = u + t·(c + E[Y]E[Δ] − E[Z]E[Γ])  (Wald).
inline double mean_surplus(const ModelSpec& model, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("mean_surplus: t must be nonnegative");
    return model.u + t * (model.c + model.premium_law.mean() * model.mixing.mean_delta() -
                          model.claim_law.mean() * model.mixing.mean_gamma());
}

// Var(K_t) by conditioning on the intensities:
//   E[Var(K_t | Γ,Δ)] = t·(E[Y²]E[Δ] + E[Z²]E[Γ])        (compound Poisson part)
//   Var(E[K_t | Γ,Δ]) = t²·((E Y)²Var(Δ) + (E Z)²Var(Γ) − 2·E Y·E Z·Cov(Δ,Γ)).
// The t² block is the overdispersion signature of random intensities.
inline double var_surplus(const ModelSpec& model, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("var_surplus: t must be nonnegative");
    const double ey = model.premium_law.mean();
    const double ez = model.claim_law.mean();
    const double ey2 = model.premium_law.second_moment();
    const double ez2 = model.claim_law.second_moment();
    const double linear = ey2 * model.mixing.mean_delta() + ez2 * model.mixing.mean_gamma();
    const double quadratic = ey * ey * model.mixing.var_delta() +
                             ez * ez * model.mixing.var_gamma() -
                             2.0 * ey * ez * model.mixing.cov();
    return t * linear + t * t * quadratic;
}

// Expected net inflow rate at fixed intensities: c + δ·E[Y] − γ·E[Z].
// A value ≤ 0 means ruin is certain at those intensities (weak inequality).
inline double net_profit_margin(double gamma, double delta, const ModelSpec& model) {
    if (!(gamma > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("net_profit_margin: intensities must be positive");
    return model.c + delta * model.premium_law.mean() - gamma * model.claim_law.mean();
}

} // namespace ruinkit
