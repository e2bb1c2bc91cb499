#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "ruinkit/closedform.hpp"
#include "ruinkit/rng.hpp"

using namespace ruinkit;
using Catch::Matchers::WithinAbs;

namespace {

ModelSpec config_a(double u) {
    return ModelSpec(u, 1.0, JumpLaw::exponential(1.0), JumpLaw::exponential(1.0),
                     MixingLaw::degenerate(1.0, 0.5));
}

} // namespace

TEST_CASE("conditional ruin probability, exponential laws") {
    SECTION("reference configuration values") {
        REQUIRE_THAT(ruin_prob_conditional(0.0, 1.0, 1.0, 1.0, 1.0, 0.5),
                     WithinAbs(0.71922359359558486254, 1e-14));
        REQUIRE_THAT(ruin_prob_conditional(1.0, 1.0, 1.0, 1.0, 1.0, 0.5),
                     WithinAbs(0.54315562525350524526, 1e-14));
        REQUIRE_THAT(ruin_prob_conditional(2.0, 1.0, 1.0, 1.0, 1.0, 0.5),
                     WithinAbs(0.4101895931551059567, 1e-14));
        REQUIRE_THAT(ruin_prob_conditional(4.0, 1.0, 1.0, 1.0, 1.0, 0.5),
                     WithinAbs(0.23394046556731899018, 1e-14));
        REQUIRE_THAT(ruin_prob_conditional(10.0, 1.0, 1.0, 1.0, 1.0, 0.5),
                     WithinAbs(0.04339777723052685413, 1e-14));
    }
    SECTION("value at zero is exactly 1 − r/b") {
        const double r = adjustment_exponential(1.0, 1.0, 1.0, 1.0, 0.5).r;
        REQUIRE(ruin_prob_conditional(0.0, 1.0, 1.0, 1.0, 1.0, 0.5) == 1.0 - r);
    }
    SECTION("certain ruin returns exactly one, including the boundary") {
        REQUIRE(ruin_prob_conditional(3.0, 1.0, 1.0, 1.0, 2.0, 0.5) == 1.0);
        REQUIRE(ruin_prob_conditional(3.0, 1.0, 1.0, 1.0, 1.5, 0.5) == 1.0);  // γ/b − δ/a = c
        REQUIRE(ruin_prob_conditional(0.0, 0.0, 1.0, 1.0, 1.0, 1.0) == 1.0);  // zero drift, balanced
    }
    SECTION("zero drift survives on premium income alone") {
        REQUIRE_THAT(ruin_prob_conditional(2.0, 0.0, 1.0, 1.0, 1.0, 3.0),
                     WithinAbs(0.1839397205857211608, 1e-14));
        // Prefactor identity: (1 + a/b)/(1 + δ/γ) = 1 − r/b with r = (bδ − aγ)/(δ + γ).
        const double r = adjustment_exponential(0.0, 1.0, 1.0, 1.0, 3.0).r;
        REQUIRE_THAT((1.0 + 1.0) / (1.0 + 3.0), WithinAbs(1.0 - r, 1e-15));
    }
    SECTION("continuous across the zero-drift boundary") {
        Xoshiro256 rng(202, 0);
        int tested = 0;
        while (tested < 40) {
            const double a = 0.5 + 1.5 * rng.uniform01();
            const double b = 0.5 + 1.5 * rng.uniform01();
            const double gamma = 0.5 + 1.5 * rng.uniform01();
            const double delta = 0.5 + 1.5 * rng.uniform01();
            const double u = 3.0 * rng.uniform01();
            if (b * delta - a * gamma < 0.05) continue;  // keep c = 0 inside net profit
            const double at_zero = ruin_prob_conditional(u, 0.0, a, b, gamma, delta);
            const double near_zero = ruin_prob_conditional(u, 1e-6, a, b, gamma, delta);
            REQUIRE_THAT(near_zero, WithinAbs(at_zero, 1e-4));
            ++tested;
        }
    }
    SECTION("monotone in every model parameter") {
        const double base = ruin_prob_conditional(1.0, 1.0, 1.0, 1.0, 1.0, 0.5);
        REQUIRE(ruin_prob_conditional(1.5, 1.0, 1.0, 1.0, 1.0, 0.5) < base);  // more capital
        REQUIRE(ruin_prob_conditional(1.0, 1.2, 1.0, 1.0, 1.0, 0.5) < base);  // more drift
        REQUIRE(ruin_prob_conditional(1.0, 1.0, 1.0, 1.0, 1.0, 0.7) < base);  // more premiums
        REQUIRE(ruin_prob_conditional(1.0, 1.0, 1.0, 1.0, 1.2, 0.5) > base);  // more claims
    }
    SECTION("parameter validation") {
        REQUIRE_THROWS_AS(ruin_prob_conditional(-1.0, 1.0, 1.0, 1.0, 1.0, 0.5),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(ruin_prob_conditional(1.0, -1.0, 1.0, 1.0, 1.0, 0.5),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(ruin_prob_conditional(1.0, 1.0, 0.0, 1.0, 1.0, 0.5),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(ruin_prob_conditional(1.0, 1.0, 1.0, 1.0, 0.0, 0.5),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(ruin_prob_conditional(1.0, 1.0, 1.0, 1.0, 1.0, 0.0),
                          std::invalid_argument);
    }
}

TEST_CASE("mixed ruin probability") {
    SECTION("degenerate mixing reduces to the conditional formula") {
        const auto model = config_a(1.0);
        REQUIRE(ruin_prob_mixed(model, 1.0) ==
                ruin_prob_conditional(1.0, 1.0, 1.0, 1.0, 1.0, 0.5));
    }
    SECTION("discrete mixing is the probability-weighted atom sum") {
        const ModelSpec model(1.0, 1.0, JumpLaw::exponential(1.0), JumpLaw::exponential(1.0),
                              MixingLaw::discrete({{1.0, 0.5, 0.5}, {2.0, 0.5, 0.5}}));
        const double mixed = ruin_prob_mixed(model, 1.0);
        const double by_hand = 0.5 * ruin_prob_conditional(1.0, 1.0, 1.0, 1.0, 1.0, 0.5) +
                               0.5 * ruin_prob_conditional(1.0, 1.0, 1.0, 1.0, 2.0, 0.5);
        REQUIRE_THAT(mixed, WithinAbs(by_hand, 1e-14));
        // The second atom sits in the certain-ruin region, so it contributes 1.
        REQUIRE_THAT(mixed, WithinAbs(0.77157781262675262263, 1e-14));
    }
    SECTION("non-exponential size laws are rejected") {
        const ModelSpec model(1.0, 1.0, JumpLaw::exponential(1.0), JumpLaw::gamma(2.0, 2.0),
                              MixingLaw::degenerate(1.0, 0.5));
        REQUIRE_THROWS_AS(ruin_prob_mixed(model, 1.0), UnsupportedJumpLaw);
        const ModelSpec model2(1.0, 1.0, JumpLaw::empirical({1.0}), JumpLaw::exponential(1.0),
                               MixingLaw::degenerate(1.0, 0.5));
        REQUIRE_THROWS_AS(ruin_prob_mixed(model2, 1.0), UnsupportedJumpLaw);
    }
    SECTION("independent gamma mixing integrates by quasi-Monte Carlo") {
        const ModelSpec model(1.0, 1.0, JumpLaw::exponential(1.0), JumpLaw::exponential(1.0),
                              MixingLaw::independent_gamma(2.0, 2.0, 2.0, 4.0));
        const double psi0 = ruin_prob_mixed(model, 0.0, 8192);
        const double psi1 = ruin_prob_mixed(model, 1.0, 8192);
        const double psi4 = ruin_prob_mixed(model, 4.0, 8192);
        REQUIRE(psi0 > 0.0);
        REQUIRE(psi0 <= 1.0);
        REQUIRE(psi0 > psi1);
        REQUIRE(psi1 > psi4);
        REQUIRE(psi4 > 0.0);
        // Deterministic: same inputs give bit-identical output.
        REQUIRE(ruin_prob_mixed(model, 1.0, 8192) == psi1);
        // Sample-size refinement stays self-consistent.
        REQUIRE_THAT(ruin_prob_mixed(model, 1.0, 65536), WithinAbs(psi1, 5e-3));
    }
    SECTION("sharply concentrated gamma mixing approaches the degenerate value") {
        const ModelSpec model(1.0, 1.0, JumpLaw::exponential(1.0), JumpLaw::exponential(1.0),
                              MixingLaw::independent_gamma(1e6, 1e6, 1e6, 2e6));
        REQUIRE_THAT(ruin_prob_mixed(model, 1.0, 8192),
                     WithinAbs(0.54315562525350524526, 1e-3));
    }
    SECTION("certain-ruin mass is picked up by the integration") {
        const ModelSpec model(1.0, 1.0, JumpLaw::exponential(1.0), JumpLaw::exponential(1.0),
                              MixingLaw::independent_gamma(100.0, 10.0, 1.0, 1.0));
        REQUIRE(ruin_prob_mixed(model, 1.0, 8192) > 0.99);
    }
    SECTION("mix_samples validation") {
        const auto model = config_a(1.0);
        REQUIRE_THROWS_AS(ruin_prob_mixed(model, 1.0, 0), std::invalid_argument);
    }
}
