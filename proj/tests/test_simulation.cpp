#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <vector>

#include "ghsv/errors.hpp"
#include "ghsv/ou_kernel.hpp"
#include "ghsv/simulation.hpp"

using namespace ghsv;

namespace {

SimConfig base_config() {
    SimConfig cfg;
    cfg.n = 4;
    cfg.delta = 1.0;
    cfg.lam = 1.0;
    cfg.family = std::make_shared<GenGammaFamily>(-1.0, 1.0);
    cfg.ret = ReturnParams::standard(0.05, 0.3, 1.0);
    return cfg;
}

}  // namespace

TEST_CASE("window choice covers the pre-sample decay target") {
    CHECK(default_window(GenGammaFamily(0.0, 1.0), 1e-6) ==
          doctest::Approx(13.815510557964274).epsilon(1e-12));
    // heavy mean mass stretches the window logarithmically
    CHECK(default_window(GenGammaFamily(-1.0, 0.25), 1e-6) ==
          doctest::Approx(std::log(16.0 / 1e-6)).epsilon(1e-12));
    CHECK_THROWS_AS(default_window(GenGammaFamily(0.0, 1.0), 0.0), DomainError);
    CHECK_THROWS_AS(default_window(GenGammaFamily(0.0, 1.0), 1.0), DomainError);
}

TEST_CASE("simulated datasets are reproducible and internally consistent") {
    const SimConfig cfg = base_config();
    RandomSource a(19, 3), b(19, 3);
    const SimOutput s1 = simulate_dataset(cfg, a);
    const SimOutput s2 = simulate_dataset(cfg, b);
    CHECK(s1.x == s2.x);
    CHECK(s1.tau == s2.tau);
    CHECK(s1.jump_size == s2.jump_size);
    CHECK(s1.jump_loc == s2.jump_loc);
    CHECK(s1.v0 == s2.v0);

    REQUIRE(s1.x.size() == 4);
    REQUIRE(s1.tau.size() == 4);
    REQUIRE(s1.jump_size.size() == s1.jump_loc.size());
    CHECK(s1.window == doctest::Approx(std::log(1e6)).epsilon(1e-12));
    CHECK(s1.neglected_mean_mass == 0.0);  // finite activity, no truncation

    // interval volatilities and the time-zero level follow from the field
    const OuKernel K(cfg.lam, cfg.delta, cfg.n, cfg.family, cfg.eta);
    double v0 = 0;
    std::vector<double> tau(4, 0.0);
    for (std::size_t j = 0; j < s1.jump_size.size(); ++j) {
        const double u = s1.jump_size[j], y = s1.jump_loc[j];
        CHECK(y > -s1.window);
        CHECK(y <= 4.0);
        if (y <= 0) v0 += u * std::exp(y);
        for (int i = 1; i <= 4; ++i) tau[i - 1] += u * K.g_weight(i, y);
    }
    CHECK(v0 == doctest::Approx(s1.v0).epsilon(1e-12));
    for (int i = 0; i < 4; ++i) {
        CHECK(tau[i] == doctest::Approx(s1.tau[i]).epsilon(1e-12));
        CHECK(s1.tau[i] >= 0.0);
    }
}

TEST_CASE("empty intervals give the degenerate return") {
    SimConfig cfg = base_config();
    cfg.family = std::make_shared<GenGammaFamily>(-1.0, 5.0);  // mass 0.04
    cfg.ret = ReturnParams::standard(0.3, 0.0, 1.0);
    RandomSource rng(4, 4);
    bool saw_empty = false;
    for (int rep = 0; rep < 20 && !saw_empty; ++rep) {
        const SimOutput s = simulate_dataset(cfg, rng);
        for (int i = 0; i < cfg.n; ++i)
            if (s.tau[i] == 0.0) {
                saw_empty = true;
                CHECK(s.x[i] == 0.3);
            }
    }
    CHECK(saw_empty);
}

TEST_CASE("truncation is required exactly when activity is infinite") {
    SimConfig cfg = base_config();
    cfg.family = std::make_shared<GenGammaFamily>(0.5, 1.0);
    RandomSource rng(8, 1);
    CHECK_THROWS_AS(simulate_dataset(cfg, rng), DomainError);

    cfg.eps = 0.01;
    cfg.n = 2;
    const SimOutput s = simulate_dataset(cfg, rng);
    for (double u : s.jump_size) CHECK(u >= 0.01);
    CHECK(s.neglected_mean_mass ==
          doctest::Approx(cfg.family->mean_mass_below(0.01) * (s.window + 2.0))
              .epsilon(1e-10));
}

TEST_CASE("configuration validation") {
    RandomSource rng(1, 1);
    SimConfig cfg = base_config();
    cfg.n = 0;
    CHECK_THROWS_AS(simulate_dataset(cfg, rng), DomainError);
    cfg = base_config();
    cfg.family.reset();
    CHECK_THROWS_AS(simulate_dataset(cfg, rng), DomainError);
    cfg = base_config();
    cfg.ret.dt = 0.5;  // disagrees with the interval width
    CHECK_THROWS_AS(simulate_dataset(cfg, rng), DomainError);
}

TEST_CASE("simulated volatility matches the Laplace functional") {
    SimConfig cfg = base_config();
    cfg.n = 2;
    const std::vector<double> w{0.7, 1.2};
    const OuKernel K(cfg.lam, cfg.delta, cfg.n, cfg.family, cfg.eta);
    const double target = std::exp(-K.laplace(w));

    RandomSource rng(90, 6);
    const int R = 3000;
    double sum = 0, sumsq = 0;
    for (int rep = 0; rep < R; ++rep) {
        const SimOutput s = simulate_dataset(cfg, rng);
        const double v = std::exp(-w[0] * s.tau[0] - w[1] * s.tau[1]);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / R;
    const double se = std::sqrt((sumsq / R - mean * mean) / (R - 1.0));
    CHECK(std::fabs(mean - target) < 4.0 * se);
}
