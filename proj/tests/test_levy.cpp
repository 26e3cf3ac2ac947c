#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ghsv/errors.hpp"
#include "ghsv/levy.hpp"
#include "ghsv/numerics.hpp"
#include "ghsv/random.hpp"

using namespace ghsv;

TEST_CASE("Laplace exponent of the generalized Gamma family") {
    CHECK(GenGammaFamily(0.5, 1.3).psi(1.0) ==
          doctest::Approx(0.7527993274223439).epsilon(1e-13));
    CHECK(GenGammaFamily(0.0, 1.3).psi(1.0) ==
          doctest::Approx(0.5705448584676129).epsilon(1e-13));
    CHECK(GenGammaFamily(-1.0, 1.0).psi(1.0) ==
          doctest::Approx(0.5).epsilon(1e-13));
    CHECK(GenGammaFamily(0.5, 1.3).psi(0.0) == 0.0);
    // psi must be increasing and concave on a coarse scan
    const GenGammaFamily fam(0.3, 0.9);
    double prev = 0, prev_inc = 1e300;
    for (double s : {0.5, 1.0, 1.5, 2.0}) {
        const double p = fam.psi(s);
        CHECK(p > prev);
        CHECK(p - prev < prev_inc);
        prev_inc = p - prev;
        prev = p;
    }
}

TEST_CASE("tilted moments of the generalized Gamma family") {
    CHECK(GenGammaFamily(0.5, 1.3).tilted_kappa(1, 1.0) ==
          doctest::Approx(0.6593804733957871).epsilon(1e-13));
    CHECK(GenGammaFamily(-1.0, 2.0).tilted_kappa(3, 0.5) ==
          doctest::Approx(0.1536).epsilon(1e-13));
    // untilted first moment is b^{alpha-1}
    CHECK(GenGammaFamily(0.5, 1.3).tilted_kappa(1, 0.0) ==
          doctest::Approx(0.8770580193070292).epsilon(1e-13));
    CHECK_THROWS_AS(GenGammaFamily(0.5, 1.3).log_tilted_kappa(0, 1.0), DomainError);
    CHECK_THROWS_AS(GenGammaFamily(0.5, 1.3).log_tilted_kappa(1, -0.1), DomainError);
    CHECK_THROWS_AS(GenGammaFamily(0.5, 0.0).log_tilted_kappa(1, 0.0), DomainError);
}

TEST_CASE("family parameter validation") {
    CHECK_NOTHROW(GenGammaFamily(0.5, 0.0));  // stable subordinator corner
    CHECK_THROWS_AS(GenGammaFamily(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(GenGammaFamily(1.5, 1.0), DomainError);
    CHECK_THROWS_AS(GenGammaFamily(0.5, -0.1), DomainError);
    CHECK_THROWS_AS(GenGammaFamily(0.0, 0.0), DomainError);
    CHECK_THROWS_AS(GenGammaFamily(-1.0, 0.0), DomainError);
}

TEST_CASE("total and truncated Levy masses") {
    CHECK(GenGammaFamily(-1.0, 2.0).total_mass().value() ==
          doctest::Approx(0.5).epsilon(1e-13));
    CHECK(!GenGammaFamily(0.5, 1.0).total_mass().has_value());
    CHECK(!GenGammaFamily(0.0, 1.0).total_mass().has_value());

    // against direct quadrature of u^{-alpha-1} e^{-bu} / Gamma(1-alpha)
    const double alpha = 0.5, b = 1.0;
    const GenGammaFamily fam(alpha, b);
    const double norm = std::tgamma(1.0 - alpha);
    auto dens = [&](double u) { return std::pow(u, -alpha - 1.0) * std::exp(-b * u) / norm; };
    for (double eps : {0.05, 0.3, 1.0}) {
        const double direct = integrate_1d(dens, eps, 60.0).value;
        CHECK(fam.mass_above(eps) == doctest::Approx(direct).epsilon(1e-8));
        const double below =
            integrate_1d([&](double u) { return u * dens(u); }, 0.0, eps).value;
        CHECK(fam.mean_mass_below(eps) == doctest::Approx(below).epsilon(1e-8));
    }
    CHECK_THROWS_AS(fam.mass_above(0.0), DomainError);
    CHECK(GenGammaFamily(-0.5, 1.0).mass_above(0.0) ==
          doctest::Approx(GenGammaFamily(-0.5, 1.0).total_mass().value())
              .epsilon(1e-12));
}

TEST_CASE("size draws above a threshold follow the normalized restriction") {
    // alpha=-1: sizes are Exp(b); restricted to [eps,inf) the law is
    // eps + Exp(b) by memorylessness
    const GenGammaFamily fam(-1.0, 2.0);
    RandomSource rng(31, 4);
    const int N = 30000;
    double mean = 0, mn = 1e300;
    for (int i = 0; i < N; ++i) {
        const double u = fam.sample_size(rng, 0.4);
        mean += u;
        mn = std::min(mn, u);
    }
    mean /= N;
    CHECK(mn >= 0.4);
    CHECK(std::fabs(mean - 0.9) < 4.0 * 0.5 / std::sqrt(static_cast<double>(N)));
}

TEST_CASE("jump field realization") {
    const GenGammaFamily fam(-1.0, 1.0);  // unit total mass, Exp(1) sizes
    const EtaDensity eta = EtaDensity::one();

    RandomSource a(7, 9), b(7, 9);
    const JumpSample s1 = sample_jumps(fam, 0.0, 3.0, eta, 0.0, a);
    const JumpSample s2 = sample_jumps(fam, 0.0, 3.0, eta, 0.0, b);
    CHECK(s1.sizes == s2.sizes);
    CHECK(s1.locations == s2.locations);
    CHECK(s1.neglected_mean_mass == 0.0);

    RandomSource rng(101, 2);
    long total = 0;
    double size_sum = 0;
    const int R = 4000;
    for (int r = 0; r < R; ++r) {
        const JumpSample s = sample_jumps(fam, 0.0, 3.0, eta, 0.0, rng);
        REQUIRE(s.sizes.size() == s.locations.size());
        for (double y : s.locations) {
            CHECK(y > 0.0);
            CHECK(y <= 3.0);
        }
        for (double u : s.sizes) CHECK(u > 0.0);
        total += static_cast<long>(s.sizes.size());
        for (double u : s.sizes) size_sum += u;
    }
    // counts are Poisson(3), sizes Exp(1)
    const double mean_count = static_cast<double>(total) / R;
    CHECK(std::fabs(mean_count - 3.0) <
          4.0 * std::sqrt(3.0 / static_cast<double>(R)));
    CHECK(std::fabs(size_sum / static_cast<double>(total) - 1.0) <
          4.0 / std::sqrt(static_cast<double>(total)));
}

TEST_CASE("jump locations follow a non-constant weight density") {
    EtaDensity eta;
    eta.is_const_one = false;
    eta.pdf = [](double y) { return std::exp(-0.5 * (y - 1.0) * (y - 1.0)); };
    const GenGammaFamily fam(-1.0, 0.5);  // total mass 2
    RandomSource rng(55, 3);
    double loc_sum = 0;
    long total = 0;
    for (int r = 0; r < 3000; ++r) {
        const JumpSample s = sample_jumps(fam, -10.0, 10.0, eta, 0.0, rng);
        for (double y : s.locations) loc_sum += y;
        total += static_cast<long>(s.locations.size());
    }
    // locations are iid from the normalized bump: mean 1, sd 1
    CHECK(total > 10000);
    CHECK(std::fabs(loc_sum / static_cast<double>(total) - 1.0) <
          4.0 / std::sqrt(static_cast<double>(total)));
}

TEST_CASE("infinite-activity families need a truncation threshold") {
    const GenGammaFamily fam(0.5, 1.0);
    RandomSource rng(1, 1);
    CHECK_THROWS_AS(sample_jumps(fam, 0.0, 1.0, EtaDensity::one(), 0.0, rng),
                    DomainError);
    const JumpSample s = sample_jumps(fam, 0.0, 2.0, EtaDensity::one(), 0.01, rng);
    for (double u : s.sizes) CHECK(u >= 0.01);
    CHECK(s.neglected_mean_mass ==
          doctest::Approx(fam.mean_mass_below(0.01) * 2.0).epsilon(1e-10));
}

TEST_CASE("density-specified family agrees with its closed-form twin") {
    // f_T = Exp(1) density corresponds to alpha=0, b=1
    DensitySpecifiedFamily dens([](double t) { return std::exp(-t); });
    const GenGammaFamily twin(0.0, 1.0);
    for (double s : {0.0, 0.4, 1.0, 2.5})
        CHECK(dens.psi(s) == doctest::Approx(twin.psi(s)).epsilon(1e-8));
    for (int l : {1, 2, 3})
        for (double s : {0.0, 0.7, 2.0})
            CHECK(dens.log_tilted_kappa(l, s) ==
                  doctest::Approx(twin.log_tilted_kappa(l, s)).epsilon(1e-7));

    CHECK(!dens.total_mass().has_value());
    RandomSource rng(2, 2);
    CHECK_THROWS_AS(dens.mass_above(0.1), UnsupportedError);
    CHECK_THROWS_AS(dens.mean_mass_below(0.1), UnsupportedError);
    CHECK_THROWS_AS(dens.sample_size(rng, 0.1), UnsupportedError);
    CHECK_THROWS_AS(sample_jumps(dens, 0.0, 1.0, EtaDensity::one(), 0.1, rng),
                    UnsupportedError);
}
