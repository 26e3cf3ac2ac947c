#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ghsv/distributions.hpp"
#include "ghsv/numerics.hpp"
#include "ghsv/random.hpp"

using namespace ghsv;

TEST_CASE("return log density closed form hits pinned values") {
    // tau = 1/2, beta = 0, at the mean: f = tau/s^3 with s = 1, so exactly 1/2
    CHECK(ghsv_logpdf(0.0, 0.5, ReturnParams::standard(0.0, 0.0, 1.0)) ==
          doctest::Approx(-0.6931471805599453).epsilon(1e-14));
    // tau = 1, beta = 1, at the mean: f = e^{-sqrt 2}(1+sqrt 2)/(2 sqrt 2)
    CHECK(ghsv_logpdf(0.0, 1.0, ReturnParams::standard(0.0, 1.0, 1.0)) ==
          doctest::Approx(-1.5725607461934703).epsilon(1e-13));
    CHECK(ghsv_logpdf(0.3, 0.7, ReturnParams::standard(0.1, -1.2, 1.0)) ==
          doctest::Approx(-1.6916415750154856).epsilon(1e-13));
    // continuity in beta through zero
    const double up = ghsv_logpdf(0.4, 0.9, ReturnParams::standard(0.0, 1e-9, 1.0));
    const double dn = ghsv_logpdf(0.4, 0.9, ReturnParams::standard(0.0, -1e-9, 1.0));
    const double at = ghsv_logpdf(0.4, 0.9, ReturnParams::standard(0.0, 0.0, 1.0));
    CHECK(std::fabs(up - at) < 1e-8);
    CHECK(std::fabs(dn - at) < 1e-8);
}

TEST_CASE("closed form equals the scale-mixture quadrature") {
    for (double x : {-1.7, 0.0, 0.8})
        for (double tau : {0.3, 1.0, 2.5})
            for (double beta : {-0.9, 0.0, 1.1}) {
                const ReturnParams p = ReturnParams::standard(0.05, beta, 1.0);
                CHECK(ghsv_logpdf(x, tau, p) ==
                      doctest::Approx(ghsv_logpdf_via_mixture(x, tau, p)).epsilon(1e-8));
            }
}

TEST_CASE("non-standard exponents only work through the mixture") {
    ReturnParams p;
    p.mu = 0.0;
    p.dt = 1.0;
    p.betas = {0.4, -0.2};
    p.exponents = {0.6, 1.0, 0.5};
    CHECK_THROWS_AS(ghsv_logpdf(0.1, 1.0, p), DomainError);
    const double lf = ghsv_logpdf_via_mixture(0.1, 1.0, p);
    CHECK(std::isfinite(lf));
    // polynomial tails put ~3.5% of the mass outside [-12,12]; the window
    // mass below was computed with an independent adaptive quadrature
    const double mass =
        integrate_1d([&](double x) { return std::exp(ghsv_logpdf_via_mixture(x, 1.0, p)); },
                     -12.0, 12.0)
            .value;
    CHECK(mass == doctest::Approx(0.9653278781286752).epsilon(5e-4));
}

TEST_CASE("conditional moments of the mixing representation") {
    const ReturnParams p = ReturnParams::standard(0.2, -0.7, 2.0);
    double mean = 0, var = 0;
    conditional_moments(p, 4.0, mean, var);
    CHECK(mean == doctest::Approx(0.2 * 2.0 - 0.7 / 4.0).epsilon(1e-14));
    CHECK(var == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS(conditional_moments(p, 0.0, mean, var), DomainError);
}

TEST_CASE("half-integer Bessel K against closed forms") {
    CHECK(log_bessel_k_half(1.5, 2.0) ==
          doctest::Approx(-1.7153171295270808).epsilon(1e-13));
    CHECK(log_bessel_k_half(2.5, 0.7) ==
          doctest::Approx(2.138457999658566).epsilon(1e-13));
    CHECK(log_bessel_k_half(0.5, 3.0) ==
          doctest::Approx(-3.3235147916893277).epsilon(1e-13));
    CHECK_THROWS_AS(log_bessel_k_half(1.0, 1.0), DomainError);
}

namespace {

double ig_logpdf(double t, double mu, double shape) {
    return 0.5 * std::log(shape / (2.0 * 3.14159265358979323846 * t * t * t)) -
           shape * (t - mu) * (t - mu) / (2.0 * mu * mu * t);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// inverse Gaussian CDF in (mean, shape) form
double ig_cdf(double t, double mu, double shape) {
    const double a = std::sqrt(shape / t);
    return normal_cdf(a * (t / mu - 1.0)) +
           std::exp(2.0 * shape / mu) * normal_cdf(-a * (t / mu + 1.0));
}

}  // namespace

TEST_CASE("gig density: lam=-1/2 is the inverse Gaussian") {
    const double delta = 1.4, v = 0.9;
    const double mu = delta / v, shape = delta * delta;
    for (double t : {0.2, 0.8, 1.7, 4.0})
        CHECK(gig_logpdf(t, -0.5, delta, v) ==
              doctest::Approx(ig_logpdf(t, mu, shape)).epsilon(1e-12));
}

TEST_CASE("gig density normalizes and handles boundary regimes") {
    const double mass =
        integrate_1d([](double t) { return std::exp(gig_logpdf(t, 1.5, 1.3, 0.8)); },
                     0.0, 80.0)
            .value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    // delta = 0: Gamma(lam, v^2/2); v = 0: inverse Gamma(-lam, delta^2/2)
    CHECK(gig_logpdf(2.0, 1.5, 0.0, 1.0) ==
          doctest::Approx(1.5 * std::log(0.5) - std::lgamma(1.5) + 0.5 * std::log(2.0) -
                          1.0)
              .epsilon(1e-12));
    CHECK_THROWS_AS(gig_logpdf(1.0, 1.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(gig_logpdf(1.0, -1.0, 0.0, 1.0), DomainError);
    CHECK(gig_logpdf(-3.0, 1.5, 1.0, 1.0) ==
          -std::numeric_limits<double>::infinity());
}

namespace {

// two-sided KS statistic of samples against a CDF evaluator
template <class Cdf>
double ks_stat(std::vector<double> s, Cdf&& cdf) {
    std::sort(s.begin(), s.end());
    const double N = static_cast<double>(s.size());
    double d = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double F = cdf(s[i]);
        d = std::max(d, std::fabs(F - i / N));
        d = std::max(d, std::fabs(F - (i + 1) / N));
    }
    return d;
}

}  // namespace

TEST_CASE("gig sampler matches the inverse Gaussian law at lam=-1/2") {
    RandomSource rng(42, 7);
    const double delta = 1.2, v = 1.6;
    const int N = 4000;
    std::vector<double> s(N);
    for (auto& t : s) t = gig_sample(rng, -0.5, delta, v);
    const double d =
        ks_stat(s, [&](double t) { return ig_cdf(t, delta / v, delta * delta); });
    CHECK(d < 1.7 / std::sqrt(static_cast<double>(N)));  // ~1% KS level
}

TEST_CASE("gig sampler matches its own density in the interior case") {
    // numeric CDF by integrating the density between order statistics
    auto check_case = [](double lam, double delta, double v, std::uint64_t seed) {
        RandomSource rng(seed, 3);
        const int N = 2500;
        std::vector<double> s(N);
        for (auto& t : s) t = gig_sample(rng, lam, delta, v);
        std::sort(s.begin(), s.end());
        QuadratureConfig q;
        q.rel_tol = 1e-9;
        double cum = integrate_1d([&](double t) {
                         return std::exp(gig_logpdf(t, lam, delta, v));
                     },
                                  0.0, s[0], q)
                         .value;
        double d = std::fabs(cum);  // F(s_0) vs 0/N
        for (int i = 0; i < N; ++i) {
            if (i > 0)
                cum += integrate_1d([&](double t) {
                           return std::exp(gig_logpdf(t, lam, delta, v));
                       },
                                    s[i - 1], s[i], q)
                           .value;
            d = std::max(d, std::fabs(cum - i / static_cast<double>(N)));
            d = std::max(d, std::fabs(cum - (i + 1) / static_cast<double>(N)));
        }
        CHECK(d < 1.7 / std::sqrt(static_cast<double>(N)));
    };
    check_case(1.5, 0.9, 1.1, 10);   // moderate concentration
    check_case(1.5, 40.0, 2.5, 11);  // strong concentration (delta v = 100)
    check_case(-2.5, 1.3, 0.7, 12);  // negative index through reciprocity
}

TEST_CASE("gig sampler degenerate edges") {
    RandomSource rng(5, 1);
    CHECK(gig_sample(rng, 2.0, 0.0, 1.0) > 0);             // Gamma path
    CHECK(gig_sample(rng, -2.0, 1.0, 0.0) > 0);            // inverse Gamma path
    CHECK(gig_sample(rng, 0.5, 2.0, 3.0) > 0);             // reciprocal IG path
    CHECK_THROWS_AS(gig_sample(rng, -1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(gig_sample(rng, 1.0, 1.0, -1.0), DomainError);
    CHECK_THROWS_AS(gig_sample(rng, 0.0, 1.0, 1.0), DomainError);
}

TEST_CASE("return sampler: degenerate tau and determinism") {
    const ReturnParams p = ReturnParams::standard(0.3, 0.8, 2.0);
    RandomSource a(9, 2), b(9, 2);
    CHECK(sample_return(a, 0.0, p) == 0.6);  // collapses to mu dt
    CHECK(sample_return(a, 1.3, p) == sample_return(b, 1.3, p));
    // beta = 0, mu = 0: symmetric law; sign balance at 4 sigma
    const ReturnParams sym = ReturnParams::standard(0.0, 0.0, 1.0);
    RandomSource rng(17, 0);
    int pos = 0;
    const int N = 20000;
    for (int i = 0; i < N; ++i)
        if (sample_return(rng, 0.9, sym) > 0) ++pos;
    CHECK(std::fabs(pos - N / 2.0) < 2.0 * std::sqrt(N));
}
