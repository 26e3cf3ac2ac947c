#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "ghsv/errors.hpp"
#include "ghsv/inference.hpp"

using namespace ghsv;

namespace {

ChainContext skew_context() {
    ChainContext ctx;
    ctx.n = 4;
    ctx.delta = 0.8;
    return ctx;
}

ThetaParams theta(double a, double b, double l) {
    ThetaParams t;
    t.alpha = a;
    t.b = b;
    t.lam = l;
    return t;
}

}  // namespace

TEST_CASE("partition sum and path sum give the same likelihood") {
    const ChainContext ctx = skew_context();
    const OuKernel K = ctx.make_kernel(theta(0.5, 1.3, 0.7));
    const std::vector<double> X{0.3, -0.6, 0.15, 0.9};
    const std::vector<double> w{0.5, 1.4, 0.8, 2.1};
    const ReturnParams ret = ReturnParams::standard(0.05, 0.4, ctx.delta);
    const double lp = loglik_partition_sum(X, w, ret, K);
    const double ls = loglik_spath_sum(X, w, ret, K);
    CHECK(std::isfinite(lp));
    CHECK(lp == doctest::Approx(ls).epsilon(1e-10));
}

TEST_CASE("mixing-weight proposal matches the conditional exactly") {
    // N(x | mu dt + beta/w, 1/w) e^{-w T} against the variance-gamma-style
    // proposal with index 3/2: the ratio must be flat in w, which is what
    // reduces the update's acceptance to the Laplace-functional factor alone
    auto residual = [](double x, double mu, double dt, double beta, double T,
                       double w) {
        const double A = x - mu * dt;
        return normal_logpdf(x, mu * dt + beta / w, 1.0 / w) - w * T -
               gig_logpdf(w, 1.5, std::fabs(beta), std::sqrt(A * A + 2.0 * T));
    };
    for (double beta : {-0.8, 0.0, 1.3}) {
        const double base = residual(0.7, 0.1, 1.0, beta, 1.3, 0.3);
        for (double w : {1.0, 2.7, 9.0})
            CHECK(residual(0.7, 0.1, 1.0, beta, 1.3, w) ==
                  doctest::Approx(base).epsilon(1e-11));
    }
}

TEST_CASE("seat weights are exact cell-weight ratios") {
    const ChainContext ctx = skew_context();
    const OuKernel K = ctx.make_kernel(theta(0.5, 1.3, 0.7));
    OuTable tab(K, {0.4, 1.1, 0.9, 0.7});
    const Partition cells{{1}, {3, 4}};
    const auto lw = crp_seat_logweights(tab, cells, 2);
    REQUIRE(lw.size() == 3);
    CHECK(lw[0] == doctest::Approx(tab.log_theta({2})).epsilon(1e-12));
    CHECK(lw[1] ==
          doctest::Approx(tab.log_theta({1, 2}) - tab.log_theta({1})).epsilon(1e-12));
    CHECK(lw[2] ==
          doctest::Approx(tab.log_theta({2, 3, 4}) - tab.log_theta({3, 4}))
              .epsilon(1e-12));
}

TEST_CASE("path move proposals and their acceptance ratio") {
    const ChainContext ctx = skew_context();
    const OuKernel K = ctx.make_kernel(theta(0.5, 1.3, 0.7));
    OuTable tab(K, {0.4, 1.1, 0.9, 0.7});

    const SPath m{2, 1, 1, 0};
    const auto fwd = spath_mh_move(m, 2, 4, tab);
    REQUIRE(fwd.has_value());
    CHECK(fwd->first == SPath{2, 0, 1, 1});
    CHECK(fwd->second ==
          doctest::Approx(tab.log_phi(4, 1) - tab.log_phi(2, 1)).epsilon(1e-12));

    const auto back = spath_mh_move(fwd->first, 4, 2, tab);
    REQUIRE(back.has_value());
    CHECK(back->first == m);
    CHECK(back->second == doctest::Approx(-fwd->second).epsilon(1e-12));

    CHECK(!spath_mh_move(m, 4, 1, tab).has_value());  // empty source
    // removing the only unit under interval 1 strands the first index
    CHECK(!spath_mh_move({1, 1, 1, 1}, 1, 3, tab).has_value());
    CHECK_THROWS_AS(spath_mh_move(m, 2, 2, tab), DomainError);
    CHECK_THROWS_AS(spath_mh_move(m, 0, 3, tab), DomainError);
    CHECK_THROWS_AS(spath_mh_move(m, 1, 5, tab), DomainError);
}

namespace {

RunConfig small_run(SamplerKind kind) {
    RunConfig cfg;
    cfg.ctx.n = 5;
    cfg.ctx.delta = 1.0;
    cfg.ret = ReturnParams::standard(0.0, 0.2, 1.0);
    cfg.theta0 = theta(0.0, 1.0, 1.0);
    cfg.sampler = kind;
    cfg.iters = 12;
    cfg.burnin = 6;
    cfg.thin = 2;
    cfg.seed = 7;
    return cfg;
}

const std::vector<double> kX{0.3, -0.5, 0.1, 0.9, -0.2};

}  // namespace

TEST_CASE("chains are reproducible and structurally sound") {
    for (SamplerKind kind : {SamplerKind::partition, SamplerKind::spath}) {
        CAPTURE(static_cast<int>(kind));
        const RunConfig cfg = small_run(kind);
        const ChainTrace t1 = run_chain(kX, cfg, 0);
        const ChainTrace t2 = run_chain(kX, cfg, 0);
        const ChainTrace t3 = run_chain(kX, cfg, 1);

        REQUIRE(t1.rows.size() == 12);
        REQUIRE(t1.latents.size() == 12);
        bool any_diff = false;
        for (std::size_t i = 0; i < t1.rows.size(); ++i) {
            CHECK(t1.rows[i].mu == t2.rows[i].mu);
            CHECK(t1.rows[i].beta == t2.rows[i].beta);
            CHECK(t1.rows[i].loglik == t2.rows[i].loglik);
            CHECK(t1.latents[i].w == t2.latents[i].w);
            CHECK(t1.latents[i].jump_loc == t2.latents[i].jump_loc);
            if (t1.rows[i].loglik != t3.rows[i].loglik) any_diff = true;
        }
        CHECK(any_diff);  // different chain index, different stream

        for (const auto& d : t1.latents) {
            REQUIRE(d.w.size() == 5);
            REQUIRE(d.cell_min.size() == d.cell_size.size());
            REQUIRE(d.jump_size.size() == d.cell_min.size());
            REQUIRE(d.jump_loc.size() == d.cell_min.size());
            int seated = 0;
            for (std::size_t j = 0; j < d.cell_size.size(); ++j) {
                CHECK(d.cell_size[j] >= 1);
                CHECK(d.cell_min[j] >= 1);
                CHECK(d.cell_min[j] <= 5);
                CHECK(d.jump_size[j] > 0);
                CHECK(d.jump_loc[j] <= d.cell_min[j] * 1.0);
                seated += d.cell_size[j];
            }
            CHECK(seated == 5);
            for (double wv : d.w) CHECK(wv > 0);
        }
        for (const auto& row : t1.rows) {
            CHECK(std::isfinite(row.loglik));
            CHECK(row.n_cells >= 1);
            CHECK(row.n_cells <= 5);
        }
    }
}

TEST_CASE("frozen hyperparameters never move") {
    RunConfig cfg = small_run(SamplerKind::partition);
    cfg.update.theta = false;
    cfg.theta0 = theta(-0.5, 1.7, 0.9);
    const ChainTrace t = run_chain(kX, cfg, 0);
    for (const auto& row : t.rows) {
        CHECK(row.alpha == -0.5);
        CHECK(row.b == 1.7);
        CHECK(row.lam == 0.9);
        CHECK(row.acc_theta == 0);
    }
}

TEST_CASE("misconfigured runs are rejected up front") {
    RunConfig cfg = small_run(SamplerKind::partition);
    CHECK_THROWS_AS(run_chain({0.1, 0.2}, cfg, 0), DomainError);  // length
    RunConfig bad = cfg;
    bad.ret = ReturnParams::standard(0.0, 0.2, 0.5);  // dt != delta
    CHECK_THROWS_AS(run_chain(kX, bad, 0), DomainError);
    RunConfig stable = cfg;
    stable.theta0 = theta(0.5, 0.0, 1.0);  // b = 0 has no conjugate size draw
    CHECK_THROWS_AS(run_chain(kX, stable, 0), UnsupportedError);
}

TEST_CASE("effective sample size brackets") {
    RandomSource rng(3, 3);
    const int N = 2000;
    std::vector<double> iid(N), ar(N), flat(N, 2.5);
    for (auto& v : iid) v = rng.normal();
    double prev = 0;
    for (auto& v : ar) v = prev = 0.95 * prev + rng.normal();

    const double e_iid = effective_sample_size(iid);
    CHECK(e_iid > 0.5 * N);
    CHECK(e_iid <= 1.6 * N);
    CHECK(effective_sample_size(ar) < 0.3 * N);
    CHECK(effective_sample_size(flat) == N);  // degenerate series
    CHECK(effective_sample_size({1.0, 2.0, 3.0}) == 3.0);
}

namespace {

RunConfig predict_config(int n, ThetaParams th) {
    RunConfig cfg;
    cfg.ctx.n = n;
    cfg.ctx.delta = 1.0;
    cfg.theta0 = th;
    return cfg;
}

LatentDraw simple_draw() {
    LatentDraw d;
    d.w = {0.8, 1.3};
    d.cell_min = {1};
    d.cell_size = {2};
    d.jump_size = {0.7};
    d.jump_loc = {0.4};
    d.mu = 0.0;
    d.beta = 0.2;
    d.theta = theta(-1.0, 1.0, 1.0);
    return d;
}

}  // namespace

TEST_CASE("one-step-ahead density integrates to one on a wide grid") {
    const RunConfig cfg = predict_config(2, theta(-1.0, 1.0, 1.0));
    const auto res = predictive_density({simple_draw()}, cfg, -50.0, 50.0, 501, 1.0);
    REQUIRE(res.x.size() == 501);
    REQUIRE(res.density.size() == 501);
    CHECK(res.grid_integral == doctest::Approx(1.0).epsilon(0.02));
    for (double s : res.se) CHECK(s == 0.0);  // single draw has no spread
    for (double dv : res.density) CHECK(dv >= 0.0);
}

TEST_CASE("symmetric configuration gives a symmetric density") {
    const RunConfig cfg = predict_config(2, theta(-1.0, 1.0, 1.0));
    LatentDraw d = simple_draw();
    d.beta = 0.0;
    const auto res = predictive_density({d}, cfg, -3.0, 3.0, 31, 1.0);
    for (int q = 0; q < 31; ++q)
        CHECK(res.density[q] ==
              doctest::Approx(res.density[30 - q]).epsilon(1e-10));
}

TEST_CASE("prediction input validation") {
    const RunConfig cfg = predict_config(2, theta(-1.0, 1.0, 1.0));
    const LatentDraw d = simple_draw();
    CHECK_THROWS_AS(predictive_density({}, cfg, -3.0, 3.0, 11, 1.0), DomainError);
    CHECK_THROWS_AS(predictive_density({d}, cfg, 3.0, -3.0, 11, 1.0), DomainError);
    CHECK_THROWS_AS(predictive_density({d}, cfg, -3.0, 3.0, 1, 1.0), DomainError);
    CHECK_THROWS_AS(predictive_density({d}, cfg, -3.0, 3.0, 11, 0.0), DomainError);
    LatentDraw short_w = d;
    short_w.w = {0.8};
    CHECK_THROWS_AS(predictive_density({short_w}, cfg, -3.0, 3.0, 11, 1.0),
                    DomainError);
    LatentDraw degenerate = d;
    degenerate.theta.b = 0.0;
    degenerate.theta.alpha = 0.5;
    CHECK_THROWS_AS(predictive_density({degenerate}, cfg, -3.0, 3.0, 11, 1.0),
                    UnsupportedError);
}

TEST_CASE("accumulated-volatility mean reduces to t with no field information") {
    const RunConfig cfg = predict_config(3, theta(0.0, 1.0, 1.0));
    LatentDraw d;
    d.w = {0.0, 0.0, 0.0};
    d.mu = 0.0;
    d.beta = 0.0;
    d.theta = theta(0.0, 1.0, 1.0);
    for (double t : {1.0, 2.5}) {
        const auto r = posterior_tau_mean({d}, cfg, t);
        CHECK(r.mean == doctest::Approx(t).epsilon(1e-6));
        CHECK(r.se == 0.0);
    }
    CHECK_THROWS_AS(posterior_tau_mean({}, cfg, 1.0), DomainError);
    CHECK_THROWS_AS(posterior_tau_mean({d}, cfg, 0.0), DomainError);
}

TEST_CASE("seen jumps shift the accumulated-volatility mean additively") {
    const RunConfig cfg = predict_config(3, theta(0.0, 1.0, 1.0));
    LatentDraw base;
    base.w = {0.0, 0.0, 0.0};
    base.theta = theta(0.0, 1.0, 1.0);
    LatentDraw with_jump = base;
    with_jump.cell_min = {1};
    with_jump.cell_size = {2};
    with_jump.jump_size = {1.7};
    with_jump.jump_loc = {0.3};
    const double t = 2.0;
    const double m0 = posterior_tau_mean({base}, cfg, t).mean;
    const double m1 = posterior_tau_mean({with_jump}, cfg, t).mean;
    const OuKernel K = cfg.ctx.make_kernel(base.theta);
    CHECK(m1 - m0 == doctest::Approx(1.7 * K.g_cumulative(t, 0.3)).epsilon(1e-9));
}
