#pragma once
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ghsv/distributions.hpp"
#include "ghsv/levy.hpp"
#include "ghsv/ou_kernel.hpp"
#include "ghsv/partitions.hpp"
#include "ghsv/random.hpp"

namespace ghsv {

struct ThetaParams {
    double alpha = 0.0;
    double b = 1.0;
    double lam = 1.0;
    void validate() const;
};

struct Priors {
    double mu_mean = 0, mu_sd = 10;
    double beta_mean = 0, beta_sd = 10;
    double logb_mean = 0, logb_sd = 1.5;
    double loglam_mean = 0, loglam_sd = 1.5;
    double alpha_lo = -1.5, alpha_hi = 0.9;  // uniform; reflected random walk
};

// per-block switches, mostly testing hooks (e.g. hold theta at truth)
struct UpdateFlags {
    bool jumps = true;
    bool seating = true;
    bool w = true;
    bool mu = true;
    bool beta = true;
    bool theta = true;
};

struct StepSizes {
    double logb = 0.25, loglam = 0.25, alpha = 0.25;
    int spath_moves = 0;  // unit moves per sweep; 0 means 2n
};

enum class SamplerKind { partition, spath };

// immutable chain environment; kernels are rebuilt per theta value
struct ChainContext {
    int n = 0;
    double delta = 1.0;
    EtaDensity eta = EtaDensity::one();
    QuadratureConfig quad{};
    OuKernel make_kernel(const ThetaParams& th) const;
};

struct GibbsState {
    std::vector<double> w;
    Partition cells;  // 1-based interval indices
    std::vector<double> jump_size, jump_loc;  // aligned with cells
    double mu = 0, beta = 0;
    ThetaParams theta;
};

struct SPathState {
    std::vector<double> w;
    SPath m;
    std::vector<double> jump_size, jump_loc;  // length n, valid where m[i] > 0
    double mu = 0, beta = 0;
    ThetaParams theta;
};

struct SweepStats {
    double w_accept = 0;
    double move_accept = 0;
    bool theta_accept = false;
};

// log of the mixing-conditional joint density
//   [sum_partitions prod_j theta(C_j|w)] e^{-Lambda(Omega)} prod_i N(X_i | ...)
// via full partition enumeration (n <= 8) ...
double loglik_partition_sum(const std::vector<double>& X, const std::vector<double>& w,
                            const ReturnParams& ret, const OuKernel& K);
// ... and the same density via s-paths, a_n sum_m c(m) prod_i phi(i, m_i),
// including the preimage multiplicity c(m) (n <= 12)
double loglik_spath_sum(const std::vector<double>& X, const std::vector<double>& w,
                        const ReturnParams& ret, const OuKernel& K);

// seating log-weights for `idx`: [0] opens a new cell, [j+1] joins cells[j]
// (theta ratios with jumps marginalized out)
std::vector<double> crp_seat_logweights(OuTable& tab, const Partition& cells, int idx);

SweepStats gibbs_sweep(GibbsState& st, const std::vector<double>& X,
                       const ChainContext& ctx, const Priors& pr, const UpdateFlags& up,
                       const StepSizes& step, RandomSource& rng);

// one-unit s-path move (1-based interval indices). nullopt when the source
// is empty or the result leaves the path space; otherwise the proposed path
// and its log acceptance ratio under the target prod_i phi(i, m_i | w).
std::optional<std::pair<SPath, double>> spath_mh_move(const SPath& m, int i_from,
                                                      int i_to, OuTable& tab);

SweepStats spath_sweep(SPathState& st, const std::vector<double>& X,
                       const ChainContext& ctx, const Priors& pr, const UpdateFlags& up,
                       const StepSizes& step, RandomSource& rng);

struct TraceRow {
    double mu = 0, beta = 0, alpha = 0, b = 0, lam = 0;
    int n_cells = 0;
    double loglik = 0;  // conditional data log density given the state
    double acc_w = 0, acc_move = 0;
    int acc_theta = 0;
};

// per-draw latent snapshot, self-contained for prediction
struct LatentDraw {
    std::vector<double> w;
    std::vector<int> cell_min, cell_size;
    std::vector<double> jump_size, jump_loc;
    double mu = 0, beta = 0;
    ThetaParams theta;
};

struct RunConfig {
    ChainContext ctx;
    ReturnParams ret;  // ret.dt must equal ctx.delta
    ThetaParams theta0;
    Priors priors;
    UpdateFlags update;
    StepSizes steps;
    SamplerKind sampler = SamplerKind::partition;
    int iters = 500;   // recorded rows per chain
    int burnin = 100;  // discarded sweeps
    int thin = 1;
    int chains = 1;
    std::uint64_t seed = 1;
};

struct ChainTrace {
    std::vector<TraceRow> rows;
    std::vector<LatentDraw> latents;
};

// one chain; stream = 1 + chain_index. Requires the standard exponent pair
// and a gen-Gamma family with b > 0.
ChainTrace run_chain(const std::vector<double>& X, const RunConfig& cfg, int chain_index);

struct PredictiveResult {
    std::vector<double> x, density, se;
    double grid_integral = 0;
};

// posterior predictive density of the next increment of length `horizon` on
// an equispaced grid, averaged over posterior draws; per-point Monte Carlo
// standard errors and the trapezoid grid integral for the mass check.
PredictiveResult predictive_density(const std::vector<LatentDraw>& draws,
                                    const RunConfig& cfg, double x_lo, double x_hi,
                                    int count, double horizon);

struct TauMeanResult {
    double mean = 0, se = 0;
};

// posterior mean of accumulated volatility tau(0, t]
TauMeanResult posterior_tau_mean(const std::vector<LatentDraw>& draws,
                                 const RunConfig& cfg, double t);

// Geyer initial-monotone-sequence effective sample size
double effective_sample_size(const std::vector<double>& series);

}  // namespace ghsv
