#pragma once
#include <memory>
#include <vector>

#include "ghsv/distributions.hpp"
#include "ghsv/levy.hpp"
#include "ghsv/random.hpp"

namespace ghsv {

struct SimConfig {
    int n = 100;
    double delta = 1.0;
    double lam = 1.0;
    std::shared_ptr<const LevyFamily> family;
    EtaDensity eta = EtaDensity::one();
    ReturnParams ret;           // ret.dt must equal delta
    double eps = 0.0;           // size truncation; 0 allowed only with finite activity
    double window_tol = 1e-6;   // neglected pre-window decay target
};

struct SimOutput {
    std::vector<double> x;    // returns per interval
    std::vector<double> tau;  // integrated volatility per interval
    std::vector<double> jump_size, jump_loc;  // realized field on (-window, n delta]
    double v0 = 0;            // spot volatility level at time zero
    double window = 0;        // left window actually used
    double neglected_mean_mass = 0;
};

// window length so a unit jump before -window contributes less than tol of
// its mass to any interval (scaled by the mean jump mass when finite)
double default_window(const LevyFamily& fam, double tol);

// Exact generative pass: realize the jump field, accumulate each interval's
// volatility through the decay kernel, then draw the returns from their
// conditional Normals. tau == 0 intervals give the degenerate x = mu*dt.
SimOutput simulate_dataset(const SimConfig& cfg, RandomSource& rng);

}  // namespace ghsv
