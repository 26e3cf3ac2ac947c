#pragma once
#include <cstdint>
#include <string>

#include "ghsv/inference.hpp"
#include "ghsv/levy.hpp"

namespace ghsv {

// parsed "model" block: jump family, kernel, and return parameters
struct ModelConfig {
    double lam = 1.0;
    double alpha = 0.0;
    double b = 1.0;
    double mu = 0.0;
    std::vector<double> betas{0.0};
    std::vector<double> exponents{0.5, 1.0};
    EtaDensity eta = EtaDensity::one();
    std::string eta_desc = "const";
};

struct DataConfig {
    std::string path;  // returns CSV for fit
    double delta = 1.0;
    int n = 0;  // series length; required by simulate, derived from data otherwise
};

struct McmcConfig {
    int iters = 500;
    int burnin = 100;
    int thin = 1;
    int chains = 1;
    std::uint64_t seed = 1;
    SamplerKind sampler = SamplerKind::partition;
    UpdateFlags update;
    StepSizes steps;
    Priors priors;
};

struct SimExtras {
    double eps = 0.0;
    double window_tol = 1e-6;
};

struct OutputConfig {
    std::string dir = ".";
};

struct AppConfig {
    ModelConfig model;
    DataConfig data;
    McmcConfig mcmc;
    QuadratureConfig numerics;
    SimExtras sim;
    OutputConfig output;
};

// Parse and validate the versioned JSON config (top-level "schema": 1).
// Unknown keys anywhere are an error so typos cannot silently fall back to
// defaults. Throws DomainError with a path-qualified message.
AppConfig load_config(const std::string& path);
AppConfig parse_config_text(const std::string& text, const std::string& origin);

ReturnParams return_params(const ModelConfig& m, double delta);

}  // namespace ghsv
