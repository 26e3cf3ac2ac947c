#include "ghsv/simulation.hpp"

#include <cmath>

#include "ghsv/errors.hpp"
#include "ghsv/ou_kernel.hpp"

namespace ghsv {

double default_window(const LevyFamily& fam, double tol) {
    if (!(tol > 0) || !(tol < 1)) throw DomainError("default_window: tol must be in (0,1)");
    double scale = 1.0;
    const double mean_mass = fam.tilted_kappa(1, 0.0);
    if (std::isfinite(mean_mass) && mean_mass > 1.0) scale = mean_mass;
    return std::log(scale / tol);
}

SimOutput simulate_dataset(const SimConfig& cfg, RandomSource& rng) {
    if (cfg.n < 1) throw DomainError("simulate_dataset: n must be >= 1");
    if (!cfg.family) throw DomainError("simulate_dataset: null family");
    cfg.ret.validate();
    if (std::fabs(cfg.ret.dt - cfg.delta) > 1e-12 * std::max(1.0, cfg.delta))
        throw DomainError("simulate_dataset: return dt must equal the interval width");

    const OuKernel K(cfg.lam, cfg.delta, cfg.n, cfg.family, cfg.eta);
    const double window = default_window(*cfg.family, cfg.window_tol);

    SimOutput out;
    out.window = window;
    JumpSample field =
        sample_jumps(*cfg.family, -window, cfg.n * cfg.delta, cfg.eta, cfg.eps, rng);
    out.jump_size = std::move(field.sizes);
    out.jump_loc = std::move(field.locations);
    out.neglected_mean_mass = field.neglected_mean_mass;

    out.tau.assign(cfg.n, 0.0);
    for (std::size_t j = 0; j < out.jump_size.size(); ++j) {
        const double u = out.jump_size[j], y = out.jump_loc[j];
        if (y <= 0) out.v0 += u * std::exp(y);
        for (int i = 1; i <= cfg.n; ++i) out.tau[i - 1] += u * K.g_weight(i, y);
    }

    out.x.resize(cfg.n);
    for (int i = 0; i < cfg.n; ++i)
        out.x[i] = sample_return(rng, out.tau[i], cfg.ret);
    return out;
}

}  // namespace ghsv
