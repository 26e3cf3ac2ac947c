#include "ghsv/levy.hpp"

#include <algorithm>
#include <cmath>

#include "ghsv/errors.hpp"

namespace ghsv {

double LevyFamily::tilted_kappa(int l, double s) const {
    return std::exp(log_tilted_kappa(l, s));
}

GenGammaFamily::GenGammaFamily(double alpha, double b) : alpha_(alpha), b_(b) {
    const bool stable_side = alpha > 0 && alpha < 1 && b >= 0;
    const bool finite_side = alpha <= 0 && b > 0;
    if (!stable_side && !finite_side)
        throw DomainError("GenGammaFamily: need 0<alpha<1, b>=0 or alpha<=0, b>0");
}

double GenGammaFamily::psi(double s) const {
    if (s < 0) throw DomainError("psi: s must be >= 0");
    if (s == 0) return 0.0;
    if (alpha_ == 0) return std::log1p(s / b_);
    return (std::pow(b_ + s, alpha_) - std::pow(b_, alpha_)) / alpha_;
}

double GenGammaFamily::log_tilted_kappa(int l, double s) const {
    if (l < 1) throw DomainError("log_tilted_kappa: l must be >= 1");
    if (s < 0) throw DomainError("log_tilted_kappa: s must be >= 0");
    const double bs = b_ + s;
    if (!(bs > 0)) throw DomainError("log_tilted_kappa: diverges at b + s = 0");
    return std::lgamma(l - alpha_) - std::lgamma(1.0 - alpha_) -
           (l - alpha_) * std::log(bs);
}

std::optional<double> GenGammaFamily::total_mass() const {
    if (alpha_ < 0) return std::pow(b_, alpha_) / (-alpha_);
    return std::nullopt;
}

double GenGammaFamily::mass_above(double eps) const {
    if (eps < 0) throw DomainError("mass_above: eps must be >= 0");
    if (eps == 0) {
        auto m = total_mass();
        if (!m) throw DomainError("mass_above: infinite activity needs eps > 0");
        return *m;
    }
    const double lg = std::lgamma(1.0 - alpha_);
    if (b_ == 0)  // only reachable with 0 < alpha < 1
        return std::pow(eps, -alpha_) / (alpha_ * std::exp(lg));
    // integrand decays like e^{-bu}; cut where the exponential has killed it
    const double hi = eps + (60.0 + 10.0 * std::fabs(alpha_ + 1.0)) / b_;
    auto f = [&](double u) {
        return std::exp(-(alpha_ + 1.0) * std::log(u) - b_ * u - lg);
    };
    return integrate_1d(f, eps, hi).value;
}

double GenGammaFamily::mean_mass_below(double eps) const {
    if (eps < 0) throw DomainError("mean_mass_below: eps must be >= 0");
    if (eps == 0) return 0.0;
    // u = eps z^{1/(1-alpha)} removes the u^{-alpha} singularity exactly
    const double p = 1.0 / (1.0 - alpha_);
    auto f = [&](double z) { return std::exp(-b_ * eps * std::pow(z, p)); };
    const double base = integrate_1d(f, 0.0, 1.0).value;
    return std::pow(eps, 1.0 - alpha_) * p * base / std::exp(std::lgamma(1.0 - alpha_));
}

double GenGammaFamily::sample_size(RandomSource& rng, double eps) const {
    if (eps < 0) throw DomainError("sample_size: eps must be >= 0");
    if (alpha_ < 0) {
        if (eps == 0) return rng.gamma(-alpha_, b_);
        // finite activity with a floor: condition the Gamma draw
        for (int it = 0; it < 200000; ++it) {
            const double u = rng.gamma(-alpha_, b_);
            if (u >= eps) return u;
        }
        throw DomainError("sample_size: truncation floor too deep in the tail");
    }
    if (eps == 0) throw DomainError("sample_size: infinite activity needs eps > 0");
    if (b_ == 0) return eps * std::pow(rng.uniform(), -1.0 / alpha_);  // Pareto inverse CDF
    // two-piece envelope for 0 <= alpha < 1, b > 0:
    // power law u^{-alpha-1} on [eps, max(eps,1)], exponential beyond
    const double c = std::max(eps, 1.0);
    double m1 = 0.0;
    if (eps < 1.0)
        m1 = std::exp(-b_ * eps) * (alpha_ == 0 ? std::log(1.0 / eps)
                                                : (std::pow(eps, -alpha_) - 1.0) / alpha_);
    const double m2 = std::pow(c, -alpha_ - 1.0) * std::exp(-b_ * c) / b_;
    for (int it = 0; it < 200000; ++it) {
        if (rng.uniform() * (m1 + m2) < m1) {
            const double r = rng.uniform();
            const double u =
                alpha_ == 0 ? std::pow(eps, 1.0 - r)
                            : std::pow((1.0 - r) * std::pow(eps, -alpha_) + r, -1.0 / alpha_);
            if (std::log(rng.uniform()) < -b_ * (u - eps)) return u;
        } else {
            const double u = c + rng.exponential(b_);
            if (std::log(rng.uniform()) < -(alpha_ + 1.0) * std::log(u / c)) return u;
        }
    }
    throw DomainError("sample_size: rejection cap hit");
}

DensitySpecifiedFamily::DensitySpecifiedFamily(std::function<double(double)> f_T,
                                               double t_hint, QuadratureConfig cfg)
    : f_(std::move(f_T)), t_hint_(t_hint), cfg_(cfg) {
    if (!f_) throw DomainError("DensitySpecifiedFamily: null density");
    if (!(t_hint_ > 0)) throw DomainError("DensitySpecifiedFamily: t_hint must be > 0");
}

double DensitySpecifiedFamily::tail_integral(int l, double s) const {
    double hi = t_hint_;
    auto g = [&](double t) { return std::pow(t, l) * std::exp(-s * t) * f_(t); };
    double total = integrate_1d(g, 0.0, hi, cfg_).value;
    double prev_inc = std::fabs(total);
    for (int k = 0; k < 60; ++k) {
        const double inc = integrate_1d(g, hi, 2.0 * hi, cfg_).value;
        total += inc;
        hi *= 2.0;
        const double tol = std::max(cfg_.abs_tol, cfg_.rel_tol * std::fabs(total));
        if (std::fabs(inc) <= tol && prev_inc <= tol) return total;
        if (k > 8 && std::fabs(inc) > prev_inc && std::fabs(inc) > tol)
            break;  // increments growing: moment does not exist
        prev_inc = std::fabs(inc);
    }
    throw DomainError("DensitySpecifiedFamily: divergent moment integral");
}

double DensitySpecifiedFamily::psi(double s) const {
    if (s < 0) throw DomainError("psi: s must be >= 0");
    return -std::log(tail_integral(0, s));
}

double DensitySpecifiedFamily::tilted_moment(int l, double s) const {
    if (l < 1) throw DomainError("tilted_moment: l must be >= 1");
    return tail_integral(l, s) / tail_integral(0, s);
}

double DensitySpecifiedFamily::log_tilted_kappa(int l, double s) const {
    std::vector<double> m(l);
    for (int j = 1; j <= l; ++j) m[j - 1] = tilted_moment(j, s);
    const double kap = thiele_cumulants(m)[l - 1];
    if (!(kap > 0))
        throw DomainError("DensitySpecifiedFamily: non-positive cumulant at this order");
    return std::log(kap);
}

double DensitySpecifiedFamily::mass_above(double) const {
    throw UnsupportedError("DensitySpecifiedFamily: no pointwise Levy mass");
}
double DensitySpecifiedFamily::mean_mass_below(double) const {
    throw UnsupportedError("DensitySpecifiedFamily: no pointwise Levy mass");
}
double DensitySpecifiedFamily::sample_size(RandomSource&, double) const {
    throw UnsupportedError("DensitySpecifiedFamily: cannot simulate jumps");
}

namespace {

// inverse-CDF location draw for non-constant eta on a fixed grid
double sample_eta_location(const EtaDensity& eta, double lo, double hi,
                           RandomSource& rng) {
    constexpr int kCells = 4096;
    const double h = (hi - lo) / kCells;
    std::vector<double> cdf(kCells + 1, 0.0);
    for (int i = 0; i < kCells; ++i) {
        const double m = eta(lo + (i + 0.5) * h);
        if (m < 0) throw DomainError("eta must be non-negative");
        cdf[i + 1] = cdf[i] + m * h;
    }
    const double u = rng.uniform() * cdf[kCells];
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const int i = std::max<int>(1, static_cast<int>(it - cdf.begin())) - 1;
    const double within = (u - cdf[i]) / std::max(cdf[i + 1] - cdf[i], 1e-300);
    return lo + (i + within) * h;
}

}  // namespace

JumpSample sample_jumps(const LevyFamily& fam, double lo, double hi,
                        const EtaDensity& eta, double eps, RandomSource& rng) {
    if (!(hi > lo)) throw DomainError("sample_jumps: empty window");
    const double eta_mass =
        eta.is_const_one ? (hi - lo) : integrate_1d([&](double y) { return eta(y); }, lo, hi).value;
    const double rate = fam.mass_above(eps);
    JumpSample out;
    out.neglected_mean_mass = eps > 0 ? fam.mean_mass_below(eps) * eta_mass : 0.0;
    const long count = rng.poisson(rate * eta_mass);
    out.sizes.reserve(count);
    out.locations.reserve(count);
    for (long k = 0; k < count; ++k) {
        out.sizes.push_back(fam.sample_size(rng, eps));
        out.locations.push_back(eta.is_const_one ? rng.uniform(lo, hi)
                                                 : sample_eta_location(eta, lo, hi, rng));
    }
    return out;
}

}  // namespace ghsv
