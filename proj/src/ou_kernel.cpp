#include "ghsv/ou_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ghsv/errors.hpp"

namespace ghsv {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

OuKernel::OuKernel(double lam_, double delta_, int n_,
                   std::shared_ptr<const LevyFamily> family_, EtaDensity eta_,
                   QuadratureConfig quad_)
    : lam(lam_), delta(delta_), n(n_), family(std::move(family_)),
      eta(std::move(eta_)), quad(quad_) {
    if (!(lam > 0)) throw DomainError("OuKernel: lam must be positive");
    if (!(delta > 0)) throw DomainError("OuKernel: delta must be positive");
    if (n < 1) throw DomainError("OuKernel: n must be >= 1");
    if (!family) throw DomainError("OuKernel: null family");
    piece_quad = quad;
    piece_quad.init_panels = 2;
    piece_quad.max_panels = 256;
    piece_quad.rel_tol = std::min(quad.rel_tol, 1e-9);
    if (!eta.is_const_one) {
        // the stationary tail must keep the Laplace functional finite. In the
        // u = e^y coordinate divergence means per-octave mass f(u)*u that
        // fails to vanish as u -> 0; probe octaves down to the scale where
        // psi is still honestly evaluable (below ~2^-50, 1+u rounds to 1 and
        // the integrand silently underflows, hiding a growing eta from any
        // refinement-based quadrature).
        auto f = [&](double u) { return family->psi(u) * eta(std::log(u)) / u; };
        double total = 0, floor_mass = 0;
        for (int k = 1; k <= 45; ++k) {
            const double u = std::ldexp(1.0, -k);
            const double mass = f(u) * u;
            if (!std::isfinite(mass) || mass < 0)
                throw DomainError(
                    "OuKernel: eta tail makes the Laplace functional diverge");
            total += mass;
            if (k >= 44) floor_mass += mass;
        }
        if (!(floor_mass <= 1e-3 * total))
            throw DomainError("OuKernel: eta tail makes the Laplace functional diverge");
        try {
            integrate_1d([&](double u) { return u > 0 ? f(u) : 0.0; }, 0.0, 1.0, quad);
        } catch (const QuadratureError&) {
            throw DomainError("OuKernel: eta tail makes the Laplace functional diverge");
        }
    }
}

void OuKernel::validate_index(int i) const {
    if (i < 1 || i > n) throw DomainError("OuKernel: interval index out of range");
}

double OuKernel::log_a1(int i) const {
    validate_index(i);
    return -std::log(lam) - lam * (i - 1) * delta + log1mexp(lam * delta);
}

double OuKernel::log_a_total() const {
    // sum_i log a_1(i) has closed form: -n log lam + n log(1-e^{-lam d})
    // - lam d n(n-1)/2
    return n * (-std::log(lam) + log1mexp(lam * delta)) -
           lam * delta * 0.5 * n * (n - 1.0);
}

double OuKernel::g_weight(int i, double y) const {
    validate_index(i);
    if (y > i * delta) return 0.0;
    const double a1 = std::exp(log_a1(i));
    if (y <= 0) return a1 * std::exp(y);
    if (y <= (i - 1) * delta) return a1 * std::exp(lam * y);
    return -std::expm1(-lam * (i * delta - y)) / lam;
}

double OuKernel::g_cumulative(double t, double y) const {
    if (!(t > 0)) throw DomainError("g_cumulative: t must be positive");
    if (y > t) return 0.0;
    if (y <= 0) return -std::expm1(-lam * t) * std::exp(y) / lam;
    return -std::expm1(-lam * (t - y)) / lam;
}

double OuKernel::g_forward(double h, double y) const {
    if (!(h > 0)) throw DomainError("g_forward: horizon must be positive");
    const double T = n * delta;
    if (y > T + h) return 0.0;
    const double c = std::exp(-lam * T) * (-std::expm1(-lam * h)) / lam;
    if (y <= 0) return c * std::exp(y);
    if (y <= T) return c * std::exp(lam * y);
    return -std::expm1(-lam * (T + h - y)) / lam;
}

std::vector<double> OuKernel::r_weights(const std::vector<double>& w) const {
    if (static_cast<int>(w.size()) != n) throw DomainError("r_weights: w size mismatch");
    std::vector<double> r(n + 1, 0.0);
    const double scale = -std::expm1(-lam * delta) / lam;
    double suffix = 0.0;
    for (int i = n; i >= 1; --i) {
        if (w[i - 1] < 0) throw DomainError("r_weights: negative weight");
        suffix += w[i - 1] * std::exp(-lam * (i - 1) * delta);
        r[i - 1] = scale * suffix;
    }
    return r;
}

double OuKernel::omega(double y, const std::vector<double>& w,
                       const std::vector<double>& r) const {
    if (y > n * delta) return 0.0;
    if (y <= 0) return r[0] * std::exp(y);
    int i = static_cast<int>(std::ceil(y / delta));
    i = std::clamp(i, 1, n);
    return w[i - 1] * (-std::expm1(-lam * (i * delta - y))) / lam +
           r[i] * std::exp(lam * y);
}

double OuKernel::omega_direct(double y, const std::vector<double>& w) const {
    double s = 0.0;
    for (int i = 1; i <= n; ++i) s += w[i - 1] * g_weight(i, y);
    return s;
}

double OuKernel::phi0_piece(double r1) const {
    if (r1 == 0.0) return 0.0;
    auto f = [&](double u) {
        return family->psi(r1 * u) * eta(std::log(u)) / u;
    };
    return integrate_1d(f, 0.0, 1.0, quad).value;
}

double OuKernel::phi_piece(int k, const std::vector<double>& w,
                           const std::vector<double>& r) const {
    validate_index(k);
    auto f = [&](double y) {
        const double z = w[k - 1] * (-std::expm1(-lam * (k * delta - y))) / lam +
                         r[k] * std::exp(lam * y);
        return family->psi(z) * eta(y);
    };
    return integrate_1d(f, (k - 1) * delta, k * delta, piece_quad).value;
}

OuKernel::LaplaceParts OuKernel::laplace_decomposed(const std::vector<double>& w) const {
    LaplaceParts parts;
    const auto r = r_weights(w);
    parts.phi0 = phi0_piece(r[0]);
    parts.phi.resize(n);
    parts.total = parts.phi0;
    for (int k = 1; k <= n; ++k) {
        parts.phi[k - 1] = phi_piece(k, w, r);
        parts.total += parts.phi[k - 1];
    }
    return parts;
}

double OuKernel::laplace(const std::vector<double>& w) const {
    return laplace_decomposed(w).total;
}

double OuKernel::laplace_direct(const std::vector<double>& w) const {
    if (static_cast<int>(w.size()) != n) throw DomainError("laplace_direct: w size mismatch");
    auto f = [&](double y) { return family->psi(omega_direct(y, w)) * eta(y); };
    double total = integrate_left_tail(f, 0.0, quad);
    for (int k = 1; k <= n; ++k)
        total += integrate_1d(f, (k - 1) * delta, k * delta, quad).value;
    return total;
}

double OuKernel::cell_logshape(int istar, int e, double y) const {
    validate_index(istar);
    if (e < 1) throw DomainError("cell_logshape: cell size must be >= 1");
    if (y > istar * delta) return kNegInf;
    if (y <= 0) return e * y;
    if (y <= (istar - 1) * delta) return lam * e * y;
    const double gap = lam * (istar * delta - y);
    if (gap <= 0) return kNegInf;
    return log1mexp(gap) + lam * (e - 1.0) * y + lam * (istar - 1) * delta -
           log1mexp(lam * delta);
}

double OuKernel::location_logdensity(int istar, int e, const std::vector<double>& w,
                                     const std::vector<double>& r, double y) const {
    const double shape = cell_logshape(istar, e, y);
    if (!std::isfinite(shape)) return kNegInf;
    const double et = eta(y);
    if (!(et > 0)) return kNegInf;
    return shape + family->log_tilted_kappa(e, omega(y, w, r)) + std::log(et);
}

OuTable::OuTable(const OuKernel& kernel, std::vector<double> w)
    : K_(&kernel), w_(std::move(w)) {
    r_ = K_->r_weights(w_);
}

double OuTable::log_T0(int e) {
    auto it = t0_.find(e);
    if (it != t0_.end()) return it->second;
    const OuKernel& K = *K_;
    const double r1 = r_[0];
    auto logf = [&, e](double u) {
        const double et = K.eta(std::log(u));
        if (!(et > 0)) return kNegInf;
        return (e - 1.0) * std::log(u) + K.family->log_tilted_kappa(e, r1 * u) +
               std::log(et);
    };
    const double v = log_integrate_1d(logf, 0.0, 1.0, K.quad);
    t0_.emplace(e, v);
    return v;
}

double OuTable::log_M(int k, int e) {
    const int key = k * 1024 + e;
    auto it = m_.find(key);
    if (it != m_.end()) return it->second;
    const OuKernel& K = *K_;
    auto logf = [&, k, e](double y) {
        const double et = K.eta(y);
        if (!(et > 0)) return kNegInf;
        const double z = w_[k - 1] * (-std::expm1(-K.lam * (k * K.delta - y))) / K.lam +
                         r_[k] * std::exp(K.lam * y);
        return K.lam * e * y + K.family->log_tilted_kappa(e, z) + std::log(et);
    };
    const double v =
        log_integrate_1d(logf, (k - 1) * K.delta, k * K.delta, K.piece_quad);
    m_.emplace(key, v);
    return v;
}

double OuTable::log_Q(int i, int e) {
    const int key = i * 1024 + e;
    auto it = q_.find(key);
    if (it != q_.end()) return it->second;
    // location_logdensity is exactly the integrand on the own-interval piece
    const OuKernel& K = *K_;
    auto logf = [&, i, e](double y) { return K.location_logdensity(i, e, w_, r_, y); };
    const double v =
        log_integrate_1d(logf, (i - 1) * K.delta, i * K.delta, K.piece_quad);
    q_.emplace(key, v);
    return v;
}

double OuTable::log_phi(int i, int e) {
    K_->validate_index(i);
    if (e < 0) throw DomainError("log_phi: negative cell size");
    if (e == 0) return 0.0;
    const int key = i * 1024 + e;
    auto it = phi_.find(key);
    if (it != phi_.end()) return it->second;
    std::vector<double> pieces;
    pieces.reserve(i + 1);
    pieces.push_back(log_T0(e));
    for (int k = 1; k < i; ++k) pieces.push_back(log_M(k, e));
    pieces.push_back(log_Q(i, e));
    const double v = log_sum_exp(pieces);
    phi_.emplace(key, v);
    return v;
}

double OuTable::log_theta_ie(int istar, int e) { return log_phi(istar, e); }

double OuTable::log_theta(const std::vector<int>& cell) {
    if (cell.empty()) throw DomainError("log_theta: empty cell");
    double la = 0.0;
    int istar = cell.front();
    for (int i : cell) {
        la += K_->log_a1(i);
        istar = std::min(istar, i);
    }
    return la + log_phi(istar, static_cast<int>(cell.size()));
}

std::vector<double> OuTable::piece_log_masses(int istar, int e) {
    std::vector<double> masses;
    masses.reserve(istar + 1);
    masses.push_back(log_T0(e));
    for (int k = 1; k < istar; ++k) masses.push_back(log_M(k, e));
    masses.push_back(log_Q(istar, e));
    return masses;
}

double OuTable::sample_location(RandomSource& rng, int istar, int e) {
    const OuKernel& K = *K_;
    K.validate_index(istar);
    auto lmass = piece_log_masses(istar, e);
    const double shift = *std::max_element(lmass.begin(), lmass.end());
    std::vector<double> mass(lmass.size());
    for (std::size_t k = 0; k < lmass.size(); ++k) mass[k] = std::exp(lmass[k] - shift);
    const int piece = static_cast<int>(rng.discrete(mass));

    // 512-cell inverse CDF on the chosen piece; tail piece gridded in u=e^y
    constexpr int kCells = 512;
    std::vector<double> ld(kCells + 1);
    double lo, hi;
    bool in_u = false;
    if (piece == 0) {
        in_u = true;
        lo = 0.0;
        hi = 1.0;
        const double r1 = r_[0];
        for (int k = 0; k <= kCells; ++k) {
            const double u = lo + (hi - lo) * k / kCells;
            if (u <= 0) {
                ld[k] = e > 1 ? kNegInf
                              : K.family->log_tilted_kappa(e, 0.0) +
                                    std::log(std::max(K.eta(-740.0), 1e-300));
                continue;
            }
            const double et = K.eta(std::log(u));
            ld[k] = et > 0 ? (e - 1.0) * std::log(u) +
                                 K.family->log_tilted_kappa(e, r1 * u) + std::log(et)
                           : kNegInf;
        }
    } else {
        lo = (piece - 1) * K.delta;
        hi = piece * K.delta;
        for (int k = 0; k <= kCells; ++k) {
            const double y = lo + (hi - lo) * k / kCells;
            if (piece < istar) {
                const double et = K.eta(y);
                const double z =
                    w_[piece - 1] * (-std::expm1(-K.lam * (piece * K.delta - y))) / K.lam +
                    r_[piece] * std::exp(K.lam * y);
                ld[k] = et > 0 ? K.lam * e * y + K.family->log_tilted_kappa(e, z) +
                                     std::log(et)
                               : kNegInf;
            } else {
                ld[k] = K.location_logdensity(istar, e, w_, r_, y);
            }
        }
    }
    double mx = kNegInf;
    for (double v : ld) mx = std::max(mx, v);
    if (!std::isfinite(mx))
        throw DomainError("sample_location: vanished density on selected piece");
    std::vector<double> cdf(kCells + 1, 0.0);
    const double h = (hi - lo) / kCells;
    for (int k = 1; k <= kCells; ++k) {
        const double f0 = std::exp(ld[k - 1] - mx), f1 = std::exp(ld[k] - mx);
        cdf[k] = cdf[k - 1] + 0.5 * (f0 + f1) * h;
    }
    const double target = rng.uniform() * cdf[kCells];
    int cell = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), target) -
                                cdf.begin()) - 1;
    cell = std::clamp(cell, 0, kCells - 1);
    const double within =
        (target - cdf[cell]) / std::max(cdf[cell + 1] - cdf[cell], 1e-300);
    const double pos = lo + (cell + within) * h;
    if (in_u) return std::log(std::max(pos, 1e-300));
    return pos;
}

}  // namespace ghsv
