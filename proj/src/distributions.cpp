#include "ghsv/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ghsv/errors.hpp"

namespace ghsv {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;
}  // namespace

double normal_logpdf(double x, double mean, double var) {
    if (!(var > 0)) throw DomainError("normal_logpdf: variance must be positive");
    const double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

double log_bessel_k_half(double order, double z) {
    if (!(z > 0)) throw DomainError("log_bessel_k_half: argument must be positive");
    const double a = std::fabs(order);
    const double nr = a - 0.5;
    const int n = static_cast<int>(std::lround(nr));
    if (n < 0 || std::fabs(nr - n) > 1e-9)
        throw DomainError("log_bessel_k_half: order must be half-integer");
    // K_{n+1/2}(z) = sqrt(pi/(2z)) e^{-z} sum_k (n+k)!/(k!(n-k)!) (2z)^{-k}
    std::vector<double> terms(n + 1);
    const double l2z = std::log(2.0 * z);
    for (int k = 0; k <= n; ++k)
        terms[k] = std::lgamma(n + k + 1.0) - std::lgamma(k + 1.0) -
                   std::lgamma(n - k + 1.0) - k * l2z;
    return 0.5 * (std::log(std::numbers::pi) - l2z) - z + log_sum_exp(terms);
}

double gig_logpdf(double t, double lam, double delta, double v) {
    if (delta < 0 || v < 0) throw DomainError("gig_logpdf: delta, v must be >= 0");
    if (!(t > 0)) return kNegInf;
    if (delta == 0 && v == 0) throw DomainError("gig_logpdf: delta and v both zero");
    if (delta == 0) {
        if (!(lam > 0)) throw DomainError("gig_logpdf: delta=0 requires lam > 0");
        const double rate = 0.5 * v * v;
        return lam * std::log(rate) - std::lgamma(lam) + (lam - 1.0) * std::log(t) -
               rate * t;
    }
    if (v == 0) {
        if (!(lam < 0)) throw DomainError("gig_logpdf: v=0 requires lam < 0");
        const double a = -lam, b = 0.5 * delta * delta;
        return a * std::log(b) - std::lgamma(a) + (lam - 1.0) * std::log(t) - b / t;
    }
    return lam * std::log(v / delta) - std::numbers::ln2 -
           log_bessel_k_half(std::fabs(lam), delta * v) + (lam - 1.0) * std::log(t) -
           0.5 * (delta * delta / t + v * v * t);
}

namespace {

// GIG(-1/2, delta, v): inverse Gaussian with mean delta/v and shape delta^2,
// drawn by root selection on the squared-Normal equation. The root is written
// as a quotient so it stays positive under cancellation.
double sample_inverse_gaussian(RandomSource& rng, double delta, double v) {
    const double mu = delta / v, shape = delta * delta;
    const double y = [&] {
        const double z = rng.normal();
        return z * z;
    }();
    const double s = std::sqrt(mu * y);
    const double q = std::sqrt(4.0 * shape + mu * y);
    const double x = mu * (q - s) / (q + s);
    return rng.uniform() * (mu + x) < mu ? x : mu * mu / x;
}

// Interior case by mode-shifted ratio of uniforms on the standardized density
// h(x) = x^{lam-1} e^{-om(x+1/x)/2}, om = delta*v, t = (delta/v) x. The
// bounding box is found numerically and then inflated; a box that is too
// large only costs retries, never exactness.
double gig_sample_rou(RandomSource& rng, double lam, double om, double scale) {
    const double m = ((lam - 1.0) + std::hypot(lam - 1.0, om)) / om;  // mode
    auto log_h = [&](double x) {
        return (lam - 1.0) * std::log(x) - 0.5 * om * (x + 1.0 / x);
    };
    const double log_hm = log_h(m);

    // maximize ln s + (log_h(x(s)) - log_hm)/2 over the offset s = |x - m|
    auto bound = [&](bool upper) {
        auto g = [&](double s) {
            const double x = upper ? m + s : m - s;
            if (!(x > 0)) return kNegInf;
            return std::log(s) + 0.5 * (log_h(x) - log_hm);
        };
        double best_s = m * 1e-9, best = g(best_s);
        const double s_cap = upper ? m * 1e9 : m * (1.0 - 1e-12);
        for (double s = m * 2e-9; s <= s_cap; s *= 1.5) {
            const double val = g(s);
            if (val > best) {
                best = val;
                best_s = s;
            }
            if (upper && s > m && val < best - 80.0) break;
        }
        double a = best_s / 1.5, b = std::min(best_s * 1.5, s_cap);
        for (int it = 0; it < 60; ++it) {
            const double x1 = a + (b - a) / 3.0, x2 = b - (b - a) / 3.0;
            if (g(x1) < g(x2))
                a = x1;
            else
                b = x2;
        }
        return 1.5 * std::exp(std::max(best, g(0.5 * (a + b))));
    };
    const double whi = bound(true), wlo = -bound(false);

    for (long it = 0; it < 10000000L; ++it) {
        const double u = rng.uniform();
        const double x = rng.uniform(wlo, whi) / u + m;
        if (x <= 0) continue;
        if (2.0 * std::log(u) <= log_h(x) - log_hm) return scale * x;
    }
    throw DomainError("gig_sample: ratio-of-uniforms cap hit");
}

}  // namespace

double gig_sample(RandomSource& rng, double lam, double delta, double v) {
    if (delta < 0 || v < 0) throw DomainError("gig_sample: delta, v must be >= 0");
    if (delta == 0 && v == 0) throw DomainError("gig_sample: delta and v both zero");
    if (delta == 0) {
        if (!(lam > 0)) throw DomainError("gig_sample: delta=0 requires lam > 0");
        return rng.gamma(lam, 0.5 * v * v);
    }
    if (v == 0) {
        if (!(lam < 0)) throw DomainError("gig_sample: v=0 requires lam < 0");
        return rng.inverse_gamma(-lam, 0.5 * delta * delta);
    }
    if (lam == 0) throw DomainError("gig_sample: interior lam=0 not supported");
    if (lam == -0.5) return sample_inverse_gaussian(rng, delta, v);
    if (lam == 0.5) return 1.0 / sample_inverse_gaussian(rng, v, delta);
    if (lam < 0) return 1.0 / gig_sample(rng, -lam, v, delta);
    return gig_sample_rou(rng, lam, delta * v, delta / v);
}

ReturnParams ReturnParams::standard(double mu, double beta, double dt) {
    ReturnParams p;
    p.mu = mu;
    p.dt = dt;
    p.betas = {beta};
    p.exponents = {0.5, 1.0};
    return p;
}

bool ReturnParams::is_standard() const {
    return betas.size() == 1 && exponents.size() == 2 && exponents[0] == 0.5 &&
           exponents[1] == 1.0;
}

void ReturnParams::validate() const {
    if (!(dt > 0)) throw DomainError("ReturnParams: dt must be positive");
    if (exponents.size() != betas.size() + 1)
        throw DomainError("ReturnParams: need exponents for noise plus each beta");
    if (!(exponents[0] > 0)) throw DomainError("ReturnParams: noise exponent must be > 0");
    for (double e : exponents)
        if (!std::isfinite(e)) throw DomainError("ReturnParams: non-finite exponent");
    for (double b : betas)
        if (!std::isfinite(b)) throw DomainError("ReturnParams: non-finite beta");
}

void conditional_moments(const ReturnParams& p, double w, double& mean, double& var) {
    if (!(w > 0)) throw DomainError("conditional_moments: w must be positive");
    mean = p.mu * p.dt;
    for (std::size_t j = 0; j < p.betas.size(); ++j)
        mean += p.betas[j] * std::pow(w, -p.exponents[j + 1]);
    const double sd = std::pow(w, -p.exponents[0]);
    var = sd * sd;
}

double ghsv_logpdf(double x, double tau, const ReturnParams& p) {
    p.validate();
    if (!p.is_standard())
        throw DomainError("ghsv_logpdf: closed form needs standard exponents (1/2, 1)");
    if (!(tau > 0)) throw DomainError("ghsv_logpdf: tau must be positive");
    const double beta = p.betas[0];
    const double A = x - p.mu * p.dt;
    const double s = std::sqrt(2.0 * tau + A * A);
    const double bs = std::fabs(beta) * s;
    return std::log(tau) + A * beta - bs + std::log1p(bs) - 3.0 * std::log(s);
}

double ghsv_logpdf_via_mixture(double x, double tau, const ReturnParams& p,
                               const QuadratureConfig& cfg) {
    p.validate();
    if (!(tau > 0)) throw DomainError("ghsv_logpdf_via_mixture: tau must be positive");
    const double ltau = std::log(tau);
    auto logh = [&](double w) {
        if (!(w > 0)) return kNegInf;
        double mean, var;
        conditional_moments(p, w, mean, var);
        return normal_logpdf(x, mean, var) + ltau - w * tau;
    };
    // bracket the integrand peak on a geometric scan, then widen until the
    // log integrand has dropped far below it on both sides
    double w_pk = 1.0, best = kNegInf;
    for (int k = -60; k <= 60; ++k) {
        const double w = std::exp(0.25 * k);
        const double l = logh(w);
        if (l > best) {
            best = l;
            w_pk = w;
        }
    }
    if (!std::isfinite(best))
        throw DomainError("ghsv_logpdf_via_mixture: integrand vanished everywhere probed");
    const double drop = 60.0;
    double w_lo = w_pk;
    for (int k = 0; k < 80 && logh(w_lo) > best - drop; ++k) w_lo *= 0.5;
    if (logh(w_lo) > best - drop) w_lo = 0.0;
    double w_hi = w_pk;
    for (int k = 0; k < 200 && logh(w_hi) > best - drop; ++k) w_hi *= 1.5;
    const double left = log_integrate_1d(logh, w_lo, w_pk, cfg);
    const double right = log_integrate_1d(logh, w_pk, w_hi, cfg);
    return log_sum_exp({left, right});
}

double sample_return(RandomSource& rng, double tau, const ReturnParams& p) {
    p.validate();
    if (tau < 0) throw DomainError("sample_return: tau must be >= 0");
    if (tau == 0) return p.mu * p.dt;  // no volatility accrued: degenerate return
    const double z = rng.exponential(1.0);
    double mean, var;
    conditional_moments(p, z / tau, mean, var);
    return mean + std::sqrt(var) * rng.normal();
}

}  // namespace ghsv
