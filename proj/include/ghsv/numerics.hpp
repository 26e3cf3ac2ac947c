#pragma once
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "ghsv/errors.hpp"

namespace ghsv {

struct QuadratureConfig {
    int nodes = 12;        // Gauss-Legendre order per panel
    int init_panels = 4;   // starting panel count (even, >= 2)
    int max_panels = 1024; // doubling cap; exceeded -> QuadratureError
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
};

struct IntegralResult {
    double value = 0;
    double error_estimate = 0; // |I_P - I_2P| at acceptance
    int panels = 0;
};

// Nodes/weights of m-point Gauss-Legendre on [-1,1], Newton-iterated and
// cached per order. Returned by value is avoided; the cache entry is stable.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_nodes(int m);

namespace detail {

// Panel mesh graded geometrically (ratio 2) toward both endpoints, so
// integrable endpoint singularities converge under panel doubling.
std::vector<double> graded_mesh(double a, double b, int panels);

template <class F>
double fixed_mesh_integral(F&& f, const std::vector<double>& mesh, int m) {
    const auto& [x, w] = gauss_legendre_nodes(m);
    double total = 0;
    for (std::size_t p = 0; p + 1 < mesh.size(); ++p) {
        const double c = 0.5 * (mesh[p] + mesh[p + 1]);
        const double h = 0.5 * (mesh[p + 1] - mesh[p]);
        double s = 0;
        for (int k = 0; k < m; ++k) s += w[k] * f(c + h * x[k]);
        total += h * s;
    }
    return total;
}

}  // namespace detail

// Composite Gauss-Legendre on [a,b] with endpoint-graded mesh and panel
// doubling until |I_P - I_2P| <= max(abs_tol, rel_tol*|I_2P|). Throws
// QuadratureError (carrying the last estimate and gap) at the panel cap.
template <class F>
IntegralResult integrate_1d(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
    if (!(b >= a)) throw DomainError("integrate_1d: bad interval");
    if (a == b) return {0.0, 0.0, 0};
    int p = cfg.init_panels < 2 ? 2 : cfg.init_panels + (cfg.init_panels & 1);
    double prev = detail::fixed_mesh_integral(f, detail::graded_mesh(a, b, p), cfg.nodes);
    while (2 * p <= cfg.max_panels) {
        p *= 2;
        const double cur = detail::fixed_mesh_integral(f, detail::graded_mesh(a, b, p), cfg.nodes);
        const double gap = std::fabs(cur - prev);
        if (gap <= std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(cur)))
            return {cur, gap, p};
        prev = cur;
    }
    throw QuadratureError("integrate_1d: panel cap reached before convergence",
                          prev, std::fabs(prev));
}

// integral over (-inf, b]: fixed-width slabs marching left, each integrated
// adaptively, stopping when a slab contributes below tolerance (integrands
// here decay exponentially in y).
template <class F>
double integrate_left_tail(F&& f, double b, const QuadratureConfig& cfg = {},
                           double slab = 16.0, int max_slabs = 64) {
    double total = 0, hi = b;
    for (int k = 0; k < max_slabs; ++k) {
        const double piece = integrate_1d(f, hi - slab, hi, cfg).value;
        total += piece;
        if (std::fabs(piece) <= 0.5 * std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total)))
            return total;
        hi -= slab;
    }
    throw QuadratureError("integrate_left_tail: no decay after max_slabs", total,
                          std::fabs(total));
}

// log of the integral of exp(logf) over [a,b]; the integrand is centered on
// the max of a coarse probe so huge log scales never overflow.
double log_integrate_1d(const std::function<double(double)>& logf, double a, double b,
                        const QuadratureConfig& cfg = {});

// Moment <-> cumulant conversion:
//   m_l = sum_{k=1..l} C(l-1,k-1) kappa_k m_{l-k},  m_0 = 1
// solved forward for cumulants or moments. Index 0 of the inputs is the
// first moment/cumulant.
std::vector<double> thiele_cumulants(const std::vector<double>& moments);
std::vector<double> thiele_moments(const std::vector<double>& cumulants);

double binomial(int n, int k);

// max-shifted log(sum(exp(v))); empty input -> -inf
double log_sum_exp(const std::vector<double>& v);

// log(1 - e^{-x}) for x > 0, accurate for both tiny and large x
inline double log1mexp(double x) {
    return x > 0.6931471805599453 ? std::log1p(-std::exp(-x))
                                  : std::log(-std::expm1(-x));
}

}  // namespace ghsv
