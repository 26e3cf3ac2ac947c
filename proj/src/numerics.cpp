#include "ghsv/numerics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace ghsv {

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_nodes(int m) {
    if (m < 2 || m > 64) throw DomainError("gauss_legendre_nodes: order out of range");
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;

    std::vector<double> x(m), w(m);
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess, then Newton on P_m
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double pp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = m * (z * p0 - p1) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p0 / pp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return cache.emplace(m, std::make_pair(std::move(x), std::move(w))).first->second;
}

namespace detail {

std::vector<double> graded_mesh(double a, double b, int panels) {
    const int half = panels / 2;
    const double mid = 0.5 * (a + b);
    const double w = mid - a;
    std::vector<double> pts;
    pts.reserve(panels + 1);
    pts.push_back(a);
    for (int k = half - 1; k >= 1; --k) pts.push_back(a + w * std::ldexp(1.0, -k));
    pts.push_back(mid);
    for (int k = 1; k <= half - 1; ++k) pts.push_back(b - w * std::ldexp(1.0, -k));
    pts.push_back(b);
    return pts;
}

}  // namespace detail

double log_integrate_1d(const std::function<double(double)>& logf, double a, double b,
                        const QuadratureConfig& cfg) {
    if (a == b) return -std::numeric_limits<double>::infinity();
    double shift = -std::numeric_limits<double>::infinity();
    // probe interior points only: endpoints may carry integrable log
    // singularities of either sign
    for (int k = 0; k < 9; ++k)
        shift = std::max(shift, logf(a + (b - a) * (k + 0.5) / 9.0));
    if (!std::isfinite(shift)) {
        // pieces can be identically zero (e.g. kernel support edge)
        if (shift < 0) return shift;
        throw DomainError("log_integrate_1d: non-finite log-integrand probe");
    }
    const double v =
        integrate_1d([&](double y) { return std::exp(logf(y) - shift); }, a, b, cfg).value;
    if (!(v > 0)) return -std::numeric_limits<double>::infinity();
    return shift + std::log(v);
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<double> thiele_cumulants(const std::vector<double>& moments) {
    const int L = static_cast<int>(moments.size());
    std::vector<double> kap(L);
    for (int l = 1; l <= L; ++l) {
        double s = moments[l - 1];
        for (int k = 1; k <= l - 1; ++k)
            s -= binomial(l - 1, k - 1) * kap[k - 1] * moments[l - k - 1];
        kap[l - 1] = s;
    }
    return kap;
}

std::vector<double> thiele_moments(const std::vector<double>& cumulants) {
    const int L = static_cast<int>(cumulants.size());
    std::vector<double> m(L);
    for (int l = 1; l <= L; ++l) {
        double s = cumulants[l - 1];
        for (int k = 1; k <= l - 1; ++k)
            s += binomial(l - 1, k - 1) * cumulants[k - 1] * m[l - k - 1];
        m[l - 1] = s;
    }
    return m;
}

double log_sum_exp(const std::vector<double>& v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

}  // namespace ghsv
