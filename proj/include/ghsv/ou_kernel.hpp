#pragma once
#include <memory>
#include <unordered_map>
#include <vector>

#include "ghsv/levy.hpp"
#include "ghsv/numerics.hpp"
#include "ghsv/random.hpp"

namespace ghsv {

// Exponential-decay volatility kernel over n observation intervals of width
// delta. Interval i (1-based) accrues weight g_i(y) from a jump at location
// y <= i*delta; tilts of the jump measure always appear through
// Omega(y) = sum_i w_i g_i(y), which is piecewise
//   r_1 e^y                                  on y <= 0
//   w_i(1-e^{-lam(i d - y)})/lam + r_{i+1} e^{lam y}   on ((i-1)d, i d].
struct OuKernel {
    OuKernel(double lam, double delta, int n, std::shared_ptr<const LevyFamily> family,
             EtaDensity eta = EtaDensity::one(), QuadratureConfig quad = {});

    double lam = 1.0;
    double delta = 1.0;
    int n = 1;
    std::shared_ptr<const LevyFamily> family;
    EtaDensity eta;
    QuadratureConfig quad;        // oracle-grade tolerance
    QuadratureConfig piece_quad;  // per-piece hot path

    double g_weight(int i, double y) const;
    // log of a_1(i) = e^{-lam(i-1)delta}(1-e^{-lam delta})/lam, the y-free
    // factor each index contributes to a cell product
    double log_a1(int i) const;
    double log_a_total() const;  // sum over i = 1..n

    // accumulated-volatility kernel tau(0,t] and the forward kernel for the
    // next increment of length h starting at n*delta
    double g_cumulative(double t, double y) const;
    double g_forward(double h, double y) const;

    std::vector<double> r_weights(const std::vector<double>& w) const;

    double omega(double y, const std::vector<double>& w, const std::vector<double>& r) const;
    double omega_direct(double y, const std::vector<double>& w) const;  // plain sum

    struct LaplaceParts {
        double phi0 = 0;
        std::vector<double> phi;
        double total = 0;
    };
    // Laplace functional int psi(Omega(y)) eta(y) dy as tail + per-interval
    // pieces; phi0 through the u = e^y substitution, interval pieces in y.
    LaplaceParts laplace_decomposed(const std::vector<double>& w) const;
    double laplace(const std::vector<double>& w) const;
    // independent route: quadrature of psi(sum_i w_i g_i(y)) with no use of
    // the r/zeta algebra; the agreement test for the decomposition
    double laplace_direct(const std::vector<double>& w) const;

    // pieces entering both the Laplace parts and the w-update delta: phi0 and
    // phi_k depend on w only through (r_1) resp. (w_k, r_{k+1})
    double phi0_piece(double r1) const;
    double phi_piece(int k, const std::vector<double>& w, const std::vector<double>& r) const;

    // log shape(y | istar, e): the location factor of a cell with minimum
    // index istar and e members, prod_{i in C} g_i(y) = a(C) * shape(y);
    // -inf beyond istar*delta
    double cell_logshape(int istar, int e, double y) const;

    // unnormalized log location density of a cell's jump: shape(y|istar,e)
    // * kappa_e(Omega(y)) * eta(y); integrates to phi(istar, e | w)
    double location_logdensity(int istar, int e, const std::vector<double>& w,
                               const std::vector<double>& r, double y) const;

    void validate_index(int i) const;
};

// Lazy per-(kernel, w) cache of the piece integrals behind the cell
// integrals: tail piece T0(e), interior pieces M(k,e), own-interval piece
// Q(i,e), with log phi(i,e) their log-sum. Rebuild whenever w changes.
class OuTable {
  public:
    OuTable(const OuKernel& kernel, std::vector<double> w);

    const OuKernel& kernel() const { return *K_; }
    const std::vector<double>& w() const { return w_; }
    const std::vector<double>& r() const { return r_; }

    double log_T0(int e);
    double log_M(int k, int e);
    double log_Q(int i, int e);
    // log phi(i, e | w); phi(i, 0) = 1
    double log_phi(int i, int e);
    // log theta(C | w) = sum_{i in C} log a_1(i) + log phi(min C, |C|)
    double log_theta(const std::vector<int>& cell);
    double log_theta_ie(int istar, int e);  // without the a factors

    // piece-resolved masses for location sampling: index 0 the tail,
    // k in 1..istar the interval pieces
    std::vector<double> piece_log_masses(int istar, int e);
    double sample_location(RandomSource& rng, int istar, int e);

  private:
    const OuKernel* K_;
    std::vector<double> w_, r_;
    std::unordered_map<int, double> t0_, m_, q_, phi_;
};

}  // namespace ghsv
