#pragma once
#include <vector>

#include "ghsv/numerics.hpp"
#include "ghsv/random.hpp"

namespace ghsv {

double normal_logpdf(double x, double mean, double var);

// log K_{order}(z) for half-integer order (order = n + 1/2, n >= 0); uses the
// finite closed-form sum, stable for small z via log-sum-exp. K is symmetric
// in the order's sign; pass the magnitude.
double log_bessel_k_half(double order, double z);

// Generalized inverse Gaussian log density,
//   f(t) ~ t^{lam-1} exp(-(delta^2/t + v^2 t)/2),
// with the three regimes: interior (delta>0, v>0; half-integer |lam| only),
// Gamma boundary (delta=0, lam>0), inverse-Gamma boundary (v=0, lam<0).
double gig_logpdf(double t, double lam, double delta, double v);

// Exact draw. Boundary regimes map to Gamma / inverse-Gamma; the interior
// uses a Gamma envelope with acceptance exp(-delta^2/(2t)) (negative orders
// via the 1/T reflection). Interior lam == 0 is not supported.
double gig_sample(RandomSource& rng, double lam, double delta, double v);

// Parameters of one return increment. exponents[0] is the noise exponent
// a_0 (conditional sd = (tau/Z)^{a_0}); exponents[j] pairs with betas[j-1]
// in the conditional mean mu*dt + sum_j betas[j-1] (tau/Z)^{a_j}.
struct ReturnParams {
    double mu = 0;
    double dt = 1;
    std::vector<double> betas{0.0};
    std::vector<double> exponents{0.5, 1.0};

    static ReturnParams standard(double mu, double beta, double dt);
    bool is_standard() const;  // exponents (1/2, 1), single beta
    void validate() const;
};

// Conditional Normal moments given the mixing value w = Z/tau (variance
// w^{-2 a_0}, mean built from the w^{-a_j} terms).
void conditional_moments(const ReturnParams& p, double w, double& mean, double& var);

// Closed-form log density of one return given integrated volatility tau,
// standard exponents only:
//   f = tau e^{A beta} e^{-|beta| s}(1+|beta| s)/s^3,  s = sqrt(2 tau + A^2),
// A = x - mu*dt. Continuous at beta = 0 through log1p.
double ghsv_logpdf(double x, double tau, const ReturnParams& p);

// Same density by integrating the Normal mixture over w with density
// tau*exp(-w*tau); supports arbitrary exponent vectors. Oracle route for the
// closed form and only route for non-standard exponents.
double ghsv_logpdf_via_mixture(double x, double tau, const ReturnParams& p,
                               const QuadratureConfig& cfg = {});

// One return draw given tau: Z ~ Exp(1), then the conditional Normal.
// tau == 0 collapses to the degenerate x = mu*dt.
double sample_return(RandomSource& rng, double tau, const ReturnParams& p);

}  // namespace ghsv
