#pragma once
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ghsv/numerics.hpp"
#include "ghsv/random.hpp"

namespace ghsv {

// Location weight density eta(y) for the jump field's mean measure
// rho(du) eta(y) dy. The constant-one default gets exact fast paths.
struct EtaDensity {
    std::function<double(double)> pdf;
    bool is_const_one = false;

    static EtaDensity one() {
        EtaDensity e;
        e.pdf = [](double) { return 1.0; };
        e.is_const_one = true;
        return e;
    }
    double operator()(double y) const { return is_const_one ? 1.0 : pdf(y); }
};

// Jump-size measure rho(du) on (0, inf), exposed through the integrals the
// model needs: the Laplace exponent psi(s) = int (1 - e^{-su}) rho(du) and
// the tilted moments kappa_l(s) = int u^l e^{-su} rho(du).
class LevyFamily {
  public:
    virtual ~LevyFamily() = default;

    virtual double psi(double s) const = 0;
    virtual double log_tilted_kappa(int l, double s) const = 0;
    double tilted_kappa(int l, double s) const;

    // rho(0,inf) when finite (finite-activity case)
    virtual std::optional<double> total_mass() const = 0;
    // rho([eps,inf)); for infinite-activity families requires eps > 0
    virtual double mass_above(double eps) const = 0;
    // int_0^eps u rho(du): expected volatility mass lost to truncation
    virtual double mean_mass_below(double eps) const = 0;
    // draw from rho restricted to [eps,inf), normalized
    virtual double sample_size(RandomSource& rng, double eps) const = 0;

    virtual std::string name() const = 0;
};

// rho(du) = u^{-alpha-1} e^{-bu} du / Gamma(1-alpha) with either
// 0 < alpha < 1, b >= 0, or alpha <= 0, b > 0. alpha < 0 is finite-activity
// (compound Poisson with Gamma(-alpha, b) sizes).
class GenGammaFamily final : public LevyFamily {
  public:
    GenGammaFamily(double alpha, double b);

    double psi(double s) const override;
    double log_tilted_kappa(int l, double s) const override;
    std::optional<double> total_mass() const override;
    double mass_above(double eps) const override;
    double mean_mass_below(double eps) const override;
    double sample_size(RandomSource& rng, double eps) const override;
    std::string name() const override { return "gen_gamma"; }

    double alpha() const { return alpha_; }
    double b() const { return b_; }

  private:
    double alpha_, b_;
};

// Family specified only through a jump-size density f_T on (0, inf):
// psi(s) = -log int e^{-st} f_T, tilted moments by quadrature with automatic
// cutoff doubling, cumulants via the moment recursion. Evaluation-only: it
// cannot simulate jumps or report masses.
class DensitySpecifiedFamily final : public LevyFamily {
  public:
    DensitySpecifiedFamily(std::function<double(double)> f_T, double t_hint = 1.0,
                           QuadratureConfig cfg = {});

    double psi(double s) const override;
    double log_tilted_kappa(int l, double s) const override;
    double tilted_moment(int l, double s) const;
    std::optional<double> total_mass() const override { return std::nullopt; }
    double mass_above(double) const override;
    double mean_mass_below(double) const override;
    double sample_size(RandomSource&, double) const override;
    std::string name() const override { return "density"; }

  private:
    // int_0^inf t^l e^{-st} f_T(t) dt, cutoff doubled until stable; throws
    // DomainError when the tail keeps growing (divergent moment)
    double tail_integral(int l, double s) const;

    std::function<double(double)> f_;
    double t_hint_;
    QuadratureConfig cfg_;
};

struct JumpSample {
    std::vector<double> sizes;
    std::vector<double> locations;
    double neglected_mean_mass = 0;  // int_0^eps u rho(du) * int eta
};

// Realize the Poisson field rho(du) eta(y) dy on locations in (lo, hi].
// Finite-activity families are exact at eps = 0; infinite-activity families
// require a size threshold eps > 0 and report the neglected mean mass.
JumpSample sample_jumps(const LevyFamily& fam, double lo, double hi,
                        const EtaDensity& eta, double eps, RandomSource& rng);

}  // namespace ghsv
