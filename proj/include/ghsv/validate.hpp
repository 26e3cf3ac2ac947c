#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace ghsv {

struct CheckResult {
    std::string name;
    bool pass = false;
    double observed = 0;  // discrepancy or |z| statistic
    double tolerance = 0;
    std::string detail;
};

// Monte Carlo standard error of a correlated series via batch means
double batch_means_se(const std::vector<double>& series);

// partition-sum vs s-path-sum log likelihood on five random instances at
// this n, the jump index cycling {-1, 0, 1/2}
std::vector<CheckResult> validate_equivalence(int n, std::uint64_t seed);

// decomposed Laplace functional vs direct quadrature over the whole axis,
// plus the piecewise identity for Omega itself; both family regimes
std::vector<CheckResult> validate_laplace(int n, std::uint64_t seed);

// density-specified tilted cumulants (quadrature + moment recursion) against
// the gen-Gamma closed form on Gamma jump densities, orders 1..4
std::vector<CheckResult> validate_thiele();

// sequential seating weights telescope each partition's product weight and
// reproduce the enumerated normalizer
std::vector<CheckResult> validate_crp(int n, std::uint64_t seed);

// joint-distribution test: moments from prior simulation vs the transition
// chain that alternates a posterior sweep with data regeneration
std::vector<CheckResult> validate_geweke(std::uint64_t seed);

const std::vector<std::string>& validate_suite_names();

// dispatch by name; n == 0 selects the suite's default size. Throws
// DomainError for unknown suites or out-of-range n.
std::vector<CheckResult> run_validate_suite(const std::string& suite, int n,
                                            std::uint64_t seed);

}  // namespace ghsv
