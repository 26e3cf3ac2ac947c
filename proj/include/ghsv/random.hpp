#pragma once
#include <cstdint>
#include <vector>

namespace ghsv {

// Counter-based generator on top of splitmix64. A source is identified by
// (seed, stream); the counter advances by one golden-ratio step per 64-bit
// output, so sequences are bit-identical across platforms and runs. Distinct
// streams from the same seed are independent for practical purposes and are
// how chains / replicates decorrelate.
class RandomSource {
  public:
    explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    // uniform on the open interval (0,1); never returns an endpoint,
    // safe under log().
    double uniform();
    double uniform(double lo, double hi);

    double normal();  // standard Normal, Box-Muller (pair cached)
    double exponential(double rate = 1.0);
    double gamma(double shape, double rate);  // rate parameterization
    // inverse of a Gamma(shape, rate) variate
    double inverse_gamma(double shape, double rate);
    long poisson(double mean);
    // index draw proportional to non-negative weights (CDF inversion)
    std::size_t discrete(const std::vector<double>& weights);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

  private:
    std::uint64_t seed_, stream_, state_;
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace ghsv
