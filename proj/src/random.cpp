#include "ghsv/random.hpp"

#include <cmath>
#include <numbers>

#include "ghsv/errors.hpp"

namespace ghsv {

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
    // fold the stream id into the initial counter state; mix twice so
    // (seed, stream) and (seed^1, stream^1) style collisions don't align
    state_ = mix64(seed + 0x9E3779B97F4A7C15ull * mix64(stream + 1));
}

std::uint64_t RandomSource::next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
}

double RandomSource::uniform() {
    // 53-bit mantissa, shifted to the open interval
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomSource::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double RandomSource::normal() {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return cached_normal_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(a);
    have_cached_normal_ = true;
    return r * std::cos(a);
}

double RandomSource::exponential(double rate) {
    if (!(rate > 0)) throw DomainError("exponential: rate must be positive");
    return -std::log(uniform()) / rate;
}

double RandomSource::gamma(double shape, double rate) {
    if (!(shape > 0) || !(rate > 0))
        throw DomainError("gamma: shape and rate must be positive");
    // Marsaglia-Tsang squeeze; shape < 1 boosted through shape+1
    double boost = 1.0;
    double a = shape;
    if (a < 1.0) {
        boost = std::pow(uniform(), 1.0 / a);
        a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return boost * d * v / rate;
    }
}

double RandomSource::inverse_gamma(double shape, double rate) {
    return 1.0 / gamma(shape, rate);
}

long RandomSource::poisson(double mean) {
    if (mean < 0) throw DomainError("poisson: mean must be non-negative");
    if (mean == 0) return 0;
    // Knuth product in chunks: a Poisson(m) is the sum of independent
    // Poisson(m/k) pieces, which keeps the product above DBL_MIN
    long total = 0;
    double remaining = mean;
    while (remaining > 0) {
        double chunk = remaining > 30.0 ? 30.0 : remaining;
        remaining -= chunk;
        const double limit = std::exp(-chunk);
        double prod = uniform();
        while (prod > limit) {
            ++total;
            prod *= uniform();
        }
    }
    return total;
}

std::size_t RandomSource::discrete(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) {
        if (w < 0 || !std::isfinite(w))
            throw DomainError("discrete: weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0)) throw DomainError("discrete: weights sum to zero");
    double u = uniform() * total;
    double acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u <= acc) return i;
    }
    return weights.size() - 1;
}

}  // namespace ghsv
