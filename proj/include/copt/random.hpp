#pragma once

#include <cstdint>
#include <random>

namespace copt {

// Deterministic uniform source. std::uniform_real_distribution is
// implementation-defined, so draws are built from raw engine output to keep
// seeded streams reproducible across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Strictly inside (0, 1); never returns an endpoint.
    double uniform() {
        const std::uint64_t bits = engine_() >> 11;  // top 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF, p in (0,1). Accurate to ~1e-15.
double inverse_normal_cdf(double p);

}  // namespace copt
