#pragma once

#include <array>
#include <cstdint>

namespace uavsec {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
// Stateless: block(i) depends only on the key (seed) and the counter, so
// draws are reproducible across platforms and safe to evaluate from any
// number of threads without shared state.
class Philox4x32 {
  public:
    explicit Philox4x32(std::uint64_t seed) : key0_(static_cast<std::uint32_t>(seed)),
                                              key1_(static_cast<std::uint32_t>(seed >> 32)) {}

    std::array<std::uint32_t, 4> block(std::uint64_t counter) const;

    // Full-width bijection, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> raw_block(std::array<std::uint32_t, 4> counter,
                                                  std::array<std::uint32_t, 2> key);

    // Uniform double in (0, 1), 53 random bits; index selects the draw.
    double uniform(std::uint64_t index) const;

    // Unit-mean exponential via inverse CDF, -log(u).
    double exponential(std::uint64_t index) const;

  private:
    std::uint32_t key0_;
    std::uint32_t key1_;
};

}  // namespace uavsec
