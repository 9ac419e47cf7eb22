#include "uavsec/rng.hpp"

#include <cmath>

namespace uavsec {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& x, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::raw_block(std::array<std::uint32_t, 4> counter,
                                                   std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
        round_once(counter, key[0], key[1]);
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return counter;
}

std::array<std::uint32_t, 4> Philox4x32::block(std::uint64_t counter) const {
    return raw_block({static_cast<std::uint32_t>(counter),
                      static_cast<std::uint32_t>(counter >> 32), 0u, 0u},
                     {key0_, key1_});
}

double Philox4x32::uniform(std::uint64_t index) const {
    const auto b = block(index);
    const std::uint64_t bits53 =
        ((static_cast<std::uint64_t>(b[0]) << 32) | b[1]) >> 11;
    // (bits + 0.5) / 2^53 lies strictly inside (0, 1).
    return (static_cast<double>(bits53) + 0.5) * 0x1.0p-53;
}

double Philox4x32::exponential(std::uint64_t index) const {
    return -std::log(uniform(index));
}

}  // namespace uavsec
