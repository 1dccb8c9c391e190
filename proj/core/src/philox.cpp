#include "kacm/philox.hpp"

#include <cmath>
#include <numbers>

namespace kacm {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// (0, 1], never zero so log() stays finite
inline double to_unit(std::uint32_t v) { return (static_cast<double>(v) + 1.0) * 0x1p-32; }

}  // namespace

Philox4x32::Block Philox4x32::operator()(Block c) const {
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return c;
}

void NormalStream::refill() {
    const Philox4x32::Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32)};
    const auto r = (*gen_)(ctr);
    ++block_;
    // Box-Muller on two uniform pairs
    for (int i = 0; i < 2; ++i) {
        const double rad = std::sqrt(-2.0 * std::log(to_unit(r[2 * i])));
        const double ang = 2.0 * std::numbers::pi * to_unit(r[2 * i + 1]);
        buf_[2 * i] = rad * std::cos(ang);
        buf_[2 * i + 1] = rad * std::sin(ang);
    }
    pos_ = 0;
}

}  // namespace kacm
