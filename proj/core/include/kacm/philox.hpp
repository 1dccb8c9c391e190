#pragma once

#include <array>
#include <cstdint>

namespace kacm {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Output is a pure function of (key, counter); distinct counters never
/// share a stream, so path streams are independent by construction.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t seed) : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Block operator()(Block counter) const;

private:
    std::array<std::uint32_t, 2> key_;
};

/// Standard normal draws for one path: counter = (draw index, path index).
class NormalStream {
public:
    NormalStream(const Philox4x32& gen, std::uint64_t path) : gen_(&gen), path_(path) {}

    double next() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

private:
    void refill();

    const Philox4x32* gen_;
    std::uint64_t path_;
    std::uint64_t block_ = 0;
    std::array<double, 4> buf_{};
    int pos_ = 4;
};

}  // namespace kacm
