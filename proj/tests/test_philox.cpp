#include <doctest.h>

#include <cmath>

#include "kacm/philox.hpp"

using kacm::Philox4x32;

TEST_SUITE("philox") {

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST_CASE("Philox4x32-10 known answers") {
    using B = Philox4x32::Block;
    CHECK(Philox4x32(0)(B{0, 0, 0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32(0xffffffffffffffffULL)(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    const std::uint64_t key = 0xa4093822ULL | (0x299f31d0ULL << 32);
    CHECK(Philox4x32(key)(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal streams are reproducible and path-separated") {
    const Philox4x32 g(42);
    kacm::NormalStream a(g, 7), b(g, 7), c(g, 8);
    bool differ = false;
    for (int i = 0; i < 20; ++i) {
        const double va = a.next();
        CHECK(va == b.next());
        differ = differ || va != c.next();
    }
    CHECK(differ);
}

TEST_CASE("normal draws have unit variance") {
    const Philox4x32 g(1);
    double s = 0.0, ss = 0.0, q = 0.0;
    const int n = 200000;
    for (int p = 0; p < n / 8; ++p) {
        kacm::NormalStream st(g, static_cast<std::uint64_t>(p));
        for (int i = 0; i < 8; ++i) {
            const double z = st.next();
            s += z;
            ss += z * z;
            q += z * z * z * z;
        }
    }
    CHECK(std::abs(s / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(ss / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(q / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

}
