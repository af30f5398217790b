#include <doctest.h>

#include <cmath>

#include "pim/rng.hpp"

using pim::philox4x32;

TEST_SUITE("rng") {

TEST_CASE("philox known answers") {
    using C = std::array<std::uint32_t, 4>;
    using K = std::array<std::uint32_t, 2>;
    CHECK(philox4x32(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32(C{~0u, ~0u, ~0u, ~0u}, K{~0u, ~0u}) == C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal stream is addressable and roughly standard") {
    pim::NormalStream s(42, 3);
    std::vector<double> a(1000);
    s.fill(0, a.data(), a.size());
    for (std::size_t i : {0u, 1u, 17u, 999u}) CHECK(a[i] == s(i));
    std::vector<double> b(10);
    s.fill(17, b.data(), b.size());
    CHECK(b[0] == a[17]);
    CHECK(b[9] == a[26]);

    const std::size_t n = 200000;
    std::vector<double> z(n);
    s.fill(0, z.data(), n);
    double m = 0, v = 0;
    for (double x : z) m += x;
    m /= n;
    for (double x : z) v += (x - m) * (x - m);
    v /= n - 1;
    CHECK(std::abs(m) < 5.0 / std::sqrt(double(n)));
    CHECK(std::abs(v - 1.0) < 5.0 * std::sqrt(2.0 / n));

    pim::NormalStream other(42, 4);
    CHECK(other(0) != s(0));
}

TEST_CASE("coarse increments are sums of the fine ones") {
    const auto fine = pim::brownian_increments(9, 5, 64, 1);
    const auto coarse = pim::brownian_increments(9, 5, 16, 4);
    REQUIRE(coarse.size() == 16);
    for (std::size_t k = 0; k < 16; ++k) {
        const double s = fine[4 * k] + fine[4 * k + 1] + fine[4 * k + 2] + fine[4 * k + 3];
        CHECK(coarse[k] == doctest::Approx(s).epsilon(1e-13));
    }
}

}
