#include "pim/rng.hpp"

#include <cmath>
#include <numbers>

namespace pim {

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

// 53-bit uniform in (0, 1).
inline double open_uniform(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

double NormalStream::operator()(std::uint64_t i) const {
    double pair[2];
    fill(i & ~std::uint64_t{1}, pair, 2);
    return pair[i & 1];
}

void NormalStream::fill(std::uint64_t i0, double* out, std::size_t n) const {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    std::size_t done = 0;
    std::uint64_t i = i0;
    while (done < n) {
        const std::uint64_t block = i >> 1;
        const auto w = philox4x32({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                                   static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                                  key);
        const double u1 = open_uniform(w[0], w[1]);
        const double u2 = open_uniform(w[2], w[3]);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        const double z[2] = {rad * std::cos(ang), rad * std::sin(ang)};
        for (std::size_t j = i & 1; j < 2 && done < n; ++j, ++i) out[done++] = z[j];
    }
}

std::vector<double> brownian_increments(std::uint64_t seed, std::uint64_t path, std::size_t n_steps,
                                        std::size_t refine) {
    if (refine == 0) refine = 1;
    const std::size_t fine = n_steps * refine;
    std::vector<double> z(fine);
    NormalStream(seed, path).fill(0, z.data(), fine);
    const double scale = std::sqrt(1.0 / static_cast<double>(fine));
    std::vector<double> dB(n_steps, 0.0);
    for (std::size_t n = 0; n < n_steps; ++n) {
        double s = 0.0;
        for (std::size_t j = 0; j < refine; ++j) s += z[n * refine + j];
        dB[n] = scale * s;
    }
    return dB;
}

}  // namespace pim
