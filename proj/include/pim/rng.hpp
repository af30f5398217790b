#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace pim {

/// Philox4x32-10 block function (Salmon et al. 2011). Stateless: the output
/// is a pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Standard normal stream addressed by (seed, stream, index).
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    /// The i-th normal of this stream. Two normals per Philox block via Box-Muller.
    double operator()(std::uint64_t i) const;

    /// Normals i0 .. i0+n-1.
    void fill(std::uint64_t i0, double* out, std::size_t n) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

/// Brownian increments over n_steps equal steps on [0, 1] for path `path`.
/// The noise is drawn on a grid of n_steps * refine substeps and summed, so
/// runs at different step sizes with a common fine grid share the same path.
std::vector<double> brownian_increments(std::uint64_t seed, std::uint64_t path, std::size_t n_steps,
                                        std::size_t refine = 1);

}  // namespace pim
