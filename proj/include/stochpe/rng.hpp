#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace stochpe {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// the output is a pure function of (counter, key).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key);
};

/// Map two 32-bit words to a double uniform in the open interval (0, 1).
double uniform_open(std::uint32_t hi, std::uint32_t lo);

/// Addressable Wiener increments.
///
/// The increment for (path, step, direction k) is drawn from the Philox block
/// with key = seed and counter = (step_lo, step_hi, path, k / 2); each block
/// yields two standard normals via Box-Muller, so direction k uses normal k % 2
/// of its block. Results never depend on call order or thread.
class WienerSampler {
  public:
    explicit WienerSampler(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Standard normal for (path, step, k).
    double normal(std::uint32_t path, std::uint64_t step, std::uint32_t k) const;

    /// K independent N(0, dt) increments for one step of one path.
    std::vector<double> increments(std::uint32_t path, std::uint64_t step, std::size_t K, double dt) const;

  private:
    std::uint64_t seed_;
};

/// Sequential stream of normals addressed by (seed, stream id), used for
/// random initial data and sampling. Counter = (i_lo, i_hi, stream, 0xABCD).
class GaussianStream {
  public:
    GaussianStream(std::uint64_t seed, std::uint32_t stream) : seed_(seed), stream_(stream) {}

    double normal();
    double uniform();

  private:
    std::array<double, 4> block(std::uint64_t i) const;

    std::uint64_t seed_;
    std::uint32_t stream_;
    std::uint64_t next_ = 0;
    std::array<double, 4> cache_{};
    int cached_ = 0;
};

}  // namespace stochpe
