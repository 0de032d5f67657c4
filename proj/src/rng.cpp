#include "stochpe/rng.hpp"

#include <cmath>

#include "stochpe/domain.hpp"

namespace stochpe {
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

Philox4x32::Key key_of(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// Box-Muller on two uniforms.
void box_muller(double u1, double u2, double& z0, double& z1) {
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

double uniform_open(std::uint32_t hi, std::uint32_t lo) {
    // 53 random bits, shifted by half an ulp so 0 is never produced.
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double WienerSampler::normal(std::uint32_t path, std::uint64_t step, std::uint32_t k) const {
    const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), path,
                                     k / 2};
    const auto out = Philox4x32::generate(ctr, key_of(seed_));
    double z0, z1;
    box_muller(uniform_open(out[0], out[1]), uniform_open(out[2], out[3]), z0, z1);
    return (k % 2 == 0) ? z0 : z1;
}

std::vector<double> WienerSampler::increments(std::uint32_t path, std::uint64_t step, std::size_t K,
                                              double dt) const {
    std::vector<double> out(K);
    const double s = std::sqrt(dt);
    for (std::size_t k = 0; k < K; k += 2) {
        const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                                         path, static_cast<std::uint32_t>(k / 2)};
        const auto r = Philox4x32::generate(ctr, key_of(seed_));
        double z0, z1;
        box_muller(uniform_open(r[0], r[1]), uniform_open(r[2], r[3]), z0, z1);
        out[k] = s * z0;
        if (k + 1 < K) out[k + 1] = s * z1;
    }
    return out;
}

std::array<double, 4> GaussianStream::block(std::uint64_t i) const {
    const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32), stream_,
                                     0xABCDu};
    const auto a = Philox4x32::generate(ctr, key_of(seed_));
    const Philox4x32::Counter ctr2 = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32), stream_,
                                      0xABCEu};
    const auto b = Philox4x32::generate(ctr2, key_of(seed_));
    return {uniform_open(a[0], a[1]), uniform_open(a[2], a[3]), uniform_open(b[0], b[1]), uniform_open(b[2], b[3])};
}

double GaussianStream::normal() {
    if (cached_ == 0) {
        const auto u = block(next_++);
        box_muller(u[0], u[1], cache_[0], cache_[1]);
        box_muller(u[2], u[3], cache_[2], cache_[3]);
        cached_ = 4;
    }
    return cache_[4 - cached_--];
}

double GaussianStream::uniform() {
    const auto u = block(next_++);
    return u[0];
}

}  // namespace stochpe
