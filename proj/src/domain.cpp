#include "stochpe/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace stochpe {

const char* to_string(Component c) {
    switch (c) {
        case Component::V1: return "v1";
        case Component::V2: return "v2";
        case Component::T: return "T";
    }
    return "?";
}

void DomainSpec::validate() const {
    if (!(L1 > 0.0) || !(L2 > 0.0) || !(h > 0.0)) {
        throw std::invalid_argument("domain: L1, L2 and h must be positive");
    }
    if (N1 < 0 || N2 < 0 || M < 0) {
        throw std::invalid_argument("domain: mode counts must be nonnegative");
    }
    if (!(mu > 0.0) || !(nu > 0.0)) {
        throw std::invalid_argument("domain: mu and nu must be positive");
    }
}

double DomainSpec::lambda(int kx, int ky, int m) const {
    const double kz = kz_phys(m);
    return mu * k2(kx, ky) + nu * kz * kz;
}

std::vector<BasisIndex> build_basis(const DomainSpec& spec) {
    spec.validate();
    std::vector<BasisIndex> out;
    out.reserve(spec.total_modes());
    for (int c = 0; c < kComponents; ++c) {
        for (int m = 0; m <= spec.M; ++m) {
            for (int ky = -spec.N2; ky <= spec.N2; ++ky) {
                for (int kx = -spec.N1; kx <= spec.N1; ++kx) {
                    out.push_back({kx, ky, m, static_cast<Component>(c), spec.lambda(kx, ky, m)});
                }
            }
        }
    }
    auto key = [](const BasisIndex& b) {
        return std::make_tuple(std::abs(b.kx), std::abs(b.ky), b.m, static_cast<int>(b.field),
                               b.kx < 0 ? 1 : 0, b.ky < 0 ? 1 : 0);
    };
    std::sort(out.begin(), out.end(), [&](const BasisIndex& a, const BasisIndex& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        return key(a) < key(b);
    });
    return out;
}

Basis::Basis(const DomainSpec& spec) : spec_(spec), modes_(build_basis(spec)) {
    storage_.resize(modes_.size());
    rank_.resize(modes_.size());
    for (std::size_t r = 0; r < modes_.size(); ++r) {
        const auto& b = modes_[r];
        storage_[r] = spec_.index(b.field, b.kx, b.ky, b.m);
        rank_[storage_[r]] = r;
    }
}

double Basis::lambda_n(std::size_t n) const {
    if (n == 0 || n > modes_.size()) throw std::out_of_range("lambda_n: n out of range");
    return modes_[n - 1].lambda;
}

std::size_t Basis::closed_count(std::size_t n) const {
    if (n > modes_.size()) throw std::out_of_range("closed_count: n out of range");
    if (n == 0) return 0;
    const auto& last = modes_[n - 1];
    auto same_group = [&](const BasisIndex& b) {
        return std::abs(b.kx) == std::abs(last.kx) && std::abs(b.ky) == std::abs(last.ky) && b.m == last.m;
    };
    std::size_t out = n;
    // Groups share lambda and are contiguous under the tie-break.
    while (out < modes_.size() && same_group(modes_[out])) ++out;
    return out;
}

std::vector<std::uint8_t> Basis::mask(std::size_t n) const {
    if (n > modes_.size()) throw std::out_of_range("mask: n out of range");
    std::vector<std::uint8_t> out(modes_.size(), 0);
    for (std::size_t r = 0; r < n; ++r) out[storage_[r]] = 1;
    return out;
}

}  // namespace stochpe
