#include "stochpe/state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stochpe {

SpectralState::SpectralState(const DomainSpec& domain, double t)
    : time(t), domain_(domain), coeffs_(domain.total_modes()) {}

std::span<cplx> SpectralState::component(Component c) {
    const auto n = domain_.component_modes();
    return std::span<cplx>(coeffs_).subspan(static_cast<std::size_t>(c) * n, n);
}

std::span<const cplx> SpectralState::component(Component c) const {
    const auto n = domain_.component_modes();
    return std::span<const cplx>(coeffs_).subspan(static_cast<std::size_t>(c) * n, n);
}

void require_same_domain(const SpectralState& a, const SpectralState& b, const char* where) {
    if (!(a.domain() == b.domain())) {
        throw std::invalid_argument(std::string(where) + ": states live on different domains");
    }
}

SpectralState& SpectralState::operator+=(const SpectralState& o) {
    require_same_domain(*this, o, "operator+=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

SpectralState& SpectralState::operator-=(const SpectralState& o) {
    require_same_domain(*this, o, "operator-=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

SpectralState& SpectralState::operator*=(double a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
}

SpectralState& SpectralState::axpy(double a, const SpectralState& x) {
    require_same_domain(*this, x, "axpy");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
    return *this;
}

void SpectralState::clear(Component c) {
    for (auto& v : component(c)) v = 0.0;
}

void SpectralState::set_zero() {
    for (auto& v : coeffs_) v = 0.0;
}

bool SpectralState::all_finite() const {
    for (const auto& c : coeffs_) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

double SpectralState::reality_defect() const {
    const auto& d = domain_;
    double worst = 0.0;
    for (int c = 0; c < kComponents; ++c) {
        const auto comp = static_cast<Component>(c);
        for (int m = 0; m <= d.M; ++m)
            for (int ky = -d.N2; ky <= d.N2; ++ky)
                for (int kx = -d.N1; kx <= d.N1; ++kx) {
                    worst = std::max(worst, std::abs(at(comp, kx, ky, m) - std::conj(at(comp, -kx, -ky, m))));
                }
    }
    return worst;
}

void SpectralState::enforce_reality() {
    const auto& d = domain_;
    for (int c = 0; c < kComponents; ++c) {
        const auto comp = static_cast<Component>(c);
        for (int m = 0; m <= d.M; ++m)
            for (int ky = -d.N2; ky <= d.N2; ++ky)
                for (int kx = -d.N1; kx <= d.N1; ++kx) {
                    auto& a = at(comp, kx, ky, m);
                    auto& b = at(comp, -kx, -ky, m);
                    if (&a == &b) {
                        a = a.real();
                    } else if (d.index(comp, kx, ky, m) < d.index(comp, -kx, -ky, m)) {
                        const cplx avg = 0.5 * (a + std::conj(b));
                        a = avg;
                        b = std::conj(avg);
                    }
                }
    }
}

SpectralState operator+(SpectralState a, const SpectralState& b) { return a += b; }
SpectralState operator-(SpectralState a, const SpectralState& b) { return a -= b; }
SpectralState operator*(double s, SpectralState a) { return a *= s; }

}  // namespace stochpe
