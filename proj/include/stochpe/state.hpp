#pragma once

#include <complex>
#include <span>
#include <vector>

#include "stochpe/domain.hpp"

namespace stochpe {

using cplx = std::complex<double>;

/// Coefficients of U = (v1, v2, T) in the Fourier x cosine basis:
///
///   U_c(x, y, z) = sum_{k, m} c(k, m) exp(i k.x) cos(m pi z / h).
///
/// Physical fields are real, so c(-k, m) = conj(c(k, m)).
class SpectralState {
  public:
    SpectralState() = default;
    explicit SpectralState(const DomainSpec& domain, double time = 0.0);

    const DomainSpec& domain() const { return domain_; }

    std::span<cplx> coeffs() { return coeffs_; }
    std::span<const cplx> coeffs() const { return coeffs_; }

    std::span<cplx> component(Component c);
    std::span<const cplx> component(Component c) const;

    cplx& at(Component c, int kx, int ky, int m) { return coeffs_[domain_.index(c, kx, ky, m)]; }
    const cplx& at(Component c, int kx, int ky, int m) const { return coeffs_[domain_.index(c, kx, ky, m)]; }

    double time = 0.0;

    SpectralState& operator+=(const SpectralState& o);
    SpectralState& operator-=(const SpectralState& o);
    SpectralState& operator*=(double a);
    /// this += a * x
    SpectralState& axpy(double a, const SpectralState& x);

    /// Zero a whole component.
    void clear(Component c);
    void set_zero();

    bool all_finite() const;

    /// Largest |c(k) - conj(c(-k))| over all modes.
    double reality_defect() const;
    /// Replace c(k) by the conjugate-symmetric average (c(k) + conj c(-k)) / 2.
    void enforce_reality();

  private:
    DomainSpec domain_{};
    std::vector<cplx> coeffs_;
};

SpectralState operator+(SpectralState a, const SpectralState& b);
SpectralState operator-(SpectralState a, const SpectralState& b);
SpectralState operator*(double s, SpectralState a);

/// Throws std::invalid_argument when two states live on different domains.
void require_same_domain(const SpectralState& a, const SpectralState& b, const char* where);

/// Depth-independent 2D horizontal velocity (the barotropic space), stored as
/// [ky + N2][kx + N1] coefficient planes.
struct HorizontalField {
    DomainSpec domain{};
    std::vector<cplx> v1;
    std::vector<cplx> v2;

    HorizontalField() = default;
    explicit HorizontalField(const DomainSpec& d)
        : domain(d), v1(d.horizontal_modes()), v2(d.horizontal_modes()) {}

    std::size_t index(int kx, int ky) const {
        return static_cast<std::size_t>(ky + domain.N2) * domain.nkx() + (kx + domain.N1);
    }
};

}  // namespace stochpe
