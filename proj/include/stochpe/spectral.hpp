#pragma once

#include <array>
#include <cstddef>
#include <limits>

#include "stochpe/domain.hpp"
#include "stochpe/rng.hpp"
#include "stochpe/state.hpp"

namespace stochpe {

/// Parseval weight of cos(m pi z/h) (and of sin for m >= 1): 1 for m = 0, 1/2 otherwise.
inline double vertical_weight(int m) { return m == 0 ? 1.0 : 0.5; }

/// L2(M) inner product (U, W)_H.
double inner_H(const SpectralState& a, const SpectralState& b);

/// |U|_s = |A^s U|_H. s = 0 gives the H norm, s = 1/2 the V norm, s = 1 |AU|.
double norm_s(const SpectralState& u, double s);

inline double norm_H(const SpectralState& u) { return norm_s(u, 0.0); }
inline double norm_V(const SpectralState& u) { return norm_s(u, 0.5); }
inline double norm_DA(const SpectralState& u) { return norm_s(u, 1.0); }

/// a(U, W) = (A U, W)_H.
double form_a(const SpectralState& a, const SpectralState& b);

/// Multiply every coefficient by lambda^s. s must lie in [-1, 2]; for s < 0 the
/// lambda = 0 modes must vanish (throws std::domain_error otherwise).
SpectralState apply_A_power(const SpectralState& u, double s);

/// P_n: keep the n lowest-lambda modes of the basis ordering.
SpectralState project_n(const SpectralState& u, const Basis& basis, std::size_t n);
/// Q_n = I - P_n.
SpectralState complement_q(const SpectralState& u, const Basis& basis, std::size_t n);

/// Zero all modes outside the storage mask (1 = keep).
void apply_mask(SpectralState& u, const std::vector<std::uint8_t>& mask);

struct NormBundle {
    double H = 0.0;
    double V = 0.0;
    double DA = 0.0;
    std::array<double, kComponents> L6{};      // per component, exact on the sextic grid
    double L2_dz = 0.0;                        // |d_z U|
    std::array<double, kComponents> top_L2{};  // L2 norm of the trace on z = 0
};

NormBundle norms(const SpectralState& u);

/// |d_z U_c|^2 for one component (sine series Parseval).
double dz_norm2(const SpectralState& u, Component c);
/// |grad_3 d_z U_c|^2 = |grad d_z U_c|^2 + |d_zz U_c|^2.
double grad3_dz_norm2(const SpectralState& u, Component c);
/// a-form of d_z U_c: mu |grad d_z U_c|^2 + nu |d_zz U_c|^2.
double dz_form_a(const SpectralState& u, Component c);

struct RandomStateOptions {
    double amplitude = 1.0;
    /// Coefficient standard deviation scales like (1 + lambda)^(-decay).
    double decay = 1.0;
    /// Modes with lambda above this are left at zero.
    double lambda_max = std::numeric_limits<double>::infinity();
    /// Apply the hydrostatic Leray projection (state lands in H).
    bool divergence_free = true;
    /// Include the constant temperature mode.
    bool temperature_mean = false;
};

/// Random real state with Gaussian coefficients.
SpectralState random_state(const DomainSpec& d, GaussianStream& rng, const RandomStateOptions& opt = {});

}  // namespace stochpe
