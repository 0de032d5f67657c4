#pragma once

#include <string>

#include "stochpe/state.hpp"
#include "stochpe/transform.hpp"

namespace stochpe {

struct PhysicsParams {
    double f = 0.0;       // Coriolis parameter
    double beta_T = 0.0;  // thermal expansion coefficient
    double g = 0.0;       // gravity
    double rho0 = 1.0;    // reference density
    double T_r = 0.0;     // reference temperature

    void validate() const;
    bool operator==(const PhysicsParams&) const = default;
};

/// Hydrostatic Leray projection P_H: the barotropic (m = 0) velocity is
/// replaced by its 2D divergence-free part and its k = 0 mode is zeroed;
/// baroclinic modes and temperature pass through.
SpectralState leray_project(const SpectralState& u);

/// sum_k |k . v(k, m=0)| with physical wavevectors.
double divergence_residual(const SpectralState& u);

/// w(v) = -int_{-h}^z div v dz' as a sine modal field (plus the linear term
/// from the barotropic divergence, zero after leray_project).
ModalField vertical_velocity_modal(const SpectralState& u);
PhysicalField vertical_velocity(const SpectralState& u, GridKind kind = GridKind::Dealiased);

/// A_2 v: depth average of the horizontal velocity.
HorizontalField average_A2(const SpectralState& u);
/// Depth-independent 3D velocity with the given barotropic field; T = 0.
SpectralState lift(const HorizontalField& vbar);
/// A_3 v = lift(A_2 v). Temperature is dropped.
SpectralState average_A3(const SpectralState& u);
/// R v = v - A_3 v. Temperature is dropped.
SpectralState fluctuation_R(const SpectralState& u);
/// 2D Helmholtz-Leray projection of a barotropic field (k = 0 zeroed).
HorizontalField leray_2d(const HorizontalField& v);

/// b(U, U#, Ub) = (P_H[(v.grad)U# + w(v) d_z U#], Ub), evaluated by quadrature
/// on the dealiased grid against P_H Ub.
double trilinear_b(const SpectralState& u, const SpectralState& usharp, const SpectralState& uflat);

/// B(U, U#) = P_H[(v.grad)U# + w(v) d_z U#] projected onto the resolved modes.
SpectralState bilinear_B(const SpectralState& u, const SpectralState& usharp);
inline SpectralState bilinear_B(const SpectralState& u) { return bilinear_B(u, u); }

/// (v.grad)U# + w(v) d_z U# projected onto the resolved modes, without P_H.
SpectralState advection_raw(const SpectralState& u, const SpectralState& usharp, bool include_w = true);

/// int_z^0 T dz' projected onto cos modes; the k-th plane of the result is the
/// hydrostatic pressure integral of the temperature.
ModalField pressure_integral(const SpectralState& u);

/// A_pr U = P_H(-beta_T g grad int_z^0 T dz', 0).
SpectralState pressure_buoyancy_Apr(const SpectralState& u, const PhysicsParams& p);
/// E U = P_H(f (-v2, v1), 0).
SpectralState coriolis_E(const SpectralState& u, const PhysicsParams& p);

/// F(U) = A_pr U + E U - P_H F_U.
SpectralState forcing_F(const SpectralState& u, const PhysicsParams& p, const SpectralState& forcing);
/// Same with F_U = 0.
SpectralState forcing_F(const SpectralState& u, const PhysicsParams& p);

struct ModeSplit {
    HorizontalField vbar;  // A_2 v
    SpectralState vtilde;  // R v
    std::string tag;       // domain fingerprint

    /// lift(vbar) + vtilde.
    SpectralState reconstruct() const;
};

ModeSplit mode_split(const SpectralState& u);

/// Individual terms of the barotropic and baroclinic equations, each stored
/// as a 3D velocity state (barotropic terms lifted). Signs follow the operator
/// side of the equations: dv + [terms] dt = ...
struct SplitTerms {
    SpectralState bt_viscous;           // -mu Lap vbar
    SpectralState bt_self_advection;    // (vbar.grad) vbar
    SpectralState bt_baroclinic_flux;   // A_2((vt.grad) vt + (div vt) vt)
    SpectralState bt_coriolis;          // f k x vbar
    SpectralState bt_buoyancy;          // -beta_T g A_2 grad int_z^0 T
    SpectralState bc_viscous;           // -mu Lap vt - nu d_zz vt
    SpectralState bc_self_advection;    // (vt.grad) vt + w(vt) d_z vt
    SpectralState bc_shear_vtilde_vbar; // (vt.grad) vbar
    SpectralState bc_shear_vbar_vtilde; // (vbar.grad) vt
    SpectralState bc_flux_correction;   // -A_3((vt.grad) vt + (div vt) vt)
    SpectralState bc_coriolis;          // f k x vt
    SpectralState bc_buoyancy;          // -beta_T g R grad int_z^0 T

    /// 2D Leray projection of the barotropic sum (eliminates grad p_s), lifted.
    SpectralState barotropic_sum() const;
    SpectralState baroclinic_sum() const;
    /// barotropic_sum() + baroclinic_sum().
    SpectralState recombine() const;

    static const std::array<const char*, 12>& names();
    const SpectralState& term(std::size_t i) const;
};

SplitTerms baroclinic_rhs_terms(const ModeSplit& split, const SpectralState& u, const PhysicsParams& p);

/// Velocity part of A U + B(U) + A_pr U + E U (temperature zeroed): the
/// operator side of the unsplit momentum equation.
SpectralState unsplit_velocity_rhs(const SpectralState& u, const PhysicsParams& p);

}  // namespace stochpe
