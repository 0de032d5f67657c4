#pragma once

// Internal helpers shared by the advection, noise and diagnostic code: modal
// derivatives and physical evaluation of states on the dealiased grid.

#include <array>

#include "stochpe/state.hpp"
#include "stochpe/transform.hpp"

namespace stochpe::detail {

/// d/dx of a cosine modal field (multiplies by i kx').
ModalField ddx(const DomainSpec& d, const ModalField& f);
ModalField ddy(const DomainSpec& d, const ModalField& f);
/// d/dz of a cosine modal field; the result is a sine field.
ModalField ddz(const DomainSpec& d, const ModalField& f);
/// d^2/dz^2 of a cosine modal field.
ModalField ddzz(const DomainSpec& d, const ModalField& f);

/// Horizontal divergence of the velocity part of u, as a cosine field.
ModalField divergence(const SpectralState& u);

/// Physical values and first derivatives of every component of a state.
struct Evaluated {
    std::array<PhysicalField, kComponents> val;
    std::array<PhysicalField, kComponents> dx;
    std::array<PhysicalField, kComponents> dy;
    std::array<PhysicalField, kComponents> dz;
};

/// Which pieces evaluate() should fill.
struct EvalMask {
    bool values = true;
    bool gradients = true;
    bool temperature = true;
};

Evaluated evaluate(const SpectralState& u, const Transformer& t, EvalMask mask = {});

/// (v.grad) target + w(v) d_z target for each component of target, where
/// v = (u.v1, u.v2). Pointwise on the transformer grid, no projection.
std::array<PhysicalField, kComponents> advect(const PhysicalField& v1, const PhysicalField& v2,
                                             const PhysicalField* w, const Evaluated& target, bool temperature);

/// Cosine projection of physical fields onto a state.
SpectralState analyze_triple(const Transformer& t, const std::array<PhysicalField, kComponents>& f,
                             double time = 0.0);

}  // namespace stochpe::detail
