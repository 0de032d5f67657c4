#include "kinematics.hpp"

#include <algorithm>

namespace stochpe::detail {
namespace {

template <class Fn>
ModalField map_modes(const DomainSpec& d, const ModalField& f, VerticalKind kind, Fn&& fn) {
    ModalField out(d, kind);
    for (int m = 0; m <= d.M; ++m)
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx) {
                const std::size_t i = d.local_index(kx, ky, m);
                out.c[i] = fn(f.c[i], kx, ky, m);
            }
    return out;
}

}  // namespace

ModalField ddx(const DomainSpec& d, const ModalField& f) {
    ModalField out = map_modes(d, f, f.kind, [&](cplx c, int kx, int, int) { return cplx(0.0, d.kx_phys(kx)) * c; });
    if (!f.lin.empty()) {
        out.lin.resize(f.lin.size());
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx) {
                const std::size_t i = d.local_index(kx, ky, 0);
                out.lin[i] = cplx(0.0, d.kx_phys(kx)) * f.lin[i];
            }
    }
    return out;
}

ModalField ddy(const DomainSpec& d, const ModalField& f) {
    ModalField out = map_modes(d, f, f.kind, [&](cplx c, int, int ky, int) { return cplx(0.0, d.ky_phys(ky)) * c; });
    if (!f.lin.empty()) {
        out.lin.resize(f.lin.size());
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx) {
                const std::size_t i = d.local_index(kx, ky, 0);
                out.lin[i] = cplx(0.0, d.ky_phys(ky)) * f.lin[i];
            }
    }
    return out;
}

ModalField ddz(const DomainSpec& d, const ModalField& f) {
    // d/dz cos(kz z) = -kz sin(kz z)
    return map_modes(d, f, VerticalKind::Sin, [&](cplx c, int, int, int m) { return -d.kz_phys(m) * c; });
}

ModalField ddzz(const DomainSpec& d, const ModalField& f) {
    return map_modes(d, f, VerticalKind::Cos, [&](cplx c, int, int, int m) {
        const double kz = d.kz_phys(m);
        return -kz * kz * c;
    });
}

ModalField divergence(const SpectralState& u) {
    const auto& d = u.domain();
    ModalField out(d, VerticalKind::Cos);
    for (int m = 0; m <= d.M; ++m)
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx) {
                out.c[d.local_index(kx, ky, m)] =
                    cplx(0.0, 1.0) * (d.kx_phys(kx) * u.at(Component::V1, kx, ky, m) +
                                      d.ky_phys(ky) * u.at(Component::V2, kx, ky, m));
            }
    return out;
}

Evaluated evaluate(const SpectralState& u, const Transformer& t, EvalMask mask) {
    const auto& d = u.domain();
    Evaluated e;
    const int nc = mask.temperature ? kComponents : 2;
    for (int c = 0; c < nc; ++c) {
        const auto f = modal_component(u, static_cast<Component>(c));
        if (mask.values) e.val[c] = t.synthesize(f);
        if (mask.gradients) {
            e.dx[c] = t.synthesize(ddx(d, f));
            e.dy[c] = t.synthesize(ddy(d, f));
            e.dz[c] = t.synthesize(ddz(d, f));
        }
    }
    return e;
}

std::array<PhysicalField, kComponents> advect(const PhysicalField& v1, const PhysicalField& v2,
                                             const PhysicalField* w, const Evaluated& target, bool temperature) {
    std::array<PhysicalField, kComponents> out;
    const int nc = temperature ? kComponents : 2;
    const std::size_t n = v1.values.size();
    for (int c = 0; c < kComponents; ++c) {
        out[c] = PhysicalField(v1.shape);
        if (c >= nc) continue;
        const double* a = v1.values.data();
        const double* b = v2.values.data();
        const double* gx = target.dx[c].values.data();
        const double* gy = target.dy[c].values.data();
        double* o = out[c].values.data();
        for (std::size_t i = 0; i < n; ++i) o[i] = a[i] * gx[i] + b[i] * gy[i];
        if (w) {
            const double* ww = w->values.data();
            const double* gz = target.dz[c].values.data();
            for (std::size_t i = 0; i < n; ++i) o[i] += ww[i] * gz[i];
        }
    }
    return out;
}

SpectralState analyze_triple(const Transformer& t, const std::array<PhysicalField, kComponents>& f, double time) {
    SpectralState out(t.domain(), time);
    for (int c = 0; c < kComponents; ++c) {
        if (f[c].values.empty()) continue;
        const auto mf = t.analyze(f[c]);
        auto dst = out.component(static_cast<Component>(c));
        std::copy(mf.c.begin(), mf.c.end(), dst.begin());
    }
    return out;
}

}  // namespace stochpe::detail
