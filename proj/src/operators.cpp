#include "stochpe/operators.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "kinematics.hpp"
#include "stochpe/spectral.hpp"

namespace stochpe {
namespace {

constexpr cplx kI{0.0, 1.0};

const Transformer& dealiased(const DomainSpec& d) { return transformer(d, GridKind::Dealiased); }

// Cosine coefficients of int_z^0 cos(m pi z'/h) dz', as a dense (M+1)x(M+1)
// matrix J[n][m] so that (int_z^0 T)_n = sum_m J[n][m] T_m.
std::vector<double> pressure_matrix(double h, int M) {
    const int nm = M + 1;
    std::vector<double> J(static_cast<std::size_t>(nm) * nm, 0.0);
    auto at = [&](int n, int m) -> double& { return J[static_cast<std::size_t>(n) * nm + m]; };
    // m = 0: int_z^0 dz' = -z
    at(0, 0) = h / 2.0;
    for (int n = 1; n <= M; ++n) {
        const double a = h / (n * kPi);
        at(n, 0) = -(2.0 / h) * a * a * (1.0 - ((n % 2 == 0) ? 1.0 : -1.0));
    }
    // m >= 1: int_z^0 cos = -(h/(m pi)) sin(m pi z/h)
    for (int m = 1; m <= M; ++m) {
        for (int n = 0; n <= M; ++n) {
            auto term = [](int k) {
                if (k == 0) return 0.0;
                const double sgn = (std::abs(k) % 2 == 0) ? 1.0 : -1.0;
                return (sgn - 1.0) / k;
            };
            const double I = 0.5 * (term(m + n) + term(m - n));
            const double norm = (n == 0 ? 1.0 : 2.0) / h;
            at(n, m) = norm * (-h / (m * kPi)) * (h / kPi) * I;
        }
    }
    return J;
}

const std::vector<double>& cached_pressure_matrix(double h, int M) {
    static std::mutex mu;
    static std::map<std::pair<double, int>, std::vector<double>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(h, M);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, pressure_matrix(h, M)).first;
    return it->second;
}

// -beta_T g grad int_z^0 T, unprojected, velocity components only.
SpectralState buoyancy_raw(const SpectralState& u, const PhysicsParams& p) {
    const auto& d = u.domain();
    SpectralState out(d, u.time);
    const double s = -p.beta_T * p.g;
    if (s == 0.0) return out;
    const auto P = pressure_integral(u);
    for (int m = 0; m <= d.M; ++m)
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx) {
                const cplx q = P.c[d.local_index(kx, ky, m)];
                out.at(Component::V1, kx, ky, m) = s * kI * d.kx_phys(kx) * q;
                out.at(Component::V2, kx, ky, m) = s * kI * d.ky_phys(ky) * q;
            }
    return out;
}

// f k x v, unprojected.
SpectralState coriolis_raw(const SpectralState& u, double f) {
    SpectralState out(u.domain(), u.time);
    if (f == 0.0) return out;
    auto a = u.component(Component::V1);
    auto b = u.component(Component::V2);
    auto o1 = out.component(Component::V1);
    auto o2 = out.component(Component::V2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        o1[i] = -f * b[i];
        o2[i] = f * a[i];
    }
    return out;
}

SpectralState only_m0(const SpectralState& u) {
    const auto& d = u.domain();
    SpectralState out(d, u.time);
    for (int c = 0; c < 2; ++c)
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx) {
                const auto comp = static_cast<Component>(c);
                out.at(comp, kx, ky, 0) = u.at(comp, kx, ky, 0);
            }
    return out;
}

SpectralState only_baroclinic(const SpectralState& u) {
    const auto& d = u.domain();
    SpectralState out(d, u.time);
    for (int c = 0; c < 2; ++c)
        for (int m = 1; m <= d.M; ++m)
            for (int ky = -d.N2; ky <= d.N2; ++ky)
                for (int kx = -d.N1; kx <= d.N1; ++kx) {
                    const auto comp = static_cast<Component>(c);
                    out.at(comp, kx, ky, m) = u.at(comp, kx, ky, m);
                }
    return out;
}

std::string domain_tag(const DomainSpec& d) {
    std::ostringstream os;
    os.precision(17);
    os << "L1=" << d.L1 << ";L2=" << d.L2 << ";h=" << d.h << ";N=" << d.N1 << "," << d.N2 << "," << d.M;
    return os.str();
}

}  // namespace

void PhysicsParams::validate() const {
    if (!(rho0 > 0.0)) throw std::invalid_argument("physics.rho0 must be > 0");
    if (!(g >= 0.0)) throw std::invalid_argument("physics.g must be >= 0");
    if (!std::isfinite(f) || !std::isfinite(beta_T) || !std::isfinite(T_r)) {
        throw std::invalid_argument("physics constants must be finite");
    }
}

SpectralState leray_project(const SpectralState& u) {
    const auto& d = u.domain();
    SpectralState out = u;
    for (int ky = -d.N2; ky <= d.N2; ++ky)
        for (int kx = -d.N1; kx <= d.N1; ++kx) {
            cplx& a = out.at(Component::V1, kx, ky, 0);
            cplx& b = out.at(Component::V2, kx, ky, 0);
            if (kx == 0 && ky == 0) {
                a = b = 0.0;
                continue;
            }
            const double k1 = d.kx_phys(kx);
            const double k2 = d.ky_phys(ky);
            const cplx dot = (k1 * a + k2 * b) / (k1 * k1 + k2 * k2);
            a -= k1 * dot;
            b -= k2 * dot;
        }
    return out;
}

double divergence_residual(const SpectralState& u) {
    const auto& d = u.domain();
    double r = 0.0;
    for (int ky = -d.N2; ky <= d.N2; ++ky)
        for (int kx = -d.N1; kx <= d.N1; ++kx)
            r += std::abs(d.kx_phys(kx) * u.at(Component::V1, kx, ky, 0) +
                          d.ky_phys(ky) * u.at(Component::V2, kx, ky, 0));
    return r;
}

ModalField vertical_velocity_modal(const SpectralState& u) {
    const auto& d = u.domain();
    const auto div = detail::divergence(u);
    ModalField w(d, VerticalKind::Sin);
    w.lin.assign(d.horizontal_modes(), cplx{});
    bool any_lin = false;
    for (int ky = -d.N2; ky <= d.N2; ++ky)
        for (int kx = -d.N1; kx <= d.N1; ++kx) {
            const std::size_t h0 = d.local_index(kx, ky, 0);
            w.lin[h0] = -div.c[h0];
            any_lin = any_lin || div.c[h0] != cplx{};
            for (int m = 1; m <= d.M; ++m) {
                const std::size_t i = d.local_index(kx, ky, m);
                w.c[i] = -div.c[i] / d.kz_phys(m);
            }
        }
    if (!any_lin) w.lin.clear();
    return w;
}

PhysicalField vertical_velocity(const SpectralState& u, GridKind kind) {
    return transformer(u.domain(), kind).synthesize(vertical_velocity_modal(u));
}

HorizontalField average_A2(const SpectralState& u) {
    const auto& d = u.domain();
    HorizontalField out(d);
    for (int ky = -d.N2; ky <= d.N2; ++ky)
        for (int kx = -d.N1; kx <= d.N1; ++kx) {
            out.v1[out.index(kx, ky)] = u.at(Component::V1, kx, ky, 0);
            out.v2[out.index(kx, ky)] = u.at(Component::V2, kx, ky, 0);
        }
    return out;
}

SpectralState lift(const HorizontalField& vbar) {
    const auto& d = vbar.domain;
    SpectralState out(d);
    for (int ky = -d.N2; ky <= d.N2; ++ky)
        for (int kx = -d.N1; kx <= d.N1; ++kx) {
            out.at(Component::V1, kx, ky, 0) = vbar.v1[vbar.index(kx, ky)];
            out.at(Component::V2, kx, ky, 0) = vbar.v2[vbar.index(kx, ky)];
        }
    return out;
}

SpectralState average_A3(const SpectralState& u) {
    auto out = lift(average_A2(u));
    out.time = u.time;
    return out;
}

SpectralState fluctuation_R(const SpectralState& u) { return only_baroclinic(u); }

HorizontalField leray_2d(const HorizontalField& v) { return average_A2(leray_project(lift(v))); }

SpectralState advection_raw(const SpectralState& u, const SpectralState& usharp, bool include_w) {
    require_same_domain(u, usharp, "advection");
    const auto& t = dealiased(u.domain());
    const auto carrier = detail::evaluate(u, t, {.values = true, .gradients = false, .temperature = false});
    const auto target = detail::evaluate(usharp, t, {.values = false, .gradients = true, .temperature = true});
    PhysicalField w;
    if (include_w) w = t.synthesize(vertical_velocity_modal(u));
    const auto prod = detail::advect(carrier.val[0], carrier.val[1], include_w ? &w : nullptr, target, true);
    return detail::analyze_triple(t, prod, u.time);
}

SpectralState bilinear_B(const SpectralState& u, const SpectralState& usharp) {
    return leray_project(advection_raw(u, usharp, true));
}

double trilinear_b(const SpectralState& u, const SpectralState& usharp, const SpectralState& uflat) {
    require_same_domain(u, usharp, "trilinear_b");
    require_same_domain(u, uflat, "trilinear_b");
    const auto& t = dealiased(u.domain());
    const auto carrier = detail::evaluate(u, t, {.values = true, .gradients = false, .temperature = false});
    const auto target = detail::evaluate(usharp, t, {.values = false, .gradients = true, .temperature = true});
    const auto test = detail::evaluate(leray_project(uflat), t, {.values = true, .gradients = false});
    const auto w = t.synthesize(vertical_velocity_modal(u));
    const auto prod = detail::advect(carrier.val[0], carrier.val[1], &w, target, true);
    PhysicalField integrand(t.shape());
    for (int c = 0; c < kComponents; ++c)
        for (std::size_t i = 0; i < integrand.values.size(); ++i)
            integrand.values[i] += prod[c].values[i] * test.val[c].values[i];
    return t.integrate(integrand);
}

ModalField pressure_integral(const SpectralState& u) {
    const auto& d = u.domain();
    const auto& J = cached_pressure_matrix(d.h, d.M);
    const int nm = d.nm();
    ModalField out(d, VerticalKind::Cos);
    for (int ky = -d.N2; ky <= d.N2; ++ky)
        for (int kx = -d.N1; kx <= d.N1; ++kx)
            for (int n = 0; n < nm; ++n) {
                cplx acc{};
                for (int m = 0; m < nm; ++m) acc += J[static_cast<std::size_t>(n) * nm + m] * u.at(Component::T, kx, ky, m);
                out.c[d.local_index(kx, ky, n)] = acc;
            }
    return out;
}

SpectralState pressure_buoyancy_Apr(const SpectralState& u, const PhysicsParams& p) {
    return leray_project(buoyancy_raw(u, p));
}

SpectralState coriolis_E(const SpectralState& u, const PhysicsParams& p) {
    return leray_project(coriolis_raw(u, p.f));
}

SpectralState forcing_F(const SpectralState& u, const PhysicsParams& p) {
    auto out = buoyancy_raw(u, p);
    out += coriolis_raw(u, p.f);
    return leray_project(out);
}

SpectralState forcing_F(const SpectralState& u, const PhysicsParams& p, const SpectralState& forcing) {
    if (!(forcing.domain() == u.domain())) throw std::invalid_argument("forcing_F: forcing field resolution mismatch");
    auto out = buoyancy_raw(u, p);
    out += coriolis_raw(u, p.f);
    out -= forcing;
    return leray_project(out);
}

SpectralState ModeSplit::reconstruct() const {
    auto out = lift(vbar);
    out += vtilde;
    return out;
}

ModeSplit mode_split(const SpectralState& u) {
    ModeSplit s;
    s.vbar = average_A2(u);
    s.vtilde = fluctuation_R(u);
    s.tag = domain_tag(u.domain());
    return s;
}

const std::array<const char*, 12>& SplitTerms::names() {
    static const std::array<const char*, 12> n = {
        "bt_viscous",          "bt_self_advection",    "bt_baroclinic_flux",   "bt_coriolis",
        "bt_buoyancy",         "bc_viscous",           "bc_self_advection",    "bc_shear_vtilde_vbar",
        "bc_shear_vbar_vtilde", "bc_flux_correction",  "bc_coriolis",          "bc_buoyancy"};
    return n;
}

const SpectralState& SplitTerms::term(std::size_t i) const {
    const SpectralState* t[12] = {&bt_viscous,          &bt_self_advection,    &bt_baroclinic_flux, &bt_coriolis,
                                  &bt_buoyancy,         &bc_viscous,           &bc_self_advection,  &bc_shear_vtilde_vbar,
                                  &bc_shear_vbar_vtilde, &bc_flux_correction,  &bc_coriolis,        &bc_buoyancy};
    if (i >= 12) throw std::out_of_range("SplitTerms::term");
    return *t[i];
}

SpectralState SplitTerms::barotropic_sum() const {
    auto s = bt_viscous;
    s += bt_self_advection;
    s += bt_baroclinic_flux;
    s += bt_coriolis;
    s += bt_buoyancy;
    return lift(leray_2d(average_A2(s)));
}

SpectralState SplitTerms::baroclinic_sum() const {
    auto s = bc_viscous;
    s += bc_self_advection;
    s += bc_shear_vtilde_vbar;
    s += bc_shear_vbar_vtilde;
    s += bc_flux_correction;
    s += bc_coriolis;
    s += bc_buoyancy;
    return s;
}

SpectralState SplitTerms::recombine() const {
    auto s = barotropic_sum();
    s += baroclinic_sum();
    return s;
}

SplitTerms baroclinic_rhs_terms(const ModeSplit& split, const SpectralState& u, const PhysicsParams& p) {
    const auto& d = u.domain();
    if (split.tag != domain_tag(d)) throw std::invalid_argument("baroclinic_rhs_terms: split from another domain");
    const auto& t = dealiased(d);
    const auto vb = lift(split.vbar);
    const auto& vt = split.vtilde;

    SplitTerms s;
    s.bt_viscous = apply_A_power(vb, 1.0);
    s.bt_self_advection = only_m0(advection_raw(vb, vb, false));

    // Q = (vt.grad) vt + (div vt) vt
    const auto ev = detail::evaluate(vt, t, {.values = true, .gradients = true, .temperature = false});
    const auto divp = t.synthesize(detail::divergence(vt));
    auto q = detail::advect(ev.val[0], ev.val[1], nullptr, ev, false);
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < q[c].values.size(); ++i) q[c].values[i] += divp.values[i] * ev.val[c].values[i];
    const auto Q = detail::analyze_triple(t, q, u.time);
    s.bt_baroclinic_flux = only_m0(Q);
    s.bc_flux_correction = -1.0 * only_m0(Q);

    const auto cor_b = coriolis_raw(vb, p.f);
    const auto cor_t = coriolis_raw(vt, p.f);
    s.bt_coriolis = cor_b;
    s.bc_coriolis = cor_t;

    const auto buo = buoyancy_raw(u, p);
    s.bt_buoyancy = only_m0(buo);
    s.bc_buoyancy = only_baroclinic(buo);

    s.bc_viscous = apply_A_power(vt, 1.0);
    s.bc_self_advection = advection_raw(vt, vt, true);
    s.bc_self_advection.clear(Component::T);
    s.bc_shear_vtilde_vbar = advection_raw(vt, vb, false);
    s.bc_shear_vtilde_vbar.clear(Component::T);
    s.bc_shear_vbar_vtilde = advection_raw(vb, vt, false);
    s.bc_shear_vbar_vtilde.clear(Component::T);
    return s;
}

SpectralState unsplit_velocity_rhs(const SpectralState& u, const PhysicsParams& p) {
    auto out = apply_A_power(u, 1.0);
    out += bilinear_B(u);
    out += forcing_F(u, p);
    out.clear(Component::T);
    return out;
}

}  // namespace stochpe
