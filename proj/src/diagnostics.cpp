#include "stochpe/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "kinematics.hpp"
#include "stochpe/operators.hpp"
#include "stochpe/solver.hpp"
#include "stochpe/spectral.hpp"
#include "stochpe/transform.hpp"

namespace stochpe {
namespace {

using Field = double DiagnosticRecord::*;

const std::vector<std::pair<std::string, Field>>& table() {
    static const std::vector<std::pair<std::string, Field>> t = {
        {"t", &DiagnosticRecord::t},
        {"H_norm2", &DiagnosticRecord::H2},
        {"V_norm2", &DiagnosticRecord::V2},
        {"DA_norm2", &DiagnosticRecord::DA2},
        {"L6_vtilde6", &DiagnosticRecord::L6_vtilde6},
        {"grad3_vtilde2_vtilde4", &DiagnosticRecord::grad3vt2_vt4},
        {"Vbar_H1_4", &DiagnosticRecord::Vbar_H1_4},
        {"Vbar_V2_AS2", &DiagnosticRecord::vbarV2_AS2},
        {"dz_v_L2_2", &DiagnosticRecord::dz_v2},
        {"dz_v_L2_4", &DiagnosticRecord::dz_v4},
        {"grad3_dz_v_L2_2", &DiagnosticRecord::grad3_dz_v2},
        {"L6_T6", &DiagnosticRecord::L6_T6},
        {"dz_T_L2_2", &DiagnosticRecord::dz_T2},
        {"dz_T_L2_4", &DiagnosticRecord::dz_T4},
        {"grad3_dz_T_L2_2", &DiagnosticRecord::grad3_dz_T2},
        {"top_T6", &DiagnosticRecord::top_T6},
        {"top_dzT2", &DiagnosticRecord::top_dzT2},
        {"theta", &DiagnosticRecord::theta},
        {"dist_to_Ustar", &DiagnosticRecord::dist_to_Ustar},
        {"sup_V_norm2", &DiagnosticRecord::sup_V2},
        {"int_V_norm2", &DiagnosticRecord::int_V2},
        {"int_DA_norm2", &DiagnosticRecord::int_DA2},
        {"int_H2_V2", &DiagnosticRecord::int_H2V2},
        {"int_DA2_V2", &DiagnosticRecord::int_DA2V2},
        {"int_w", &DiagnosticRecord::int_w},
        {"int_vtilde", &DiagnosticRecord::int_vt},
        {"int_Vbar_H1_4", &DiagnosticRecord::int_vbar_H1_4},
        {"int_Vbar_V2_AS2", &DiagnosticRecord::int_vbar_AS},
        {"int_dz_v", &DiagnosticRecord::int_dzv},
        {"int_T", &DiagnosticRecord::int_T},
    };
    return t;
}

double integrand_w(const DiagnosticRecord& r, double forcing_H2) { return r.H2 * r.V2 + r.V2 + forcing_H2; }
double integrand_vt(const DiagnosticRecord& r) { return r.L6_vtilde6 + r.grad3vt2_vt4; }
double integrand_dzv(const DiagnosticRecord& r) { return r.grad3_dz_v2 + r.dz_v2 * r.grad3_dz_v2; }
double integrand_T(const DiagnosticRecord& r) { return r.L6_T6 + r.dz_T2 * r.grad3_dz_T2; }

}  // namespace

const std::vector<std::string>& DiagnosticRecord::columns() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, f] : table()) n.push_back(name);
        return n;
    }();
    return names;
}

std::vector<double> DiagnosticRecord::values() const {
    std::vector<double> v;
    v.reserve(table().size());
    for (const auto& [name, f] : table()) v.push_back(this->*f);
    return v;
}

DiagnosticRecord record(const SpectralState& u, const SpectralState* ustar, double kappa, DiagnosticLevel level) {
    const auto& d = u.domain();
    DiagnosticRecord r;
    r.t = u.time;
    const double h = norm_H(u), v = norm_V(u), a = norm_DA(u);
    r.H2 = h * h;
    r.V2 = v * v;
    r.DA2 = a * a;

    double bh1 = 0.0, bv = 0.0, bas = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx) {
                const double c2 = std::norm(u.at(static_cast<Component>(c), kx, ky, 0));
                const double k2 = d.k2(kx, ky);
                bh1 += (1.0 + k2) * c2;
                bv += d.mu * k2 * c2;
                bas += d.mu * d.mu * k2 * k2 * c2;
            }
    bh1 *= d.area();
    r.Vbar_H1_4 = bh1 * bh1;
    r.vbarV2_AS2 = d.area() * bv * d.area() * bas;

    r.dz_v2 = dz_norm2(u, Component::V1) + dz_norm2(u, Component::V2);
    r.dz_v4 = r.dz_v2 * r.dz_v2;
    r.grad3_dz_v2 = grad3_dz_norm2(u, Component::V1) + grad3_dz_norm2(u, Component::V2);
    r.dz_T2 = dz_norm2(u, Component::T);
    r.dz_T4 = r.dz_T2 * r.dz_T2;
    r.grad3_dz_T2 = grad3_dz_norm2(u, Component::T);

    if (ustar) {
        r.dist_to_Ustar = norm_V(u - *ustar);
        if (kappa > 0.0) r.theta = cutoff_theta(r.dist_to_Ustar, kappa);
    }

    if (level == DiagnosticLevel::Full) {
        const auto& t = transformer(d, GridKind::Sextic);
        const auto vt = fluctuation_R(u);
        const auto ev = detail::evaluate(vt, t, {.values = true, .gradients = true, .temperature = false});
        const auto& sh = t.shape();
        PhysicalField f6(sh), g6(sh);
        for (std::size_t i = 0; i < sh.size(); ++i) {
            double n2 = 0.0, g2 = 0.0;
            for (int c = 0; c < 2; ++c) {
                n2 += ev.val[c].values[i] * ev.val[c].values[i];
                g2 += ev.dx[c].values[i] * ev.dx[c].values[i] + ev.dy[c].values[i] * ev.dy[c].values[i] +
                      ev.dz[c].values[i] * ev.dz[c].values[i];
            }
            f6.values[i] = n2 * n2 * n2;
            g6.values[i] = g2 * n2 * n2;
        }
        r.L6_vtilde6 = t.integrate(f6);
        r.grad3vt2_vt4 = t.integrate(g6);

        auto T = t.synthesize(modal_component(u, Component::T));
        for (auto& x : T.values) {
            const double x2 = x * x;
            x = x2 * x2 * x2;
        }
        r.L6_T6 = t.integrate(T);
        r.top_T6 = t.integrate_top(T);
    }
    return r;
}

void start_accumulation(DiagnosticRecord& first) {
    first.sup_V2 = first.V2;
    first.int_V2 = first.int_DA2 = first.int_H2V2 = first.int_DA2V2 = first.int_w = 0.0;
    first.int_vt = first.int_vbar_H1_4 = first.int_vbar_AS = first.int_dzv = first.int_T = 0.0;
}

void accumulate(DiagnosticRecord& next, const DiagnosticRecord& prev, double forcing_H2) {
    const double w = 0.5 * (next.t - prev.t);
    auto trap = [w](double a, double b) { return w * (a + b); };
    next.sup_V2 = std::max(prev.sup_V2, next.V2);
    next.int_V2 = prev.int_V2 + trap(prev.V2, next.V2);
    next.int_DA2 = prev.int_DA2 + trap(prev.DA2, next.DA2);
    next.int_H2V2 = prev.int_H2V2 + trap(prev.H2 * prev.V2, next.H2 * next.V2);
    next.int_DA2V2 = prev.int_DA2V2 + trap(prev.DA2 * prev.V2, next.DA2 * next.V2);
    next.int_w = prev.int_w + trap(integrand_w(prev, forcing_H2), integrand_w(next, forcing_H2));
    next.int_vt = prev.int_vt + trap(integrand_vt(prev), integrand_vt(next));
    next.int_vbar_H1_4 = prev.int_vbar_H1_4 + trap(prev.Vbar_H1_4, next.Vbar_H1_4);
    next.int_vbar_AS = prev.int_vbar_AS + trap(prev.vbarV2_AS2, next.vbarV2_AS2);
    next.int_dzv = prev.int_dzv + trap(integrand_dzv(prev), integrand_dzv(next));
    next.int_T = prev.int_T + trap(integrand_T(prev), integrand_T(next));
}

const std::vector<std::string>& stopping_functionals() {
    static const std::vector<std::string> names = {"N", "w", "vt", "gradvb", "dzv", "T"};
    return names;
}

double functional_value(const DiagnosticRecord& r, const std::string& name) {
    if (name == "N") return r.sup_V2 + r.int_DA2;
    if (name == "w") return r.int_w;
    if (name == "vt") return r.int_vt;
    if (name == "gradvb") return r.int_vbar_H1_4;
    if (name == "dzv") return r.int_dzv;
    if (name == "T") return r.int_T;
    throw std::invalid_argument("unknown stopping functional '" + name + "'");
}

std::optional<double> detect_stopping(const std::vector<DiagnosticRecord>& series, const std::string& name,
                                      double K) {
    if (series.empty()) return std::nullopt;
    double prev = functional_value(series.front(), name);
    if (prev >= K) return series.front().t;
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double cur = functional_value(series[i], name);
        if (cur >= K) {
            const double t0 = series[i - 1].t, t1 = series[i].t;
            const double s = cur > prev ? (K - prev) / (cur - prev) : 1.0;
            return t0 + std::clamp(s, 0.0, 1.0) * (t1 - t0);
        }
        prev = cur;
    }
    return std::nullopt;
}

std::string diagnostics_csv(const std::vector<DiagnosticRecord>& series) {
    std::string out;
    const auto& cols = DiagnosticRecord::columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ',';
        out += cols[i];
    }
    out += '\n';
    char buf[40];
    for (const auto& r : series) {
        const auto v = r.values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ',';
            std::snprintf(buf, sizeof buf, "%.17g", v[i]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace stochpe
