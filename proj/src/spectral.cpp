#include "stochpe/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "stochpe/operators.hpp"
#include "stochpe/transform.hpp"

namespace stochpe {
namespace {

// Sum over all components and modes of weight(m) * g(kx, ky, m) * |c|^2.
template <class G>
double weighted_sum(const SpectralState& u, G&& g) {
    const auto& d = u.domain();
    double total = 0.0;
    for (int c = 0; c < kComponents; ++c) {
        const auto comp = static_cast<Component>(c);
        for (int m = 0; m <= d.M; ++m) {
            const double w = vertical_weight(m);
            for (int ky = -d.N2; ky <= d.N2; ++ky)
                for (int kx = -d.N1; kx <= d.N1; ++kx) {
                    const double a = std::norm(u.at(comp, kx, ky, m));
                    if (a != 0.0) total += w * g(comp, kx, ky, m) * a;
                }
        }
    }
    return total * d.volume();
}

}  // namespace

double inner_H(const SpectralState& a, const SpectralState& b) {
    require_same_domain(a, b, "inner_H");
    const auto& d = a.domain();
    double total = 0.0;
    for (int c = 0; c < kComponents; ++c) {
        const auto comp = static_cast<Component>(c);
        for (int m = 0; m <= d.M; ++m) {
            const double w = vertical_weight(m);
            for (int ky = -d.N2; ky <= d.N2; ++ky)
                for (int kx = -d.N1; kx <= d.N1; ++kx) {
                    const cplx x = a.at(comp, kx, ky, m);
                    const cplx y = b.at(comp, kx, ky, m);
                    total += w * (x.real() * y.real() + x.imag() * y.imag());
                }
        }
    }
    return total * d.volume();
}

double norm_s(const SpectralState& u, double s) {
    const auto& d = u.domain();
    return std::sqrt(weighted_sum(u, [&](Component, int kx, int ky, int m) {
        if (s == 0.0) return 1.0;
        return std::pow(d.lambda(kx, ky, m), 2.0 * s);
    }));
}

double form_a(const SpectralState& a, const SpectralState& b) { return inner_H(apply_A_power(a, 1.0), b); }

SpectralState apply_A_power(const SpectralState& u, double s) {
    if (!(s >= -1.0 && s <= 2.0)) throw std::domain_error("apply_A_power: exponent outside [-1, 2]");
    const auto& d = u.domain();
    SpectralState out(d, u.time);
    for (int c = 0; c < kComponents; ++c) {
        const auto comp = static_cast<Component>(c);
        for (int m = 0; m <= d.M; ++m)
            for (int ky = -d.N2; ky <= d.N2; ++ky)
                for (int kx = -d.N1; kx <= d.N1; ++kx) {
                    const double lam = d.lambda(kx, ky, m);
                    const cplx v = u.at(comp, kx, ky, m);
                    if (lam == 0.0) {
                        if (s < 0.0 && v != cplx{}) {
                            throw std::domain_error("apply_A_power: negative power of a state with a kernel component");
                        }
                        out.at(comp, kx, ky, m) = (s == 0.0) ? v : cplx{};
                    } else {
                        out.at(comp, kx, ky, m) = v * (s == 0.0 ? 1.0 : std::pow(lam, s));
                    }
                }
    }
    return out;
}

void apply_mask(SpectralState& u, const std::vector<std::uint8_t>& mask) {
    auto c = u.coeffs();
    if (mask.size() != c.size()) throw std::invalid_argument("apply_mask: size mismatch");
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!mask[i]) c[i] = 0.0;
}

SpectralState project_n(const SpectralState& u, const Basis& basis, std::size_t n) {
    if (!(basis.domain() == u.domain())) throw std::invalid_argument("project_n: basis/state domain mismatch");
    if (n > basis.size()) throw std::out_of_range("project_n: n exceeds the mode count");
    SpectralState out(u.domain(), u.time);
    auto src = u.coeffs();
    auto dst = out.coeffs();
    for (std::size_t r = 0; r < n; ++r) dst[basis.storage(r)] = src[basis.storage(r)];
    return out;
}

SpectralState complement_q(const SpectralState& u, const Basis& basis, std::size_t n) {
    if (!(basis.domain() == u.domain())) throw std::invalid_argument("complement_q: basis/state domain mismatch");
    if (n > basis.size()) throw std::out_of_range("complement_q: n exceeds the mode count");
    SpectralState out = u;
    auto dst = out.coeffs();
    for (std::size_t r = 0; r < n; ++r) dst[basis.storage(r)] = 0.0;
    return out;
}

double dz_norm2(const SpectralState& u, Component c) {
    const auto& d = u.domain();
    double total = 0.0;
    for (int m = 1; m <= d.M; ++m) {
        const double kz = d.kz_phys(m);
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx) total += 0.5 * kz * kz * std::norm(u.at(c, kx, ky, m));
    }
    return total * d.volume();
}

double grad3_dz_norm2(const SpectralState& u, Component c) {
    const auto& d = u.domain();
    double total = 0.0;
    for (int m = 1; m <= d.M; ++m) {
        const double kz2 = d.kz_phys(m) * d.kz_phys(m);
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx)
                total += 0.5 * (d.k2(kx, ky) * kz2 + kz2 * kz2) * std::norm(u.at(c, kx, ky, m));
    }
    return total * d.volume();
}

double dz_form_a(const SpectralState& u, Component c) {
    const auto& d = u.domain();
    double total = 0.0;
    for (int m = 1; m <= d.M; ++m) {
        const double kz2 = d.kz_phys(m) * d.kz_phys(m);
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx)
                total += 0.5 * kz2 * d.lambda(kx, ky, m) * std::norm(u.at(c, kx, ky, m));
    }
    return total * d.volume();
}

NormBundle norms(const SpectralState& u) {
    const auto& d = u.domain();
    NormBundle nb;
    nb.H = norm_H(u);
    nb.V = norm_V(u);
    nb.DA = norm_DA(u);
    double dz2 = 0.0;
    for (int c = 0; c < kComponents; ++c) dz2 += dz_norm2(u, static_cast<Component>(c));
    nb.L2_dz = std::sqrt(dz2);

    const auto& t = transformer(d, GridKind::Sextic);
    for (int c = 0; c < kComponents; ++c) {
        const auto comp = static_cast<Component>(c);
        auto f = t.synthesize(modal_component(u, comp));
        for (auto& v : f.values) {
            const double v2 = v * v;
            v = v2 * v2 * v2;
        }
        nb.L6[c] = std::pow(std::max(0.0, t.integrate(f)), 1.0 / 6.0);

        double top = 0.0;
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx) {
                cplx s{};
                for (int m = 0; m <= d.M; ++m) s += u.at(comp, kx, ky, m);
                top += std::norm(s);
            }
        nb.top_L2[c] = std::sqrt(top * d.area());
    }
    return nb;
}

SpectralState random_state(const DomainSpec& d, GaussianStream& rng, const RandomStateOptions& opt) {
    SpectralState out(d);
    for (int c = 0; c < kComponents; ++c) {
        const auto comp = static_cast<Component>(c);
        for (int m = 0; m <= d.M; ++m)
            for (int ky = -d.N2; ky <= d.N2; ++ky)
                for (int kx = -d.N1; kx <= d.N1; ++kx) {
                    // Visit each conjugate pair once, from its lexicographically larger member.
                    if (ky < 0 || (ky == 0 && kx < 0)) continue;
                    const double lam = d.lambda(kx, ky, m);
                    const double re = rng.normal();
                    const double im = rng.normal();
                    if (lam > opt.lambda_max) continue;
                    const double sd = opt.amplitude * std::pow(1.0 + lam, -opt.decay);
                    if (kx == 0 && ky == 0) {
                        const bool keep = (m > 0) || (comp == Component::T && opt.temperature_mean);
                        out.at(comp, 0, 0, m) = keep ? cplx(sd * re, 0.0) : cplx{};
                    } else {
                        const cplx v(sd * re / std::sqrt(2.0), sd * im / std::sqrt(2.0));
                        out.at(comp, kx, ky, m) = v;
                        out.at(comp, -kx, -ky, m) = std::conj(v);
                    }
                }
    }
    if (opt.divergence_free) out = leray_project(out);
    return out;
}

}  // namespace stochpe
