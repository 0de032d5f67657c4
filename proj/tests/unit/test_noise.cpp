#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "oracle.hpp"
#include "stochpe/checkpoint.hpp"
#include "stochpe/noise.hpp"
#include "stochpe/operators.hpp"
#include "stochpe/rng.hpp"
#include "stochpe/spectral.hpp"

using namespace stochpe;

namespace {

DomainSpec small_dom() {
    DomainSpec d;
    d.N1 = 3;
    d.N2 = 2;
    d.M = 3;
    d.L2 = 4.0;
    d.h = 1.2;
    d.mu = 0.7;
    d.nu = 0.5;
    return d;
}

double max_abs(const SpectralState& a) {
    double m = 0.0;
    for (auto c : a.coeffs()) m = std::max(m, std::abs(c));
    return m;
}

SpectralState rand_state(const DomainSpec& d, std::uint32_t stream, double amp = 1.0) {
    GaussianStream g(99, stream);
    RandomStateOptions o;
    o.amplitude = amp;
    o.decay = 0.5;
    return random_state(d, g, o);
}

// Random real coefficient field with every mode populated (not divergence free).
SpectralState rand_field(const DomainSpec& d, std::uint32_t stream, double amp) {
    GaussianStream g(7, stream);
    RandomStateOptions o;
    o.amplitude = amp;
    o.decay = 1.0;
    o.divergence_free = false;
    o.temperature_mean = true;
    return random_state(d, g, o);
}

// Cosine-basis coefficients of the Example 1 column, from pointwise evaluation and quadrature.
SpectralState column_oracle(const SpectralState& u, const SpectralState& phi, const SpectralState& chi, double alpha) {
    const auto& d = u.domain();
    const int nx = 4 * d.N1 + 2, ny = 4 * d.N2 + 2, nq = 40;
    std::vector<double> zs, ws;
    oracle::gauss_legendre(nq, -d.h, 0.0, zs, ws);
    std::array<std::vector<oracle::Mode>, 3> um, pm, cm;
    for (int c = 0; c < 3; ++c) {
        um[c] = oracle::modes_of(u, static_cast<Component>(c));
        pm[c] = oracle::modes_of(phi, static_cast<Component>(c));
        cm[c] = oracle::modes_of(chi, static_cast<Component>(c));
    }
    SpectralState out(d);
    const double pi = std::acos(-1.0);
    for (int iz = 0; iz < nq; ++iz)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const double x = d.L1 * ix / nx, y = d.L2 * iy / ny, z = zs[iz];
                const double p1 = oracle::jet(d, pm[0], x, y, z).f;
                const double p2 = oracle::jet(d, pm[1], x, y, z).f;
                const double ps = oracle::jet(d, pm[2], x, y, z).f;
                for (int c = 0; c < 3; ++c) {
                    const auto j = oracle::jet(d, um[c], x, y, z);
                    const double f = p1 * j.fx + p2 * j.fy + ps * j.fz + alpha * j.f + oracle::jet(d, cm[c], x, y, z).f;
                    for (int m = 0; m <= d.M; ++m) {
                        const double wz = ws[iz] * std::cos(pi * m * z / d.h) * (m == 0 ? 1.0 : 2.0) / d.h;
                        for (int ky = -d.N2; ky <= d.N2; ++ky)
                            for (int kx = -d.N1; kx <= d.N1; ++kx) {
                                const double ph = 2 * pi * (kx * x / d.L1 + ky * y / d.L2);
                                out.at(static_cast<Component>(c), kx, ky, m) +=
                                    f * wz * std::exp(cplx(0, -ph)) / double(nx * ny);
                            }
                    }
                }
            }
    return leray_project(out);
}

NoiseSpec single(const DomainSpec& d, NoiseFamily fam, SpectralState phi, SpectralState chi, double alpha) {
    NoiseSpec s;
    s.family = fam;
    s.domain = d;
    s.K = 1;
    s.phi = {std::move(phi)};
    s.chi = {std::move(chi)};
    s.alpha = {alpha};
    return s;
}

}  // namespace

TEST_CASE("zero noise gives zero columns") {
    const auto d = small_dom();
    NoisePreset p;
    p.family = NoiseFamily::Zero;
    p.K = 3;
    p.phi_const = 1.0;
    NoiseOperator op(make_noise(d, p));
    CHECK(op.is_zero());
    const auto u = rand_state(d, 1);
    for (const auto& c : op.columns(u)) CHECK(max_abs(c) == 0.0);
    NoisePreset q;
    q.family = NoiseFamily::Example1;
    q.K = 2;
    CHECK(NoiseOperator(make_noise(d, q)).is_zero());
}

TEST_CASE("additive-only column is the projected chi") {
    const auto d = small_dom();
    const auto chi = rand_field(d, 3, 1.0);
    NoiseOperator op(single(d, NoiseFamily::Example1, SpectralState(d), chi, 0.0));
    const auto u = rand_state(d, 2);
    const auto col = op.columns(u).at(0);
    CHECK(max_abs(col - leray_project(chi)) < 1e-14);
    CHECK(max_abs(op.linear_columns(u).at(0)) == 0.0);
}

TEST_CASE("example1 column matches pointwise quadrature") {
    const auto d = small_dom();
    const auto phi = rand_field(d, 4, 0.3);
    const auto chi = rand_field(d, 5, 0.2);
    const auto u = rand_state(d, 6);
    NoiseOperator op(single(d, NoiseFamily::Example1, phi, chi, 0.4));
    const auto col = op.columns(u).at(0);
    const auto ref = column_oracle(u, phi, chi, 0.4);
    CHECK(max_abs(col - ref) < 1e-11 * std::max(1.0, max_abs(ref)));
    CHECK(col.reality_defect() < 1e-14);
    CHECK(divergence_residual(col) < 1e-12);
}

TEST_CASE("apply is the dW-weighted sum of columns") {
    const auto d = small_dom();
    NoisePreset p;
    p.family = NoiseFamily::Example1;
    p.K = 4;
    p.phi_const = 0.3;
    p.phi_wave_amp = 0.2;
    p.phi_wave_m = 1;
    p.psi_wave_amp = 0.1;
    p.alpha = 0.2;
    p.chi_amp = 0.5;
    p.wave = 2;
    NoiseOperator op(make_noise(d, p));
    const auto u = rand_state(d, 8);
    const std::vector<double> dW{0.3, -1.1, 0.7, 0.05};
    const auto cols = op.columns(u);
    SpectralState ref(d);
    for (std::size_t k = 0; k < 4; ++k) ref.axpy(dW[k], cols[k]);
    CHECK(max_abs(op.apply(u, dW) - ref) < 1e-12 * max_abs(ref));
    CHECK_THROWS_AS(op.apply(u, {1.0}), std::invalid_argument);
}

TEST_CASE("example2 baroclinic part is alpha R v + R chi") {
    const auto d = small_dom();
    NoisePreset p;
    p.family = NoiseFamily::Example2;
    p.K = 3;
    p.phi_const = 0.4;
    p.phi_wave_amp = 0.3;
    p.alpha = 0.25;
    p.chi_amp = 0.6;
    p.chi_field = Component::V1;
    p.chi_m = 2;
    p.temperature = false;
    const auto spec = make_noise(d, p);
    NoiseOperator op(spec);
    const auto u = rand_state(d, 9);
    const auto cols = op.columns(u);
    for (std::size_t k = 0; k < 3; ++k) {
        auto expect = spec.alpha[k] * fluctuation_R(u);
        expect += fluctuation_R(spec.chi[k]);
        CHECK(max_abs(fluctuation_R(cols[k]) - expect) < 1e-10);
    }
}

TEST_CASE("example2 rejects z-dependent phi and psi") {
    const auto d = small_dom();
    NoisePreset p;
    p.family = NoiseFamily::Example2;
    p.K = 1;
    p.phi_wave_amp = 0.3;
    p.phi_wave_m = 1;
    CHECK_THROWS_AS(make_noise(d, p), std::invalid_argument);
    p.phi_wave_m = 0;
    p.psi_const = 0.1;
    CHECK_THROWS_AS(make_noise(d, p), std::invalid_argument);
}

TEST_CASE("noise constants of constant coefficients") {
    const auto d = small_dom();
    NoisePreset p;
    p.family = NoiseFamily::Example1;
    p.K = 3;
    p.decay = 0.5;
    p.phi_const = 0.2;
    p.psi_const = 0.1;
    p.alpha = 0.3;
    const auto c = make_noise(d, p).constants();
    const double s = 1.0 + 0.25 + 0.0625;
    CHECK(c.theta0 == doctest::Approx(std::sqrt(s * (0.04 + 0.01))).epsilon(1e-12));
    CHECK(c.theta1 < 1e-12);
    CHECK(c.alpha == doctest::Approx(0.3 * std::sqrt(s)).epsilon(1e-12));
    CHECK(c.kappa == 0.0);
}

TEST_CASE("constant transport column and its V bound") {
    const auto d = small_dom();
    SpectralState phi(d);
    phi.at(Component::V1, 0, 0, 0) = 0.3;
    phi.at(Component::V2, 0, 0, 0) = -0.2;
    NoiseOperator op(single(d, NoiseFamily::Example1, phi, SpectralState(d), 0.0));
    const auto u = rand_state(d, 10);
    SpectralState ref(d);
    for (int c = 0; c < 3; ++c)
        for (int m = 0; m <= d.M; ++m)
            for (int ky = -d.N2; ky <= d.N2; ++ky)
                for (int kx = -d.N1; kx <= d.N1; ++kx) {
                    const auto comp = static_cast<Component>(c);
                    ref.at(comp, kx, ky, m) =
                        cplx(0, 0.3 * d.kx_phys(kx) - 0.2 * d.ky_phys(ky)) * u.at(comp, kx, ky, m);
                }
    const auto cols = op.columns(u);
    CHECK(max_abs(cols[0] - leray_project(ref)) < 1e-12);
    // |(phi.grad) U|_V <= |phi| |grad U|_V and grad is bounded by A/mu in each direction
    const double th0 = op.spec().constants().theta0;
    const double lhs = hs_norm2(cols, NormSpace::V);
    CHECK(lhs <= th0 * th0 / d.mu * std::pow(norm_DA(u), 2) * (1 + 1e-12));
}

TEST_CASE("hs norms and tails") {
    const auto d = small_dom();
    std::vector<SpectralState> cols{rand_state(d, 11), rand_state(d, 12), rand_state(d, 13)};
    const double full = hs_norm2(cols, NormSpace::V);
    double s = 0.0;
    for (auto& c : cols) s += form_a(c, c);
    CHECK(full == doctest::Approx(s).epsilon(1e-12));
    CHECK(hs_tail2(cols, 1, NormSpace::V) == doctest::Approx(full - std::pow(norm_V(cols[0]), 2)).epsilon(1e-12));
    CHECK(hs_tail2(cols, 3, NormSpace::H) == 0.0);
    CHECK(hs_norm(cols, NormSpace::H) == doctest::Approx(std::sqrt(hs_norm2(cols, NormSpace::H))));
}

TEST_CASE("envelope fit") {
    std::vector<double> x1, x2, y;
    for (int i = 0; i < 50; ++i) {
        x1.push_back(1.0 + i);
        x2.push_back(std::pow(1.3, i));
        y.push_back(2.0 * x1.back() + 0.3 * x2.back());
    }
    const auto f = fit_envelope(y, x1, x2);
    CHECK(f.a == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(f.b == doctest::Approx(2.0).epsilon(1e-6));
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] <= f.b * x1[i] + f.a * x2[i] + 1e-9 * y[i]);
    const auto z = fit_envelope(std::vector<double>(5, 0.0), std::vector<double>(5, 1.0), {1, 2, 3, 4, 5});
    CHECK(z.a == 0.0);
    CHECK(z.b == 0.0);
    CHECK_THROWS_AS(fit_envelope({1, 2}, {1, 1}, {3, 3}), std::domain_error);
}

TEST_CASE("thresholds") {
    HypothesisReport r;
    r.p = 4;
    r.C_BDG = 2;
    r.eta1 = 1.0 / 19 - 1e-9;
    r.gamma = 0.49;
    apply_thresholds(r, 0.7, 0.5);
    CHECK(r.eta1_bound == doctest::Approx(1.0 / 19));
    CHECK(r.gamma_bound == doctest::Approx(0.5));
    CHECK(r.eta0_bound == doctest::Approx(2.0 / 11));
    CHECK(r.eta2_bound == doctest::Approx(1.0 / 5.5));
    CHECK(r.eta3_bound == doctest::Approx(0.5 / 8));
    CHECK(r.maximal_pass());
    r.eta1 = 1.0 / 19;
    apply_thresholds(r, 0.7, 0.5);
    CHECK_FALSE(r.eta1_pass);
    r.p = 2;
    apply_thresholds(r, 0.7, 0.5);
    CHECK(r.eta1_bound == doctest::Approx(1.0 / 9));
}

TEST_CASE("growth-constant estimator") {
    DomainSpec d;
    d.N1 = d.N2 = d.M = 3;
    SUBCASE("zero noise") {
        NoisePreset p;
        p.family = NoiseFamily::Zero;
        p.K = 2;
        const auto r = estimate_growth_constants(NoiseOperator(make_noise(d, p)), 20, 4.0);
        CHECK(r.eta0 == 0.0);
        CHECK(r.eta1 == 0.0);
        CHECK(r.eta2 == 0.0);
        CHECK(r.eta3 == 0.0);
        CHECK(r.gamma == 0.0);
        CHECK(r.global_pass());
    }
    SUBCASE("constant coefficients stay far below threshold") {
        NoisePreset p;
        p.family = NoiseFamily::Example1;
        p.K = 2;
        p.phi_const = 0.02;
        p.psi_const = 0.01;
        p.alpha = 0.1;
        p.chi_amp = 0.5;
        const auto r = estimate_growth_constants(NoiseOperator(make_noise(d, p)), 60, 4.0);
        MESSAGE("eta1 = " << r.eta1 << ", gamma = " << r.gamma);
        CHECK(r.eta1 <= 1e-3);
        CHECK(r.maximal_pass());
    }
    SUBCASE("large gradients fail H4") {
        NoisePreset p;
        p.family = NoiseFamily::Example1;
        p.K = 2;
        p.phi_wave_amp = 1.0;
        p.phi_wave_m = 1;
        const auto r = estimate_growth_constants(NoiseOperator(make_noise(d, p)), 60, 4.0);
        MESSAGE("eta1 = " << r.eta1 << ", gamma = " << r.gamma);
        CHECK(r.eta1 > r.eta1_bound);
        CHECK_FALSE(r.maximal_pass());
    }
}

TEST_CASE("checkpoint and noise-field files round trip") {
    const auto d = small_dom();
    auto u = rand_state(d, 14);
    u.time = 0.125;
    const auto v = checkpoint_from_string(checkpoint_to_string(u));
    CHECK(v.domain() == d);
    CHECK(v.time == 0.125);
    CHECK(max_abs(u - v) == 0.0);
    CHECK_THROWS(checkpoint_from_string(R"({"format":"other"})"));

    NoisePreset p;
    p.family = NoiseFamily::Example1;
    p.K = 2;
    p.phi_wave_amp = 0.1;
    p.chi_amp = 0.3;
    p.alpha = 0.2;
    const auto spec = make_noise(d, p);
    const auto path = (std::filesystem::temp_directory_path() / "stochpe_noise_rt.json").string();
    save_noise_fields(path, spec);
    const auto back = load_noise_fields(path, d);
    std::remove(path.c_str());
    CHECK(back.K == 2);
    CHECK(back.alpha == spec.alpha);
    CHECK(max_abs(back.phi[1] - spec.phi[1]) == 0.0);
    CHECK(max_abs(back.chi[0] - spec.chi[0]) == 0.0);
}
