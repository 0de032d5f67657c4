#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "stochpe/diagnostics.hpp"
#include "stochpe/rng.hpp"
#include "stochpe/spectral.hpp"

using namespace stochpe;

namespace {

DomainSpec dom() {
    DomainSpec d;
    d.N1 = 2;
    d.N2 = 2;
    d.M = 2;
    d.L1 = 1.3;
    d.L2 = 0.9;
    d.h = 0.7;
    d.mu = 0.4;
    d.nu = 0.25;
    return d;
}

// int f over the box on a tensor grid: uniform in x, y (exact for trig
// polynomials below n) and Gauss-Legendre in z.
template <class F>
double box_integral(const DomainSpec& d, int nxy, int nz, F f) {
    std::vector<double> zs, ws;
    oracle::gauss_legendre(nz, -d.h, 0.0, zs, ws);
    double s = 0.0;
    for (int i = 0; i < nxy; ++i)
        for (int j = 0; j < nxy; ++j)
            for (int k = 0; k < nz; ++k) s += ws[k] * f(d.L1 * i / nxy, d.L2 * j / nxy, zs[k]);
    return s * d.L1 * d.L2 / (nxy * nxy);
}

}  // namespace

TEST_CASE("zero state") {
    const auto r = record(SpectralState(dom()), nullptr, 0.0);
    const auto v = r.values();
    const auto& cols = DiagnosticRecord::columns();
    REQUIRE(v.size() == cols.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (cols[i] == "theta") {
            CHECK(v[i] == 1.0);
        } else {
            CHECK(v[i] == 0.0);
        }
    }
}

TEST_CASE("z-independent velocity has no fluctuation") {
    const auto d = dom();
    SpectralState u(d);
    u.at(Component::V1, 0, 1, 0) = cplx(0.3, 0.1);
    u.at(Component::V1, 0, -1, 0) = cplx(0.3, -0.1);
    const auto r = record(u, nullptr, 0.0);
    CHECK(r.L6_vtilde6 == doctest::Approx(0.0).scale(1.0));
    CHECK(r.grad3vt2_vt4 == doctest::Approx(0.0).scale(1.0));
    CHECK(r.dz_v2 == 0.0);
    CHECK(r.Vbar_H1_4 > 0.0);
}

TEST_CASE("sextic functionals against a pointwise quadrature") {
    const auto d = dom();
    GaussianStream g(11, 2);
    auto u = random_state(d, g, {.amplitude = 0.7, .decay = 0.5});
    u.at(Component::T, 0, 0, 0) = 0.4;
    const auto r = record(u, nullptr, 0.0);

    // vtilde: velocity without its m = 0 modes
    std::vector<oracle::Mode> v1, v2;
    for (const auto& m : oracle::modes_of(u, Component::V1))
        if (m.m > 0) v1.push_back(m);
    for (const auto& m : oracle::modes_of(u, Component::V2))
        if (m.m > 0) v2.push_back(m);
    const auto T = oracle::modes_of(u, Component::T);

    const int nxy = 4 * (6 * d.N1 + 1), nz = 40;
    const double l6 = box_integral(d, nxy, nz, [&](double x, double y, double z) {
        const auto a = oracle::jet(d, v1, x, y, z), b = oracle::jet(d, v2, x, y, z);
        const double n2 = a.f * a.f + b.f * b.f;
        return n2 * n2 * n2;
    });
    const double gv = box_integral(d, nxy, nz, [&](double x, double y, double z) {
        const auto a = oracle::jet(d, v1, x, y, z), b = oracle::jet(d, v2, x, y, z);
        const double n2 = a.f * a.f + b.f * b.f;
        const double g2 = a.fx * a.fx + a.fy * a.fy + a.fz * a.fz + b.fx * b.fx + b.fy * b.fy + b.fz * b.fz;
        return g2 * n2 * n2;
    });
    const double t6 = box_integral(d, nxy, nz, [&](double x, double y, double z) {
        return std::pow(oracle::jet(d, T, x, y, z).f, 6);
    });
    double top = 0.0;
    for (int i = 0; i < nxy; ++i)
        for (int j = 0; j < nxy; ++j) top += std::pow(oracle::jet(d, T, d.L1 * i / nxy, d.L2 * j / nxy, 0.0).f, 6);
    top *= d.L1 * d.L2 / (nxy * nxy);

    CHECK(r.L6_vtilde6 == doctest::Approx(l6).epsilon(1e-6));
    CHECK(r.grad3vt2_vt4 == doctest::Approx(gv).epsilon(1e-6));
    CHECK(r.L6_T6 == doctest::Approx(t6).epsilon(1e-6));
    CHECK(r.top_T6 == doctest::Approx(top).epsilon(1e-6));
    CHECK(r.top_dzT2 == 0.0);

    // dz_v and its gradient
    const double dzv = box_integral(d, 4 * d.N1 + 2, 20, [&](double x, double y, double z) {
        const auto a = oracle::jet(d, v1, x, y, z), b = oracle::jet(d, v2, x, y, z);
        return a.fz * a.fz + b.fz * b.fz;
    });
    CHECK(r.dz_v2 == doctest::Approx(dzv).epsilon(1e-10));
    CHECK(r.dz_v4 == doctest::Approx(dzv * dzv).epsilon(1e-10));

    // Basic level leaves the quadratures out
    const auto rb = record(u, nullptr, 0.0, DiagnosticLevel::Basic);
    CHECK(rb.L6_vtilde6 == 0.0);
    CHECK(rb.H2 == r.H2);
}

TEST_CASE("accumulation and stopping detection") {
    std::vector<DiagnosticRecord> s(5);
    for (int i = 0; i < 5; ++i) {
        s[i].t = 0.1 * i;
        s[i].V2 = 1.0 + i;
        s[i].DA2 = 2.0;
        s[i].H2 = 1.0;
    }
    start_accumulation(s[0]);
    for (int i = 1; i < 5; ++i) accumulate(s[i], s[i - 1], 0.5);
    CHECK(s[4].sup_V2 == 5.0);
    CHECK(s[4].int_DA2 == doctest::Approx(0.8));
    CHECK(s[4].int_V2 == doctest::Approx(0.4 * 3.0));
    // int (H2 V2 + V2 + F2) = int 2 V2 + 0.5
    CHECK(s[4].int_w == doctest::Approx(2.0 * 1.2 + 0.2));

    // N(t) = sup V2 + int DA2: 1, 2.2, 3.4, 4.6, 5.8
    CHECK(detect_stopping(s, "N", 0.0) == std::optional<double>(0.0));
    CHECK(!detect_stopping(s, "N", 6.0).has_value());
    CHECK(*detect_stopping(s, "N", 2.8) == doctest::Approx(0.15));
    double prev = 0.0;
    for (double K = 1.0; K < 5.8; K += 0.25) {
        const double t = *detect_stopping(s, "N", K);
        CHECK(t >= prev);
        prev = t;
    }
    CHECK_THROWS_AS(functional_value(s[0], "bogus"), std::invalid_argument);
    CHECK(stopping_functionals().size() == 6);

    const auto csv = diagnostics_csv(s);
    CHECK(csv.rfind("t,H_norm2,V_norm2,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}
