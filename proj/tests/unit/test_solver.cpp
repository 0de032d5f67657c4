#include <cmath>
#include <cstring>

#include "doctest.h"
#include "stochpe/operators.hpp"
#include "stochpe/rng.hpp"
#include "stochpe/solver.hpp"
#include "stochpe/spectral.hpp"

using namespace stochpe;

namespace {

DomainSpec dom(int n = 3) {
    DomainSpec d;
    d.N1 = n;
    d.N2 = n;
    d.M = n;
    d.L2 = 1.5;
    d.h = 0.8;
    d.mu = 0.3;
    d.nu = 0.2;
    return d;
}

SpectralState initial(const DomainSpec& d, std::uint64_t seed = 3, double amp = 0.5) {
    GaussianStream g(seed, 1);
    return random_state(d, g, {.amplitude = amp, .decay = 1.5});
}

bool bitwise_equal(const SpectralState& a, const SpectralState& b) {
    const auto x = a.coeffs();
    const auto y = b.coeffs();
    return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size_bytes()) == 0;
}

std::shared_ptr<const NoiseOperator> example1(const DomainSpec& d) {
    NoisePreset p;
    p.family = NoiseFamily::Example1;
    p.K = 3;
    p.phi_const = 0.2;
    p.alpha = 0.1;
    p.chi_amp = 0.3;
    p.chi_field = Component::V1;
    return std::make_shared<NoiseOperator>(make_noise(d, p));
}

}  // namespace

TEST_CASE("cutoff theta") {
    CHECK(cutoff_theta(0.0, 2.0) == 1.0);
    CHECK(cutoff_theta(1.0, 2.0) == 1.0);
    CHECK(cutoff_theta(-1.0, 2.0) == 1.0);
    CHECK(cutoff_theta(2.0, 2.0) == 0.0);
    CHECK(cutoff_theta(5.0, 2.0) == 0.0);
    CHECK(cutoff_theta(1.5, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(cutoff_theta(1.0, 0.0), std::invalid_argument);
    double prev = 1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double th = cutoff_theta(1.2 * i / 1000.0, 1.0);
        CHECK(th >= 0.0);
        CHECK(th <= 1.0);
        CHECK(th <= prev);
        prev = th;
    }
    // smooth junctions
    CHECK(cutoff_theta(0.5 + 1e-3, 1.0) > 1.0 - 1e-12);
    CHECK(cutoff_theta(1.0 - 1e-3, 1.0) < 1e-12);
}

TEST_CASE("config validation") {
    SolverConfig c;
    c.domain = dom();
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.t_end = 0.0105;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.dt = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.n_galerkin = c.domain.total_modes() + 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.thresholds["nope"] = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.stride = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK(scheme_from_string("semi-implicit") == Scheme::SemiImplicit);
    CHECK(equation_from_string(to_string(Equation::Original)) == Equation::Original);
    CHECK_THROWS_AS(scheme_from_string("euler"), std::invalid_argument);
}

TEST_CASE("linear exactness of the exponential scheme") {
    SolverConfig c;
    c.domain = dom();
    c.advection = false;
    c.dt = 0.01;
    c.t_end = 0.5;
    const auto u0 = initial(c.domain);
    const auto tr = run_trajectory(c, u0);
    const auto ref = solve_linear_Ustar(u0, {0.5})[0];
    CHECK(norm_H(tr.final_state - ref) <= 1e-12 * norm_H(ref));
    CHECK(tr.final_state.time == doctest::Approx(0.5));
    CHECK(!tr.blew_up);
    CHECK(tr.steps == 50);
    // U* tracks the same solution
    CHECK(tr.records.back().dist_to_Ustar <= 1e-12 * norm_V(ref));
}

TEST_CASE("semi-implicit linear step") {
    SolverConfig c;
    c.domain = dom();
    c.advection = false;
    c.scheme = Scheme::SemiImplicit;
    c.dt = 0.05;
    c.t_end = 0.05;
    SpectralState u0(c.domain);
    u0.at(Component::T, 1, 0, 1) = 0.5;
    u0.at(Component::T, -1, 0, 1) = 0.5;
    const auto tr = run_trajectory(c, u0);
    const double lam = c.domain.lambda(1, 0, 1);
    CHECK(std::real(tr.final_state.at(Component::T, 1, 0, 1)) == doctest::Approx(0.5 / (1 + lam * c.dt)).epsilon(1e-14));
}

TEST_CASE("energy identity of the linear flow") {
    SolverConfig c;
    c.domain = dom(2);
    c.advection = false;
    c.dt = 1e-4;
    c.t_end = 0.2;
    const auto tr = run_trajectory(c, initial(c.domain));
    const auto& a = tr.records.front();
    const auto& b = tr.records.back();
    // |U(t)|^2 + 2 int ||U||^2 = |U0|^2
    CHECK(std::abs(b.H2 + 2.0 * b.int_V2 - a.H2) <= 1e-6 * a.H2);
}

TEST_CASE("drifts") {
    SolverConfig c;
    c.domain = dom();
    c.physics.f = 0.7;
    c.physics.beta_T = 0.2;
    c.physics.g = 1.5;
    const GalerkinSystem sys(c);
    const auto u = initial(c.domain);

    // theta = 1 inside the cutoff ball: modified == original
    const auto dm = sys.drift_modified(u, u, 1.0);
    const auto dor = sys.drift_original(u);
    CHECK(bitwise_equal(dm, dor));
    // theta = 0 far outside: advection switched off
    SpectralState far = u;
    far *= 100.0;
    auto nonadv = sys.explicit_drift(u, 0.0);
    auto au = apply_A_power(u, 1.0);
    nonadv -= au;
    CHECK(norm_H(sys.drift_modified(u, far, 1.0) - nonadv) <= 1e-14 * norm_H(nonadv));

    CHECK(norm_H(sys.drift_original(SpectralState(c.domain))) == 0.0);
    // advection conserves energy
    CHECK(std::abs(inner_H(bilinear_B(u), u)) <= 1e-12 * norm_H(u) * norm_DA(u) * norm_V(u));
}

TEST_CASE("determinism and paths") {
    SolverConfig c;
    c.domain = dom();
    c.noise = example1(c.domain);
    c.dt = 0.01;
    c.t_end = 0.1;
    c.seed = 42;
    const auto u0 = initial(c.domain);
    const auto a = run_trajectory(c, u0);
    const auto b = run_trajectory(c, u0);
    CHECK(bitwise_equal(a.final_state, b.final_state));
    auto c2 = c;
    c2.path = 1;
    CHECK(!bitwise_equal(run_trajectory(c2, u0).final_state, a.final_state));
    c2 = c;
    c2.seed = 43;
    CHECK(!bitwise_equal(run_trajectory(c2, u0).final_state, a.final_state));

    // the increment source override reproduces the sampler
    const GalerkinSystem sys(c);
    const auto d = run_trajectory(c, u0, [&](std::uint64_t s) { return sys.increments(s); });
    CHECK(bitwise_equal(d.final_state, a.final_state));
}

TEST_CASE("nested noise substeps share one Brownian path") {
    SolverConfig c;
    c.domain = dom();
    c.noise = example1(c.domain);
    c.dt = 0.02;
    c.t_end = 0.04;
    c.noise_substeps = 4;
    auto f = c;
    f.dt = 0.01;
    f.noise_substeps = 2;
    const GalerkinSystem coarse(c), fine(f);
    for (std::uint64_t s = 0; s < 2; ++s) {
        const auto w = coarse.increments(s);
        const auto w0 = fine.increments(2 * s);
        const auto w1 = fine.increments(2 * s + 1);
        for (std::size_t k = 0; k < w.size(); ++k) CHECK(w[k] == doctest::Approx(w0[k] + w1[k]).epsilon(1e-14));
    }
}

TEST_CASE("stopping time and cutoff radius") {
    SolverConfig c;
    c.domain = dom();
    c.noise = example1(c.domain);
    c.dt = 0.01;
    c.t_end = 0.2;
    c.kappa_cutoff = 1e-9;
    c.stop_at_tau = true;
    const auto tr = run_trajectory(c, initial(c.domain));
    REQUIRE(tr.hits.at("tau").has_value());
    CHECK(*tr.hits.at("tau") == doctest::Approx(0.01));
    CHECK(tr.steps == 1);
    CHECK(tr.tau_step == std::optional<std::size_t>(1));

    // default radius
    c.kappa_cutoff = 0.0;
    c.stop_at_tau = false;
    c.t_end = 0.01;
    const auto u0 = initial(c.domain);
    CHECK(run_trajectory(c, u0).kappa == doctest::Approx(0.5 * norm_V(u0)));
    CHECK(run_trajectory(c, SpectralState(c.domain)).kappa == 1.0);
}

TEST_CASE("Galerkin subspace is invariant") {
    SolverConfig c;
    c.domain = dom();
    c.noise = example1(c.domain);
    c.physics.f = 0.5;
    c.n_galerkin = 30;
    c.dt = 0.01;
    c.t_end = 0.1;
    const GalerkinSystem sys(c);
    CHECK(sys.n_effective() >= 30);
    const auto tr = run_trajectory(c, initial(c.domain));
    const auto& mask = sys.mask();
    const auto co = tr.final_state.coeffs();
    double outside = 0.0, inside = 0.0;
    for (std::size_t i = 0; i < co.size(); ++i) (mask[i] ? inside : outside) += std::abs(co[i]);
    CHECK(outside == 0.0);
    CHECK(inside > 0.0);
    CHECK(divergence_residual(tr.final_state) < 1e-12);
    CHECK(tr.n_effective == sys.n_effective());
}

TEST_CASE("blow-up is reported") {
    SolverConfig c;
    c.domain = dom();
    c.dt = 0.01;
    c.t_end = 0.1;
    c.blowup_norm = 1e-6;
    const auto tr = run_trajectory(c, initial(c.domain));
    CHECK(tr.blew_up);
    CHECK(tr.steps == 1);
}

TEST_CASE("threshold hits and stride") {
    SolverConfig c;
    c.domain = dom();
    c.dt = 0.01;
    c.t_end = 0.1;
    c.stride = 3;
    c.thresholds["N"] = 0.0;
    c.thresholds["w"] = 1e30;
    const auto tr = run_trajectory(c, initial(c.domain));
    CHECK(tr.records.size() == 5);  // t = 0, 0.03, 0.06, 0.09, 0.1
    CHECK(tr.records.back().t == doctest::Approx(0.1));
    CHECK(tr.hits.at("N") == std::optional<double>(0.0));
    CHECK(!tr.hits.at("w").has_value());
}

TEST_CASE("stochastic integral tracking") {
    SolverConfig c;
    c.domain = dom();
    c.noise = example1(c.domain);
    c.dt = 0.01;
    c.t_end = 0.05;
    c.track_stochastic_integral = true;
    c.advection = false;
    const auto tr = run_trajectory(c, initial(c.domain));
    CHECK(tr.ito_integrand > 0.0);
    CHECK(norm_H(tr.stochastic_integral) > 0.0);
}
