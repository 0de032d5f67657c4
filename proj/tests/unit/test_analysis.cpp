#include <cmath>

#include "doctest.h"
#include "stochpe/analysis.hpp"
#include "stochpe/rng.hpp"
#include "stochpe/spectral.hpp"

using namespace stochpe;

namespace {

DomainSpec dom(int n = 2) {
    DomainSpec d;
    d.N1 = n;
    d.N2 = n;
    d.M = n;
    d.L1 = 2.0;
    d.L2 = 2.0;
    d.h = 1.0;
    d.mu = 0.2;
    d.nu = 0.1;
    return d;
}

std::shared_ptr<const NoiseOperator> additive(const DomainSpec& d, double amp) {
    NoisePreset p;
    p.family = NoiseFamily::Example1;
    p.K = 1;
    p.chi_amp = amp;
    p.chi_kx = 1;
    p.chi_m = 1;
    p.chi_field = Component::T;
    return std::make_shared<NoiseOperator>(make_noise(d, p));
}

std::shared_ptr<const NoiseOperator> multiplicative(const DomainSpec& d) {
    NoisePreset p;
    p.family = NoiseFamily::Example1;
    p.K = 2;
    p.phi_const = 0.1;
    p.alpha = 0.2;
    p.chi_amp = 0.1;
    p.chi_field = Component::V1;
    return std::make_shared<NoiseOperator>(make_noise(d, p));
}

InitialCondition fixed(const SpectralState& u) {
    return [u](std::uint32_t) { return u; };
}

SpectralState initial(const DomainSpec& d, double amp = 0.3) {
    GaussianStream g(9, 1);
    return random_state(d, g, {.amplitude = amp, .decay = 1.5});
}

}  // namespace

TEST_CASE("moment") {
    const auto m = moment({1.0, 2.0, 3.0, 4.0});
    CHECK(m.mean == 2.5);
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(m.n == 4);
    CHECK(moment({}).n == 0);
    CHECK(loglog_slope({1, 10, 100}, {3, 30, 300}) == doctest::Approx(1.0));
    CHECK(loglog_slope({1, 2, 4}, {1, 0.25, 1.0 / 16}) == doctest::Approx(-2.0));
}

TEST_CASE("OU closed form") {
    const auto d = dom();
    SolverConfig c;
    c.domain = d;
    c.advection = false;
    c.noise = additive(d, 0.8);
    const double t = 0.7;
    // T = a cos(pi x) cos(pi z): |T|^2 = a^2 L1 L2 h / 4, one mode at lambda
    const double lam = d.lambda(1, 0, 1);
    const double expect = 0.64 * d.L1 * d.L2 * d.h / 4.0 * (1.0 - std::exp(-2.0 * lam * t)) / (2.0 * lam);
    CHECK(ou_mean_square(c, SpectralState(d), t) == doctest::Approx(expect).epsilon(1e-12));

    const auto u0 = initial(d);
    const double m = norm_H(solve_linear_Ustar(u0, {t})[0]);
    CHECK(ou_mean_square(c, u0, t) == doctest::Approx(expect + m * m).epsilon(1e-12));

    c.noise = multiplicative(d);
    CHECK_THROWS_AS(ou_mean_square(c, u0, t), std::invalid_argument);
}

TEST_CASE("OU ensemble and Ito isometry") {
    const auto d = dom();
    SolverConfig c;
    c.domain = d;
    c.advection = false;
    c.noise = additive(d, 0.8);
    c.dt = 0.01;
    c.t_end = 0.5;
    c.stride = 1000;
    EnsembleOptions opt;
    opt.paths = 400;
    const auto rep = run_ensemble(c, fixed(SpectralState(d)), opt);
    const auto& f = rep.final.at("H_norm2");
    const double exact = ou_mean_square(c, SpectralState(d), 0.5);
    CHECK(std::abs(f.mean - exact) <= 4.0 * f.se);
    CHECK(rep.blowups == 0);
    CHECK(rep.paths == 400);

    opt.paths = 200;
    const auto ito = ito_isometry_check(c, fixed(initial(d)), opt);
    // additive noise: the integrand is deterministic
    CHECK(ito.rhs.se <= 1e-12 * ito.rhs.mean);
    CHECK(std::abs(ito.lhs.mean - ito.rhs.mean) <= 4.0 * ito.lhs.se);
}

TEST_CASE("ensemble does not depend on the worker count") {
    const auto d = dom();
    SolverConfig c;
    c.domain = d;
    c.noise = multiplicative(d);
    c.dt = 0.02;
    c.t_end = 0.1;
    c.thresholds["N"] = 0.05;
    EnsembleOptions a, b;
    a.paths = b.paths = 6;
    b.workers = 3;
    const auto ra = run_ensemble(c, fixed(initial(d)), a);
    const auto rb = run_ensemble(c, fixed(initial(d)), b);
    CHECK(ra.final.at("V_norm2").mean == rb.final.at("V_norm2").mean);
    CHECK(ra.sup.at("H_norm2").se == rb.sup.at("H_norm2").se);
    CHECK(ra.hit_count.at("N") == rb.hit_count.at("N"));
    CHECK(ra.hit_count.count("tau") == 1);
    CHECK_THROWS_AS(run_ensemble(c, fixed(initial(d)), EnsembleOptions{.paths = 0}), std::invalid_argument);
}

TEST_CASE("pathwise uniqueness") {
    const auto d = dom();
    SolverConfig c;
    c.domain = d;
    c.noise = multiplicative(d);
    c.dt = 0.01;
    c.t_end = 0.2;
    const auto u0 = initial(d);
    const auto same = uniqueness_experiment(c, u0, 0.0);
    CHECK(same.identical);
    CHECK(same.sup_divergence == 0.0);
    std::vector<double> deltas = {1e-8, 1e-6, 1e-4}, div;
    for (double e : deltas) {
        const auto r = uniqueness_experiment(c, u0, e);
        CHECK(!r.identical);
        CHECK(r.sup_divergence >= e * 0.999);  // includes t = 0
        div.push_back(r.sup_divergence);
    }
    CHECK(loglog_slope(deltas, div) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("strong convergence study") {
    const auto d = dom();
    SolverConfig c;
    c.domain = d;
    c.noise = multiplicative(d);
    c.t_end = 0.16;
    const auto ic = fixed(initial(d));
    CHECK_THROWS_AS(strong_convergence(c, ic, {0.04, 0.03, 0.01}, 2), std::invalid_argument);
    CHECK_THROWS_AS(strong_convergence(c, ic, {0.04, 0.02}, 2), std::invalid_argument);
    const auto rep = strong_convergence(c, ic, {0.04, 0.02, 0.01}, 8);
    REQUIRE(rep.errors.size() == 3);
    CHECK(rep.dt_ref == doctest::Approx(0.005));
    CHECK(rep.dts.front() == 0.01);
    CHECK(rep.errors[0] < rep.errors[1]);
    CHECK(rep.errors[1] < rep.errors[2]);
    CHECK(rep.order > 0.45);
    MESSAGE("order = " << rep.order);
}

TEST_CASE("a-priori sweep and Gronwall envelope") {
    const auto d = dom();
    SolverConfig c;
    c.domain = d;
    c.noise = multiplicative(d);
    c.dt = 0.02;
    c.t_end = 0.1;
    EnsembleOptions opt;
    opt.paths = 10;
    CHECK_THROWS_AS(apriori_sweep(c, fixed(initial(d)), {20, 40}, 4.0, opt), std::invalid_argument);
    // initial data inside both subspaces
    GaussianStream rng(4, 1);
    const auto low = random_state(d, rng, {.amplitude = 0.3, .lambda_max = Basis(d).lambda_n(12)});
    opt.paths = 30;
    const auto rep = apriori_sweep(c, fixed(low), {20, 40}, 4.0, opt);
    REQUIRE(rep.ratios.size() == 1);
    CHECK(rep.pass);
    CHECK(rep.estimates[0].mean > 0.0);

    opt.paths = 10;
    const auto g = gronwall_envelope(c, fixed(initial(d)), opt);
    CHECK(std::isfinite(g.C_dt));
    CHECK(g.C_dt >= 1.0 - 1e-12);
    CHECK(g.ratio == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("hitting-time monotonicity and blow-up functional") {
    const auto d = dom();
    SolverConfig c;
    c.domain = d;
    c.noise = multiplicative(d);
    c.dt = 0.01;
    c.t_end = 0.2;
    const auto tr = run_trajectory(c, initial(d));
    const double N = functional_value(tr.records.back(), "N");
    std::vector<double> ks;
    for (int i = 0; i <= 10; ++i) ks.push_back(N * i / 8.0);
    CHECK(hitting_time_violations(tr.records, "N", ks) == 0);
    const auto b = blowup_functional(tr);
    CHECK(!b.aborted);
    CHECK(b.value == doctest::Approx(N));

    const auto errs = projection_errors(initial(d), {10, 50, 100, 200});
    for (std::size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] <= errs[i - 1]);
}
