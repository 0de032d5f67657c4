// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   stochpe_acceptance            all criteria
//   stochpe_acceptance 5 9        a subset

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stochpe/analysis.hpp"
#include "stochpe/config.hpp"
#include "stochpe/diagnostics.hpp"
#include "stochpe/spectral.hpp"
#include "stochpe/verify.hpp"

using namespace stochpe;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

VerifyOptions verify_at_8() {
    VerifyOptions o;
    o.domain.N1 = o.domain.N2 = o.domain.M = 8;
    o.samples = 100;
    return o;
}

// checks of one suite, each reported as name=value<=tol
Outcome from_checks(const SuiteResult& s, const std::vector<std::string>& names) {
    Outcome out{true, ""};
    for (const auto& n : names) {
        const auto& c = s.check(n);
        out.pass = out.pass && c.pass;
        if (!out.detail.empty()) out.detail += ", ";
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s=%.3g<=%.3g", n.c_str(), c.value, c.tolerance);
        out.detail += buf;
    }
    return out;
}

const SuiteResult& operators_suite() {
    static const SuiteResult s = verify_operators(verify_at_8());
    return s;
}

Outcome operator_identities() {
    return from_checks(operators_suite(), {"trilinear_cancellation", "trilinear_antisymmetry"});
}

Outcome decomposition() {
    return from_checks(operators_suite(), {"depth_decomposition", "A2_R_zero", "leray_divergence", "split_recombination"});
}

Outcome poincare() { return from_checks(operators_suite(), {"poincare_violations"}); }

Outcome linear_flow() {
    const auto s = verify_solver(verify_at_8());
    return from_checks(s, {"linear_exactness", "energy_identity"});
}

Outcome ou_moments() {
    const auto e = load_experiment("", "ou-additive", {});
    const auto ic = e.initial_condition();
    const auto rep = run_ensemble(e.solver, ic, e.ensemble);
    const auto& m = rep.final.at("H_norm2");
    const double exact = ou_mean_square(e.solver, ic(0), e.solver.t_end);
    const double z = (m.mean - exact) / m.se;
    const auto ito = ito_isometry_check(e.solver, ic, e.ensemble);
    std::ostringstream d;
    d << "paths=" << rep.paths << " E|U|^2=" << m.mean << "+-" << m.se << " closed=" << exact << " z=" << z
      << " ito_rel=" << ito.relative_error;
    return {rep.blowups == 0 && std::abs(z) <= 3.0 && ito.relative_error < 0.05, d.str()};
}

Outcome strong_order() {
    const auto e = load_experiment("", "small-noise",
                                   {"domain.N1=8", "domain.N2=8", "domain.M=8", "solver.n_galerkin=200",
                                    "solver.t_end=0.2", "converge.dts=0.02,0.01,0.005", "converge.paths=24",
                                    "converge.refine=8"});
    const auto rep = strong_convergence(e.solver, e.initial_condition(), e.converge.dts, e.converge.paths,
                                        e.converge.refine, e.ensemble.workers);
    std::ostringstream d;
    d << "order=" << rep.order << " errors=";
    for (std::size_t i = 0; i < rep.errors.size(); ++i) d << (i ? "/" : "") << rep.errors[i];
    d << " paths=" << rep.paths;
    return {rep.order >= 0.45, d.str()};
}

Outcome hypothesis_checker() {
    const auto small = load_experiment("", "small-noise", {"domain.N1=8", "domain.N2=8", "domain.M=8"});
    const auto good = estimate_growth_constants(*small.solver.noise, small.hypothesis_samples, small.hypothesis_p,
                                                small.estimator);
    const auto large = load_experiment("", "large-theta1", {});
    const auto bad = estimate_growth_constants(*large.solver.noise, large.hypothesis_samples, large.hypothesis_p,
                                               large.estimator);
    std::ostringstream d;
    d << "theta1=0: eta1=" << good.eta1 << " H" << good.p << "=" << (good.maximal_pass() ? "pass" : "fail")
      << "; large theta1: eta1=" << bad.eta1 << " (bound " << bad.eta1_bound << ") H" << bad.p << "="
      << (bad.maximal_pass() ? "pass" : "fail");
    return {good.eta1 <= 1e-3 && good.maximal_pass() && !bad.maximal_pass(), d.str()};
}

Outcome uniqueness() {
    const auto e = load_experiment("", "small-noise", {});
    const auto u0 = e.initial_condition()(0);
    const auto same = uniqueness_experiment(e.solver, u0, 0.0);
    const std::vector<double> deltas = {1e-8, 1e-6, 1e-4};
    std::vector<double> div;
    for (double dl : deltas) div.push_back(uniqueness_experiment(e.solver, u0, dl).sup_divergence);
    const double slope = loglog_slope(deltas, div);
    std::ostringstream d;
    d << "delta=0 " << (same.identical ? "bit-identical" : "DIFFERS") << ", slope=" << slope;
    return {same.identical && std::abs(slope - 1.0) <= 0.2, d.str()};
}

Outcome stopping_times() {
    const auto e = load_experiment("", "small-noise", {"run.diagnostics=full"});
    const auto ic = e.initial_condition();
    const std::size_t paths = 100;

    // monotonicity of first hitting times in K for every stopping functional
    std::size_t violations = 0, levels_checked = 0;
    EnsembleOptions opt = e.ensemble;
    opt.paths = paths;
    run_ensemble(e.solver, ic, opt, [&](std::uint32_t, const Trajectory& tr) {
        for (const auto& name : stopping_functionals()) {
            double top = 0.0;
            for (const auto& r : tr.records) top = std::max(top, functional_value(r, name));
            std::vector<double> ks;
            for (int i = 0; i <= 16; ++i) ks.push_back(top * (0.5 + i / 16.0));
            violations += hitting_time_violations(tr.records, name, ks);
            levels_checked += ks.size();
        }
    });

    // tau for a tiny cutoff radius
    auto c = e.solver;
    c.kappa_cutoff = 1e-8;
    c.stop_at_tau = true;
    c.diagnostics = DiagnosticLevel::Basic;
    std::size_t early = 0;
    opt.paths = paths;
    run_ensemble(c, ic, opt, [&](std::uint32_t, const Trajectory& tr) {
        if (tr.tau_step && *tr.tau_step <= 5) ++early;
    });
    std::ostringstream d;
    d << "violations=" << violations << " over " << levels_checked << " levels; tau within 5 steps on " << early
      << "/" << paths << " paths";
    return {violations == 0 && early >= 95, d.str()};
}

Outcome apriori() {
    const auto e = load_experiment("", "small-noise", {});
    EnsembleOptions opt = e.ensemble;
    opt.paths = 100;
    const auto rep = apriori_sweep(e.solver, e.initial_condition(), {100, 200}, 4.0, opt);
    std::ostringstream d;
    d << "E[n=100]=" << rep.estimates[0].mean << " E[n=200]=" << rep.estimates[1].mean << " ratio=" << rep.ratios[0];
    return {rep.pass, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "operator identities", 60, operator_identities},
        {2, "decomposition exactness", 60, decomposition},
        {3, "projection inequalities", 60, poincare},
        {4, "linear-flow exactness", 60, linear_flow},
        {5, "OU moments and Ito isometry", 300, ou_moments},
        {6, "strong convergence order", 600, strong_order},
        {7, "hypothesis checker", 120, hypothesis_checker},
        {8, "pathwise uniqueness", 300, uniqueness},
        {9, "stopping-time instrumentation", 300, stopping_times},
        {10, "a-priori stability in n", 900, apriori},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s [%d] %s: %s (%.1fs, budget %.0fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
