#include "stochpe/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "stochpe/analysis.hpp"
#include "stochpe/diagnostics.hpp"
#include "stochpe/rng.hpp"
#include "stochpe/solver.hpp"
#include "stochpe/spectral.hpp"

namespace stochpe {

bool SuiteResult::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult& SuiteResult::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("suite " + suite + " has no check '" + name + "'");
}

namespace {

double max_abs(const SpectralState& u) {
    double m = 0.0;
    for (auto c : u.coeffs()) m = std::max(m, std::abs(c));
    return m;
}

double max_abs(const HorizontalField& f) {
    double m = 0.0;
    for (auto c : f.v1) m = std::max(m, std::abs(c));
    for (auto c : f.v2) m = std::max(m, std::abs(c));
    return m;
}

CheckResult make(std::string name, double value, double tol, std::string detail = {}) {
    CheckResult c;
    c.name = std::move(name);
    c.value = value;
    c.tolerance = tol;
    c.pass = std::isfinite(value) && value <= tol;
    c.detail = std::move(detail);
    return c;
}

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

SolverConfig linear_config(const DomainSpec& d) {
    SolverConfig c;
    c.domain = d;
    c.advection = false;
    c.kappa_cutoff = 1.0;
    return c;
}

bool bitwise_equal(const SpectralState& a, const SpectralState& b) {
    const auto x = a.coeffs();
    const auto y = b.coeffs();
    return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size_bytes()) == 0;
}

}  // namespace

SuiteResult verify_operators(const VerifyOptions& opt) {
    const Timer timer;
    SuiteResult s;
    s.suite = "operators";
    const auto& d = opt.domain;
    GaussianStream rng(opt.seed, 0x4F50);

    double cancel = 0.0, antisym = 0.0, leray = 0.0, decomp = 0.0, a2r = 0.0, recomb = 0.0;
    std::size_t poincare = 0;
    const Basis basis(d);
    for (std::size_t i = 0; i < opt.samples; ++i) {
        const auto u = random_state(d, rng);
        const auto a = random_state(d, rng);
        const auto b = random_state(d, rng);
        const double na = norm_DA(a), nb = norm_DA(b), nu = norm_V(u);
        cancel = std::max(cancel, std::abs(trilinear_b(u, a, a)) / (nu * na * na));
        antisym = std::max(antisym, std::abs(trilinear_b(u, a, b) + trilinear_b(u, b, a)) / (nu * na * nb));

        const auto raw = random_state(d, rng, {.divergence_free = false});
        leray = std::max(leray, divergence_residual(leray_project(raw)));
        auto v = raw;
        v.clear(Component::T);
        decomp = std::max(decomp, max_abs(average_A3(v) + fluctuation_R(v) - v) / max_abs(v));
        a2r = std::max(a2r, max_abs(average_A2(fluctuation_R(v))) / max_abs(v));

        const auto w = random_state(d, rng, {.temperature_mean = true});
        const auto ref = unsplit_velocity_rhs(w, opt.physics);
        const auto rec = baroclinic_rhs_terms(mode_split(w), w, opt.physics).recombine();
        recomb = std::max(recomb, max_abs(rec - ref) / max_abs(ref));

        const auto x = random_state(d, rng, {.decay = 0.0});
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(basis.size() - 1));
        const double ln = basis.lambda_n(n);
        const auto p = project_n(x, basis, n);
        const auto q = complement_q(x, basis, n);
        for (auto [s1, s2] : {std::pair{0.0, 0.5}, std::pair{0.5, 1.0}}) {
            if (norm_s(p, s2) > std::pow(ln, s2 - s1) * norm_s(p, s1) * (1 + 1e-12)) ++poincare;
            if (ln > 0 && norm_s(q, s1) > std::pow(ln, -(s2 - s1)) * norm_s(q, s2) * (1 + 1e-12)) ++poincare;
        }
    }
    s.checks.push_back(make("trilinear_cancellation", cancel, 1e-10, "|b(U,W,W)| / (||U|| |AW|^2)"));
    s.checks.push_back(make("trilinear_antisymmetry", antisym, 1e-10, "|b(U,W,X) + b(U,X,W)| / (||U|| |AW| |AX|)"));
    s.checks.push_back(make("leray_divergence", leray, 1e-12, "sum_k |k . vbar_k| after P_H"));
    s.checks.push_back(make("depth_decomposition", decomp, 1e-14, "|A3 v + R v - v| / |v| (max norm)"));
    s.checks.push_back(make("A2_R_zero", a2r, 1e-14, "|A2 R v| / |v| (max norm)"));
    s.checks.push_back(make("split_recombination", recomb, 1e-9, "split vs unsplit momentum operator"));
    s.checks.push_back(make("poincare_violations", static_cast<double>(poincare), 0.0,
                            "P_n and Q_n inequalities for (s1,s2) = (0,1/2), (1/2,1)"));
    s.seconds = timer.seconds();
    return s;
}

SuiteResult verify_noise(const VerifyOptions& opt) {
    const Timer timer;
    SuiteResult s;
    s.suite = "noise";
    const auto owned = opt.noise_operator ? opt.noise_operator
                                          : std::make_shared<const NoiseOperator>(make_noise(opt.domain, opt.noise));
    const NoiseOperator& op = *owned;
    GaussianStream rng(opt.seed, 0x4E4F);

    double div = 0.0, lin = 0.0;
    const std::size_t n = std::min<std::size_t>(opt.samples, 10);
    for (std::size_t i = 0; i < n && op.K() > 0; ++i) {
        const auto u = random_state(opt.domain, rng);
        const auto cols = op.columns(u);
        std::vector<double> dW(op.K());
        SpectralState sum(opt.domain);
        for (std::size_t k = 0; k < op.K(); ++k) {
            dW[k] = rng.normal();
            sum.axpy(dW[k], cols[k]);
            div = std::max(div, divergence_residual(cols[k]));
        }
        const double scale = std::max(max_abs(sum), 1e-300);
        lin = std::max(lin, max_abs(op.apply(u, dW) - sum) / scale);
    }
    s.checks.push_back(make("columns_in_H", div, 1e-12, "divergence residual of sigma(U) e_k"));
    s.checks.push_back(make("apply_linear_in_dW", lin, 1e-12, "|sigma(U) dW - sum_k dW_k sigma(U) e_k|"));

    const auto r = estimate_growth_constants(op, opt.estimator_samples, opt.p, opt.estimator);
    s.checks.push_back(make("eta1", r.eta1, r.eta1_bound, "|sigma(U)|_V^2 <= C||U||^2 + eta1 |AU|^2"));
    s.checks.push_back(make("gamma", r.gamma, r.gamma_bound, "Lipschitz constant of sigma in V against |AU|"));
    s.checks.push_back(make("eta0", r.eta0, r.eta0_bound));
    s.checks.push_back(make("eta2", r.eta2, r.eta2_bound));
    s.checks.push_back(make("eta3", r.eta3, r.eta3_bound));
    s.seconds = timer.seconds();
    return s;
}

SuiteResult verify_solver(const VerifyOptions& opt) {
    const Timer timer;
    SuiteResult s;
    s.suite = "solver";
    const auto& d = opt.domain;
    GaussianStream rng(opt.seed, 0x534F);
    const auto u0 = random_state(d, rng, {.amplitude = 0.5, .decay = 1.5});

    {
        auto c = linear_config(d);
        c.dt = 0.01;
        c.t_end = 0.5;
        const auto tr = run_trajectory(c, u0);
        const double floor = 1e-14 * max_abs(u0);  // round-off residue of the projection in u0
        double worst = 0.0;
        for (int comp = 0; comp < kComponents; ++comp)
            for (int m = 0; m <= d.M; ++m)
                for (int ky = -d.N2; ky <= d.N2; ++ky)
                    for (int kx = -d.N1; kx <= d.N1; ++kx) {
                        const auto cc = static_cast<Component>(comp);
                        const cplx ref = std::exp(-d.lambda(kx, ky, m) * c.t_end) * u0.at(cc, kx, ky, m);
                        if (std::abs(u0.at(cc, kx, ky, m)) <= floor) continue;
                        worst = std::max(worst, std::abs(tr.final_state.at(cc, kx, ky, m) - ref) / std::abs(ref));
                    }
        s.checks.push_back(make("linear_exactness", worst, 1e-12, "per-mode relative error against exp(-lambda t)"));
    }
    {
        // |U(t)|^2 + 2 int_0^t ||U||^2 = |U0|^2 with Simpson's rule on the records
        auto c = linear_config(d);
        c.dt = 1e-3;
        c.t_end = 0.1;
        const auto tr = run_trajectory(c, u0);
        const auto& r = tr.records;
        double integral = 0.0;
        for (std::size_t i = 0; i + 2 < r.size(); i += 2) integral += (r[i].V2 + 4 * r[i + 1].V2 + r[i + 2].V2);
        integral *= c.dt / 3.0;
        const double res = std::abs(r.back().H2 + 2.0 * integral - r.front().H2) / r.front().H2;
        s.checks.push_back(make("energy_identity", res, 1e-6, "relative residual of the linear energy balance"));
    }
    {
        NoisePreset np;
        np.family = NoiseFamily::Example1;
        np.K = 2;
        np.phi_const = 0.1;
        np.alpha = 0.1;
        np.chi_amp = 0.1;
        SolverConfig c;
        c.domain = d;
        c.physics = opt.physics;
        c.noise = std::make_shared<NoiseOperator>(make_noise(d, np));
        c.dt = 0.01;
        c.t_end = 0.05;
        c.seed = opt.seed;
        const auto a = run_trajectory(c, u0);
        const auto b = run_trajectory(c, u0);
        s.checks.push_back(make("determinism", bitwise_equal(a.final_state, b.final_state) ? 0.0 : 1.0, 0.0,
                                "same seed and path give identical bits"));

        c.n_galerkin = d.total_modes() / 4;
        const GalerkinSystem sys(c);
        const auto t = run_trajectory(c, u0);
        const auto co = t.final_state.coeffs();
        double outside = 0.0;
        for (std::size_t i = 0; i < co.size(); ++i)
            if (!sys.mask()[i]) outside = std::max(outside, std::abs(co[i]));
        s.checks.push_back(make("galerkin_invariance", outside, 0.0, "coefficients outside P_n after a noisy run"));
    }
    s.seconds = timer.seconds();
    return s;
}

SuiteResult verify_diagnostics(const VerifyOptions& opt) {
    const Timer timer;
    SuiteResult s;
    s.suite = "diagnostics";
    const auto& d = opt.domain;

    const auto z = record(SpectralState(d), nullptr, 0.0);
    double worst = 0.0;
    const auto& cols = DiagnosticRecord::columns();
    const auto vals = z.values();
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] != "theta") worst = std::max(worst, std::abs(vals[i]));
    s.checks.push_back(make("zero_state", worst, 0.0, "every functional of U = 0"));

    GaussianStream rng(opt.seed, 0x4449);
    auto u = random_state(d, rng);
    u = average_A3(u);
    const auto r = record(u, nullptr, 0.0);
    const double scale = std::max(1.0, r.V2 * r.V2 * r.V2);
    s.checks.push_back(make("depth_independent_vtilde", std::max(r.L6_vtilde6, r.grad3vt2_vt4) / scale, 1e-12,
                            "vtilde functionals of a z-independent velocity"));

    const std::string csv = diagnostics_csv({z});
    const auto header = csv.substr(0, csv.find('\n'));
    const auto ncols = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
    s.checks.push_back(make("csv_columns", ncols == cols.size() ? 0.0 : 1.0, 0.0));

    NoisePreset np;
    np.family = NoiseFamily::Example1;
    np.K = 2;
    np.phi_const = 0.1;
    np.chi_amp = 0.2;
    SolverConfig c;
    c.domain = d;
    c.noise = std::make_shared<NoiseOperator>(make_noise(d, np));
    c.dt = 0.01;
    c.t_end = 0.2;
    c.diagnostics = DiagnosticLevel::Full;
    const auto tr = run_trajectory(c, random_state(d, rng, {.amplitude = 0.3}));
    std::size_t bad = 0;
    for (const auto& name : stopping_functionals()) {
        const double top = functional_value(tr.records.back(), name);
        std::vector<double> ks;
        for (int i = 0; i <= 12; ++i) ks.push_back(top * i / 10.0);
        bad += hitting_time_violations(tr.records, name, ks);
    }
    s.checks.push_back(make("hitting_time_monotonicity", static_cast<double>(bad), 0.0,
                            "out-of-order hitting times over all stopping functionals"));
    s.seconds = timer.seconds();
    return s;
}

const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names = {"operators", "noise", "solver", "diagnostics", "all"};
    return names;
}

std::vector<SuiteResult> run_verify(const std::string& suite, const VerifyOptions& opt) {
    if (suite == "operators") return {verify_operators(opt)};
    if (suite == "noise") return {verify_noise(opt)};
    if (suite == "solver") return {verify_solver(opt)};
    if (suite == "diagnostics") return {verify_diagnostics(opt)};
    if (suite == "all") return {verify_operators(opt), verify_noise(opt), verify_solver(opt), verify_diagnostics(opt)};
    throw std::invalid_argument("unknown suite '" + suite +
                                "' (expected operators, noise, solver, diagnostics or all)");
}

}  // namespace stochpe
