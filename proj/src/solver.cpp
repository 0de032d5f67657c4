#include "stochpe/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "stochpe/rng.hpp"
#include "stochpe/spectral.hpp"

namespace stochpe {

const char* to_string(Scheme s) { return s == Scheme::Exponential ? "exponential" : "semi-implicit"; }
const char* to_string(Equation e) { return e == Equation::Modified ? "modified" : "original"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "exponential") return Scheme::Exponential;
    if (s == "semi-implicit") return Scheme::SemiImplicit;
    throw std::invalid_argument("unknown scheme '" + s + "' (expected exponential or semi-implicit)");
}

Equation equation_from_string(const std::string& s) {
    if (s == "modified") return Equation::Modified;
    if (s == "original") return Equation::Original;
    throw std::invalid_argument("unknown equation '" + s + "' (expected modified or original)");
}

void SolverConfig::validate() const {
    domain.validate();
    physics.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= 0");
    if (n_galerkin > domain.total_modes()) {
        throw std::invalid_argument("n_galerkin exceeds the " + std::to_string(domain.total_modes()) +
                                    " modes of the domain");
    }
    if (!(kappa_cutoff >= 0.0)) throw std::invalid_argument("kappa_cutoff must be >= 0 (0 selects the default)");
    if (stride == 0) throw std::invalid_argument("stride must be >= 1");
    if (noise_substeps == 0) throw std::invalid_argument("noise_substeps must be >= 1");
    if (!(blowup_norm > 0.0)) throw std::invalid_argument("blowup_norm must be > 0");
    if (noise && !(noise->spec().domain == domain)) throw std::invalid_argument("noise resolution does not match domain");
    if (!forcing.coeffs().empty() && !(forcing.domain() == domain)) {
        throw std::invalid_argument("forcing resolution does not match domain");
    }
    for (const auto& [name, K] : thresholds) {
        functional_value(DiagnosticRecord{}, name);
        if (!(K >= 0.0)) throw std::invalid_argument("threshold " + name + " must be >= 0");
    }
    const double n = t_end / dt;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
        throw std::invalid_argument("t_end must be an integer multiple of dt");
    }
}

std::size_t SolverConfig::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

double cutoff_theta(double r, double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("cutoff_theta: kappa must be > 0");
    const double a = std::abs(r);
    if (a <= 0.5 * kappa) return 1.0;
    if (a >= kappa) return 0.0;
    const double s = 2.0 * (kappa - a) / kappa;
    const double gs = std::exp(-1.0 / s);
    const double gc = std::exp(-1.0 / (1.0 - s));
    return gs / (gs + gc);
}

namespace {

std::vector<double> decay_factors(const DomainSpec& d, double t) {
    std::vector<double> f(d.total_modes());
    for (int c = 0; c < kComponents; ++c)
        for (int m = 0; m <= d.M; ++m)
            for (int ky = -d.N2; ky <= d.N2; ++ky)
                for (int kx = -d.N1; kx <= d.N1; ++kx)
                    f[d.index(static_cast<Component>(c), kx, ky, m)] = std::exp(-d.lambda(kx, ky, m) * t);
    return f;
}

void scale(SpectralState& u, const std::vector<double>& f) {
    auto c = u.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= f[i];
}

}  // namespace

std::vector<SpectralState> solve_linear_Ustar(const SpectralState& u0, const std::vector<double>& times) {
    std::vector<SpectralState> out;
    out.reserve(times.size());
    for (double t : times) {
        SpectralState u = u0;
        scale(u, decay_factors(u0.domain(), t));
        u.time = u0.time + t;
        out.push_back(std::move(u));
    }
    return out;
}

GalerkinSystem::GalerkinSystem(SolverConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const Basis basis(cfg_.domain);
    n_eff_ = cfg_.n_galerkin == 0 ? basis.size() : basis.closed_count(cfg_.n_galerkin);
    mask_ = basis.mask(n_eff_);
    const auto& d = cfg_.domain;
    lin_.resize(d.total_modes());
    for (int c = 0; c < kComponents; ++c)
        for (int m = 0; m <= d.M; ++m)
            for (int ky = -d.N2; ky <= d.N2; ++ky)
                for (int kx = -d.N1; kx <= d.N1; ++kx) {
                    const double l = d.lambda(kx, ky, m) * cfg_.dt;
                    lin_[d.index(static_cast<Component>(c), kx, ky, m)] =
                        cfg_.scheme == Scheme::Exponential ? std::exp(-l) : 1.0 / (1.0 + l);
                }
}

SpectralState GalerkinSystem::project(const SpectralState& u) const {
    if (!(u.domain() == cfg_.domain)) throw std::invalid_argument("GalerkinSystem: state on a foreign domain");
    SpectralState out = u;
    apply_mask(out, mask_);
    return out;
}

SpectralState GalerkinSystem::ustar(const SpectralState& u0, double t) const {
    auto u = project(u0);
    scale(u, decay_factors(cfg_.domain, t));
    u.time = u0.time + t;
    return u;
}

double GalerkinSystem::theta(const SpectralState& u, const SpectralState& us, double kappa) const {
    if (cfg_.equation == Equation::Original) return 1.0;
    return cutoff_theta(norm_V(u - us), kappa);
}

SpectralState GalerkinSystem::explicit_drift(const SpectralState& u, double theta) const {
    SpectralState out = cfg_.forcing.coeffs().empty() ? forcing_F(u, cfg_.physics)
                                                      : forcing_F(u, cfg_.physics, cfg_.forcing);
    if (cfg_.advection && theta != 0.0) out.axpy(theta, bilinear_B(u));
    out *= -1.0;
    apply_mask(out, mask_);
    out.time = u.time;
    return out;
}

SpectralState GalerkinSystem::drift_modified(const SpectralState& u, const SpectralState& us, double kappa) const {
    auto out = explicit_drift(u, cutoff_theta(norm_V(u - us), kappa));
    auto au = apply_A_power(u, 1.0);
    apply_mask(au, mask_);
    out -= au;
    return out;
}

SpectralState GalerkinSystem::drift_original(const SpectralState& u) const {
    auto out = explicit_drift(u, 1.0);
    auto au = apply_A_power(u, 1.0);
    apply_mask(au, mask_);
    out -= au;
    return out;
}

SpectralState GalerkinSystem::noise_increment(const SpectralState& u, const std::vector<double>& dW) const {
    if (!cfg_.noise || cfg_.noise->K() == 0) return SpectralState(u.domain(), u.time);
    auto out = cfg_.noise->apply(u, dW);
    apply_mask(out, mask_);
    return out;
}

SpectralState GalerkinSystem::advance(const SpectralState& u, double theta, const SpectralState* noise_incr) const {
    SpectralState v = u;
    v.axpy(cfg_.dt, explicit_drift(u, theta));
    if (noise_incr) v += *noise_incr;
    scale(v, lin_);
    apply_mask(v, mask_);
    v = leray_project(v);
    v.enforce_reality();
    v.time = u.time + cfg_.dt;
    return v;
}

SpectralState GalerkinSystem::step(const SpectralState& u, double theta, const std::vector<double>& dW) const {
    if (!cfg_.noise || cfg_.noise->K() == 0) return advance(u, theta, nullptr);
    const auto incr = noise_increment(u, dW);
    return advance(u, theta, &incr);
}

std::vector<double> GalerkinSystem::increments(std::uint64_t step) const {
    const std::size_t K = cfg_.noise ? cfg_.noise->K() : 0;
    if (K == 0) return {};
    const WienerSampler sampler(cfg_.seed);
    const std::uint32_t r = cfg_.noise_substeps;
    if (r == 1) return sampler.increments(cfg_.path, step, K, cfg_.dt);
    std::vector<double> sum(K, 0.0);
    for (std::uint32_t j = 0; j < r; ++j) {
        const auto inc = sampler.increments(cfg_.path, step * r + j, K, cfg_.dt / r);
        for (std::size_t k = 0; k < K; ++k) sum[k] += inc[k];
    }
    return sum;
}

Trajectory run_trajectory(const SolverConfig& cfg, const SpectralState& u0, const IncrementSource& source) {
    const GalerkinSystem sys(cfg);
    const auto& d = cfg.domain;
    Trajectory tr;
    tr.n_effective = sys.n_effective();

    SpectralState u = sys.project(u0);
    const SpectralState start = u;
    const double t0 = u.time;
    tr.kappa = cfg.kappa_cutoff > 0.0 ? cfg.kappa_cutoff : 0.5 * norm_V(u);
    if (!(tr.kappa > 0.0)) tr.kappa = 1.0;
    const double kappa_rec = cfg.equation == Equation::Modified ? tr.kappa : 0.0;
    const double forcing_H2 = cfg.forcing.coeffs().empty() ? 0.0 : std::pow(norm_H(cfg.forcing), 2);
    const auto step_decay = decay_factors(d, cfg.dt);
    const bool noisy = cfg.noise && cfg.noise->K() > 0;

    SpectralState us = start;
    tr.hits["tau"] = std::nullopt;
    if (cfg.track_stochastic_integral) tr.stochastic_integral = SpectralState(d, t0);

    auto rec = record(u, &us, kappa_rec, cfg.diagnostics);
    start_accumulation(rec);
    tr.records.push_back(rec);
    if (cfg.store_states) tr.states.push_back(u);
    DiagnosticRecord last = rec;

    const std::size_t nsteps = cfg.steps();
    for (std::size_t s = 1; s <= nsteps; ++s) {
        const double th = sys.theta(u, us, tr.kappa);
        std::vector<double> dW;
        if (noisy) dW = source ? source(s - 1) : sys.increments(s - 1);

        SpectralState incr = noisy ? sys.noise_increment(u, dW) : SpectralState();
        if (noisy && cfg.track_stochastic_integral) {
            tr.stochastic_integral += incr;
            auto cols = cfg.noise->columns(u);
            for (auto& c : cols) c = sys.project(c);
            tr.ito_integrand += cfg.dt * hs_norm2(cols, NormSpace::H);
        }
        u = sys.advance(u, th, noisy ? &incr : nullptr);
        u.time = t0 + static_cast<double>(s) * cfg.dt;
        scale(us, step_decay);
        us.time = u.time;
        tr.steps = s;
        tr.end_time = u.time;

        if (!u.all_finite() || !(norm_V(u) <= cfg.blowup_norm)) {
            tr.blew_up = true;
            break;
        }
        const double dist = norm_V(u - us);
        if (!tr.tau_step && dist >= tr.kappa) {
            tr.hits["tau"] = u.time;
            tr.tau_step = s;
        }
        const bool stop = cfg.stop_at_tau && tr.tau_step.has_value();
        if (s % cfg.stride == 0 || s == nsteps || stop) {
            auto r = record(u, &us, kappa_rec, cfg.diagnostics);
            accumulate(r, last, forcing_H2);
            tr.records.push_back(r);
            if (cfg.store_states) tr.states.push_back(u);
            last = r;
        }
        if (stop) break;
    }
    if (nsteps == 0) tr.end_time = t0;
    for (const auto& [name, K] : cfg.thresholds) tr.hits[name] = detect_stopping(tr.records, name, K);
    tr.final_state = u;
    return tr;
}

}  // namespace stochpe
