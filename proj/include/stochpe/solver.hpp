#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stochpe/diagnostics.hpp"
#include "stochpe/noise.hpp"
#include "stochpe/operators.hpp"
#include "stochpe/state.hpp"

namespace stochpe {

enum class Scheme {
    SemiImplicit,  // linear part by (1 + lambda dt)^-1
    Exponential,   // linear part by exp(-lambda dt)
};

enum class Equation {
    Modified,  // advection scaled by theta(||U - U*||)
    Original,
};

const char* to_string(Scheme s);
const char* to_string(Equation e);
Scheme scheme_from_string(const std::string& s);
Equation equation_from_string(const std::string& s);

struct SolverConfig {
    DomainSpec domain{};
    /// Retained modes; 0 keeps all. Rounded up by Basis::closed_count so the
    /// subspace is closed under conjugation and the Leray projection.
    std::size_t n_galerkin = 0;
    double dt = 1e-3;
    double t_end = 1.0;
    /// Cutoff radius; 0 selects 0.5 ||P_n U0||_V at run start.
    double kappa_cutoff = 0.0;
    Scheme scheme = Scheme::Exponential;
    Equation equation = Equation::Modified;
    std::uint64_t seed = 1;
    std::uint32_t path = 0;
    PhysicsParams physics{};
    /// Null means no noise.
    std::shared_ptr<const NoiseOperator> noise;
    /// Constant source F_U; an empty state means zero.
    SpectralState forcing;
    /// Switch off B entirely (linear runs).
    bool advection = true;

    /// Store a diagnostic record every `stride` steps (and at the final step).
    std::size_t stride = 1;
    DiagnosticLevel diagnostics = DiagnosticLevel::Basic;
    bool store_states = false;
    /// Stopping-functional levels K by name (see stopping_functionals()).
    std::map<std::string, double> thresholds;
    /// Abort when ||U||_V exceeds this (numerical blow-up), besides non-finite values.
    double blowup_norm = 1e12;
    /// Stop integrating once ||U - U*||_V >= kappa.
    bool stop_at_tau = false;
    /// The Wiener path is sampled on dt / noise_substeps and summed, so runs
    /// with dt = 2^j dt0 and noise_substeps = 2^j share one Brownian path.
    std::uint32_t noise_substeps = 1;
    /// Accumulate int sigma dW and int ||sigma||^2_{L2(U,H)} dt along the path.
    bool track_stochastic_integral = false;

    /// Throws std::invalid_argument on a violated invariant.
    void validate() const;
    std::size_t steps() const;
};

/// theta(r) = 1 for |r| <= kappa/2, 0 for |r| >= kappa, and
/// g(s) / (g(s) + g(1 - s)) with s = 2(kappa - |r|)/kappa and g(x) = exp(-1/x)
/// in between.
double cutoff_theta(double r, double kappa);

/// U*(t) = exp(-A t) U0 at each requested time.
std::vector<SpectralState> solve_linear_Ustar(const SpectralState& u0, const std::vector<double>& times);

/// The truncated system for one configuration: projections, drifts and one step.
class GalerkinSystem {
  public:
    explicit GalerkinSystem(SolverConfig cfg);

    const SolverConfig& config() const { return cfg_; }
    std::size_t n_effective() const { return n_eff_; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }

    /// P_n.
    SpectralState project(const SpectralState& u) const;
    /// exp(-A t) P_n u0.
    SpectralState ustar(const SpectralState& u0, double t) const;
    double theta(const SpectralState& u, const SpectralState& ustar, double kappa) const;

    /// -[A U + theta B(U) + F(U)] with P_n on every term.
    SpectralState drift_modified(const SpectralState& u, const SpectralState& ustar, double kappa) const;
    /// -[A U + B(U) + F(U)].
    SpectralState drift_original(const SpectralState& u) const;
    /// Drift without the -AU part, for a given theta.
    SpectralState explicit_drift(const SpectralState& u, double theta) const;

    /// One step: Lin(dt) [U + dt explicit_drift(U) + sigma(U) dW], then P_n,
    /// P_H and the reality symmetrisation. dW may be empty when there is no noise.
    SpectralState step(const SpectralState& u, double theta, const std::vector<double>& dW) const;
    /// The same step with a precomputed noise increment (null for none).
    SpectralState advance(const SpectralState& u, double theta, const SpectralState* noise_incr) const;
    /// P_n sigma(U) dW (zero without noise).
    SpectralState noise_increment(const SpectralState& u, const std::vector<double>& dW) const;

    /// Wiener increments of step `step` on the configured path and substeps.
    std::vector<double> increments(std::uint64_t step) const;

  private:
    SolverConfig cfg_;
    std::size_t n_eff_ = 0;
    std::vector<std::uint8_t> mask_;
    std::vector<double> lin_;  // per storage offset
};

struct Trajectory {
    std::vector<DiagnosticRecord> records;
    std::vector<SpectralState> states;  // at the record times if store_states
    /// First-hitting times: "tau" (||U - U*||_V >= kappa) and each configured threshold.
    std::map<std::string, std::optional<double>> hits;
    std::optional<std::size_t> tau_step;  // step index (1-based) at which tau was hit
    bool blew_up = false;
    double end_time = 0.0;
    std::size_t steps = 0;
    double kappa = 0.0;
    std::size_t n_effective = 0;
    SpectralState final_state;
    SpectralState stochastic_integral;  // int_0^t P_n sigma dW, if tracked
    double ito_integrand = 0.0;         // int_0^t ||P_n sigma||^2_{L2(U,H)} dt, if tracked
};

/// Increment generator override: step index -> K increments.
using IncrementSource = std::function<std::vector<double>(std::uint64_t step)>;

/// Integrate from P_n u0 to t_end or until blow-up.
Trajectory run_trajectory(const SolverConfig& cfg, const SpectralState& u0, const IncrementSource& source = {});

}  // namespace stochpe
