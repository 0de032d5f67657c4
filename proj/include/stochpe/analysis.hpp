#pragma once

// Ensemble statistics and verification experiments built on run_trajectory.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "stochpe/solver.hpp"

namespace stochpe {

/// Sample mean and its standard error.
struct Moment {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};
Moment moment(const std::vector<double>& x);

/// sup_t ||U||^2 + int |AU|^2 over the stored records; aborted = numerical blow-up.
struct BlowupResult {
    double value = 0.0;
    bool aborted = false;
};
BlowupResult blowup_functional(const Trajectory& tr);

/// Initial state of a path, by path index.
using InitialCondition = std::function<SpectralState(std::uint32_t path)>;

struct EnsembleOptions {
    std::size_t paths = 1;
    std::size_t workers = 1;
    std::uint32_t first_path = 0;
};

struct EnsembleReport {
    std::size_t paths = 0;
    std::size_t blowups = 0;
    /// Per DiagnosticRecord column: mean over paths of the sup in time, and of the final value.
    std::map<std::string, Moment> sup;
    std::map<std::string, Moment> final;
    /// Per hit name: number of paths that hit, and the mean hitting time over those.
    std::map<std::string, std::size_t> hit_count;
    std::map<std::string, Moment> hit_time;
};

/// Runs paths first_path .. first_path + paths - 1 with cfg.path set to the
/// path index. Results are reduced in path order, so the report does not
/// depend on the worker count. per_path, if given, receives each trajectory.
EnsembleReport run_ensemble(const SolverConfig& cfg, const InitialCondition& ic, const EnsembleOptions& opt,
                            const std::function<void(std::uint32_t, const Trajectory&)>& per_path = {});

/// E[sup_t ||U||^p + int |AU|^2 ||U||^(p-2) dt] for each n_galerkin, and the
/// ratio of consecutive estimates against [band_lo, band_hi].
struct AprioriReport {
    double p = 4.0;
    std::vector<std::size_t> n_values;
    std::vector<Moment> estimates;
    std::vector<double> ratios;
    double band_lo = 0.5, band_hi = 2.0;
    bool pass = false;
};
AprioriReport apriori_sweep(const SolverConfig& cfg, const InitialCondition& ic, const std::vector<std::size_t>& n_values,
                            double p, const EnsembleOptions& opt, double band_lo = 0.5, double band_hi = 2.0);
/// The a-priori functional of one path (trapezoid on the records).
double apriori_functional(const Trajectory& tr, double p);

/// E|int sigma dW|_H^2 against E int ||sigma||^2_{L2(U,H)} dt.
struct ItoReport {
    Moment lhs;
    Moment rhs;
    double relative_error = 0.0;
};
ItoReport ito_isometry_check(const SolverConfig& cfg, const InitialCondition& ic, const EnsembleOptions& opt);

/// Paired runs from u0 and u0 + delta e (e a fixed unit V-direction) on one
/// shared noise path.
struct UniquenessReport {
    double delta = 0.0;
    bool identical = false;       // bitwise equality of every stored state (meaningful for delta = 0)
    double sup_divergence = 0.0;  // sup_t ||U - U'||_V
    double factor = 0.0;          // sup_divergence / delta
};
UniquenessReport uniqueness_experiment(const SolverConfig& cfg, const SpectralState& u0, double delta,
                                       std::uint64_t direction_seed = 7);
/// log-log slope of sup divergence against delta.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// E sup_t |U|^2 <= C (E|U0|^2 + t_end ||sigma(0)||^2_{L2(U,H)}): measured C at dt and dt/2.
struct GronwallReport {
    double C_dt = 0.0;
    double C_half = 0.0;
    double ratio = 0.0;
};
GronwallReport gronwall_envelope(const SolverConfig& cfg, const InitialCondition& ic, const EnsembleOptions& opt);

/// Strong error at t_end against a reference run with dt_min / refine on the
/// same Brownian path. dts must be nested (dt / dt_min a power of two) and
/// contain at least three values.
struct ConvergenceReport {
    std::vector<double> dts;
    std::vector<double> errors;  // sqrt(E |U_dt - U_ref|_H^2)
    std::vector<double> error_se;
    double dt_ref = 0.0;
    double order = 0.0;  // least-squares slope of log error against log dt
    std::size_t paths = 0;
};
ConvergenceReport strong_convergence(const SolverConfig& cfg, const InitialCondition& ic, std::vector<double> dts,
                                     std::size_t paths, std::uint32_t refine = 2, std::size_t workers = 1);

/// E|U(t)|_H^2 of the linear flow driven by state-independent noise:
/// |exp(-At) P_n u0|^2 + sum_k sum_modes |P_n sigma(0) e_k|^2 (1 - exp(-2 lambda t)) / (2 lambda).
/// Throws std::invalid_argument if the configured noise depends on U.
double ou_mean_square(const SolverConfig& cfg, const SpectralState& u0, double t);

/// Number of pairs K < K' whose hitting times are out of order (a path that
/// hits K' must hit K no later).
std::size_t hitting_time_violations(const std::vector<DiagnosticRecord>& series, const std::string& name,
                                    const std::vector<double>& levels);

/// Strong error at t_end of each n_galerkin against the largest one, on the
/// same Brownian path; at least three distinct values.
struct SpatialReport {
    std::vector<std::size_t> n_values;
    std::vector<std::size_t> n_effective;
    std::vector<double> projection_errors;  // |Q_n u0|_H (path 0)
    std::vector<double> errors;             // sqrt(E |U_n - U_ref|_H^2)
    std::vector<double> error_se;
    std::size_t paths = 0;
};
SpatialReport spatial_convergence(const SolverConfig& cfg, const InitialCondition& ic, std::vector<std::size_t> n_values,
                                  std::size_t paths, std::size_t workers = 1);

/// |Q_n u0|_H for each n (spatial truncation error of the initial state).
std::vector<double> projection_errors(const SpectralState& u0, const std::vector<std::size_t>& n_values);

}  // namespace stochpe
