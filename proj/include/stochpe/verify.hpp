#pragma once

// Invariant suites run by the `verify` command.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stochpe/noise.hpp"
#include "stochpe/operators.hpp"

namespace stochpe {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;      // measured quantity (worst case over samples)
    double tolerance = 0.0;  // pass iff value <= tolerance
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    double seconds = 0.0;

    bool pass() const;
    const CheckResult& check(const std::string& name) const;
};

struct VerifyOptions {
    DomainSpec domain{};
    PhysicsParams physics{.f = 0.5, .beta_T = 0.2, .g = 1.0};
    std::size_t samples = 100;
    std::uint64_t seed = 2024;
    /// Noise checked by the noise suite: noise_operator if set, else the preset.
    NoisePreset noise{};
    std::shared_ptr<const NoiseOperator> noise_operator;
    double p = 4.0;
    EstimatorOptions estimator{};
    std::size_t estimator_samples = 64;
};

/// Trilinear cancellation and antisymmetry, Leray projection, depth
/// decomposition, split/unsplit recombination and the projection inequalities.
SuiteResult verify_operators(const VerifyOptions& opt);
/// Column structure, linearity in dW and the growth-constant hypotheses.
SuiteResult verify_noise(const VerifyOptions& opt);
/// Linear-flow exactness, energy identity, determinism and subspace invariance.
SuiteResult verify_solver(const VerifyOptions& opt);
/// Zero state, z-independent flow, CSV layout and hitting-time monotonicity.
SuiteResult verify_diagnostics(const VerifyOptions& opt);

/// "operators", "noise", "solver", "diagnostics" or "all"; throws
/// std::invalid_argument for any other name.
std::vector<SuiteResult> run_verify(const std::string& suite, const VerifyOptions& opt);
const std::vector<std::string>& verify_suites();

}  // namespace stochpe
