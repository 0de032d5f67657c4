#pragma once

// Commands behind the CLI verbs. Each returns a process exit code and writes
// its artifacts under <output root>/<run.name>/.

#include <iosfwd>
#include <string>
#include <vector>

#include "stochpe/analysis.hpp"
#include "stochpe/config.hpp"
#include "stochpe/verify.hpp"

namespace stochpe {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,      // I/O or unexpected error
    kExitConfig = 2,       // bad config, unknown suite, non-nested dt list
    kExitBlowup = 3,       // numerical blow-up in a run or ensemble
    kExitVerifyFail = 4,   // a verification check failed
};

const char* version();

/// Output root: $STOCHPE_OUTPUT_ROOT, or "stochpe-output" when unset.
std::string output_root();

struct CommandOptions {
    std::string config_path;
    std::string preset;
    std::vector<std::string> overrides;
    /// Empty selects output_root().
    std::string output_root;
};

/// Single trajectory: diagnostics.csv, final_state.json, manifest.json.
int cmd_run(const CommandOptions& opt, std::ostream& out, std::ostream& err);
/// ensemble.paths paths on ensemble.workers threads: ensemble.json, manifest.json.
int cmd_ensemble(const CommandOptions& opt, std::ostream& out, std::ostream& err);
/// Invariant suites: verify.json. Nonzero exit if any check fails.
int cmd_verify(const std::string& suite, const CommandOptions& opt, std::ostream& out, std::ostream& err);
/// mode "dt" (converge.dts) or "n" (converge.n_values): convergence.csv, convergence.json, manifest.json.
int cmd_converge(const std::string& mode, const CommandOptions& opt, std::ostream& out, std::ostream& err);

/// Serialized JSON of the reports (the layouts written by the commands).
std::string report_json(const EnsembleReport& r);
std::string report_json(const std::vector<SuiteResult>& r);
std::string report_json(const ConvergenceReport& r);
std::string report_json(const SpatialReport& r);
std::string report_json(const HypothesisReport& r);

}  // namespace stochpe
