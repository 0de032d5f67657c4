#pragma once

// Flat key = value run configuration with dotted namespaces.
//
//   # comment
//   domain.N1 = 8
//   noise.family = example1
//
// Every key must appear in config_schema(); unknown keys, duplicates and
// malformed values are errors. Keys left out take the schema default, and
// the fully resolved map is what gets written to run manifests.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochpe/analysis.hpp"
#include "stochpe/solver.hpp"
#include "stochpe/verify.hpp"

namespace stochpe {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ValueType { Real, Integer, Boolean, Text, Choice, RealList, IntegerList };

struct ConfigKey {
    ConfigKey(std::string k, ValueType t, std::string def, std::string h, std::vector<std::string> c = {})
        : key(std::move(k)), type(t), default_value(std::move(def)), help(std::move(h)), choices(std::move(c)) {}

    std::string key;
    ValueType type;
    std::string default_value;  // empty: unset (optional keys only)
    std::string help;
    std::vector<std::string> choices;  // for Choice
};

const std::vector<ConfigKey>& config_schema();

using ConfigMap = std::map<std::string, std::string>;

/// Parse config text; `origin` names the source in error messages.
ConfigMap parse_config(const std::string& text, const std::string& origin = "config");
/// Apply "key=value" overrides on top of a parsed map (later wins).
void apply_overrides(ConfigMap& cfg, const std::vector<std::string>& overrides);
/// Fill every schema key that is absent with its default.
ConfigMap resolve_config(const ConfigMap& cfg);
/// Canonical text of a resolved map (one key per line, schema order).
std::string config_to_text(const ConfigMap& resolved);

/// Shipped presets by name.
const std::vector<std::string>& preset_names();
std::string preset_text(const std::string& name);

struct InitialSpec {
    std::string type = "random";  // zero | random | mode | checkpoint
    double amp = 0.5;
    double decay = 1.5;
    std::uint64_t seed = 7;
    double lambda_max = 0.0;  // 0: no cutoff
    int kx = 1, ky = 0, m = 1;
    Component field = Component::T;
    std::string file;
    bool per_path = false;
};

struct ConvergenceSpec {
    std::vector<double> dts;
    std::vector<std::size_t> n_values;
    std::size_t paths = 8;
    std::uint32_t refine = 2;
};

/// Everything a command needs, built from a resolved config.
struct Experiment {
    std::string name;
    ConfigMap resolved;
    SolverConfig solver;
    NoisePreset noise_preset;
    InitialSpec init;
    EnsembleOptions ensemble;
    ConvergenceSpec converge;
    double hypothesis_p = 4.0;
    std::size_t hypothesis_samples = 64;
    EstimatorOptions estimator;
    VerifyOptions verify;

    InitialCondition initial_condition() const;
};

/// Throws ConfigError on any invalid value or inconsistent combination,
/// including files that cannot be read and a noise/domain mismatch.
Experiment build_experiment(const ConfigMap& resolved);

/// parse + overrides + resolve + build in one go. `preset` and `path` are
/// alternatives (at most one non-empty; neither means all defaults).
Experiment load_experiment(const std::string& path, const std::string& preset,
                           const std::vector<std::string>& overrides);

}  // namespace stochpe
