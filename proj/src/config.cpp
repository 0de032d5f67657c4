#include "stochpe/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "stochpe/checkpoint.hpp"
#include "stochpe/rng.hpp"
#include "stochpe/spectral.hpp"

namespace stochpe {
namespace {

using VT = ValueType;

std::vector<ConfigKey> build_schema() {
    const std::vector<std::string> fields = {"v1", "v2", "T"};
    return {
        {"run.name", VT::Text, "run", "output subdirectory under the output root"},
        {"run.seed", VT::Integer, "1", "64-bit master seed of the Wiener paths"},
        {"run.path", VT::Integer, "0", "path index of a single run (first path of an ensemble)"},
        {"run.stride", VT::Integer, "1", "store a diagnostic record every stride steps"},
        {"run.diagnostics", VT::Choice, "basic", "basic: spectral functionals; full: plus L6-type quadratures", {"basic", "full"}},

        {"domain.L1", VT::Real, "6.283185307179586", "period in x"},
        {"domain.L2", VT::Real, "6.283185307179586", "period in y"},
        {"domain.h", VT::Real, "1", "depth"},
        {"domain.N1", VT::Integer, "4", "max |kx|"},
        {"domain.N2", VT::Integer, "4", "max |ky|"},
        {"domain.M", VT::Integer, "4", "max vertical mode"},
        {"domain.mu", VT::Real, "1", "horizontal viscosity and diffusivity"},
        {"domain.nu", VT::Real, "1", "vertical viscosity and diffusivity"},

        {"physics.f", VT::Real, "0", "Coriolis parameter"},
        {"physics.beta_T", VT::Real, "0", "thermal expansion coefficient"},
        {"physics.g", VT::Real, "0", "gravity"},
        {"physics.rho0", VT::Real, "1", "reference density"},
        {"physics.T_r", VT::Real, "0", "reference temperature"},

        {"solver.dt", VT::Real, "0.001", "time step"},
        {"solver.t_end", VT::Real, "1", "final time (integer multiple of dt)"},
        {"solver.n_galerkin", VT::Integer, "0", "retained modes (0 = all)"},
        {"solver.kappa_cutoff", VT::Real, "0", "cutoff radius (0 = half of ||P_n U0||_V)"},
        {"solver.scheme", VT::Choice, "exponential", "treatment of A", {"exponential", "semi-implicit"}},
        {"solver.equation", VT::Choice, "modified", "modified: cutoff on B; original: no cutoff", {"modified", "original"}},
        {"solver.advection", VT::Boolean, "true", "include B(U)"},
        {"solver.blowup_norm", VT::Real, "1e12", "abort when ||U||_V exceeds this"},
        {"solver.stop_at_tau", VT::Boolean, "false", "stop once ||U - U*||_V >= kappa"},
        {"solver.noise_substeps", VT::Integer, "1", "Wiener increments per step (nested dt studies)"},

        {"noise.family", VT::Choice, "zero", "noise family", {"zero", "example1", "example2"}},
        {"noise.K", VT::Integer, "0", "number of Wiener directions"},
        {"noise.decay", VT::Real, "0.5", "per-direction geometric decay"},
        {"noise.phi_const", VT::Real, "0", "constant transport speed"},
        {"noise.phi_wave_amp", VT::Real, "0", "amplitude of the oscillating transport field"},
        {"noise.wave", VT::Integer, "1", "number of distinct horizontal wavenumbers"},
        {"noise.phi_wave_m", VT::Integer, "0", "vertical mode of the oscillating transport field"},
        {"noise.psi_const", VT::Real, "0", "constant vertical transport"},
        {"noise.psi_wave_amp", VT::Real, "0", "amplitude of the oscillating vertical transport"},
        {"noise.alpha", VT::Real, "0", "linear damping coefficient"},
        {"noise.chi_amp", VT::Real, "0", "additive mode amplitude (direction 1)"},
        {"noise.chi_kx", VT::Integer, "1", "additive mode kx"},
        {"noise.chi_ky", VT::Integer, "0", "additive mode ky"},
        {"noise.chi_m", VT::Integer, "0", "additive mode vertical index"},
        {"noise.chi_field", VT::Choice, "T", "additive mode component", fields},
        {"noise.temperature", VT::Boolean, "true", "transport noise in the temperature equation"},
        {"noise.file", VT::Text, "", "JSON coefficient fields (replaces the closed-form family)"},

        {"forcing.amp", VT::Real, "0", "amplitude of a single-mode source F_U"},
        {"forcing.kx", VT::Integer, "1", "forcing kx"},
        {"forcing.ky", VT::Integer, "0", "forcing ky"},
        {"forcing.m", VT::Integer, "0", "forcing vertical index"},
        {"forcing.field", VT::Choice, "T", "forcing component", fields},
        {"forcing.file", VT::Text, "", "checkpoint holding F_U (replaces the single mode)"},

        {"init.type", VT::Choice, "random", "initial state", {"zero", "random", "mode", "checkpoint"}},
        {"init.amp", VT::Real, "0.5", "amplitude"},
        {"init.decay", VT::Real, "1.5", "random: coefficient decay (1 + lambda)^-decay"},
        {"init.seed", VT::Integer, "7", "random: seed"},
        {"init.lambda_max", VT::Real, "0", "random: drop modes with lambda above this (0 = keep all)"},
        {"init.per_path", VT::Boolean, "false", "random: independent draw per path"},
        {"init.kx", VT::Integer, "1", "mode: kx"},
        {"init.ky", VT::Integer, "0", "mode: ky"},
        {"init.m", VT::Integer, "1", "mode: vertical index"},
        {"init.field", VT::Choice, "T", "mode: component", fields},
        {"init.file", VT::Text, "", "checkpoint: path"},

        {"stopping.N", VT::Real, "", "threshold of sup ||U||^2 + int |AU|^2"},
        {"stopping.w", VT::Real, "", "threshold of the w-functional"},
        {"stopping.vt", VT::Real, "", "threshold of the vtilde functional"},
        {"stopping.gradvb", VT::Real, "", "threshold of int ||vbar||_{H^1}^4"},
        {"stopping.dzv", VT::Real, "", "threshold of the d_z v functional"},
        {"stopping.T", VT::Real, "", "threshold of the temperature functional"},

        {"ensemble.paths", VT::Integer, "16", "number of paths"},
        {"ensemble.workers", VT::Integer, "1", "worker threads"},

        {"converge.dts", VT::RealList, "", "nested step sizes for the temporal study"},
        {"converge.n_values", VT::IntegerList, "", "Galerkin sizes for the spatial study"},
        {"converge.paths", VT::Integer, "8", "paths of the temporal study"},
        {"converge.refine", VT::Integer, "2", "reference step = min(dts) / refine"},

        {"hypothesis.p", VT::Real, "4", "moment exponent p"},
        {"hypothesis.C_BDG", VT::Real, "2", "BDG constant used in the thresholds"},
        {"hypothesis.samples", VT::Integer, "64", "sampled states per fit"},
        {"hypothesis.seed", VT::Integer, "12345", "sampling seed"},
        {"hypothesis.quantile", VT::Real, "0.9", "quantile fixing the additive constant"},

        {"verify.samples", VT::Integer, "100", "random states per operator check"},
        {"verify.seed", VT::Integer, "2024", "seed of the verification states"},
    };
}

const ConfigKey* find_key(const std::string& key) {
    for (const auto& k : config_schema())
        if (k.key == key) return &k;
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

bool parse_real(const std::string& s, double& x) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(x);
}

bool parse_int(const std::string& s, long long& x) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_u64(const std::string& s, std::uint64_t& x) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_bool(const std::string& s, bool& b) {
    if (s == "true" || s == "1" || s == "yes") return b = true, true;
    if (s == "false" || s == "0" || s == "no") return b = false, true;
    return false;
}

void check_value(const ConfigKey& k, const std::string& v, const std::string& where) {
    auto fail = [&](const std::string& what) {
        throw ConfigError(where + ": " + k.key + " = '" + v + "': " + what);
    };
    if (v.empty()) {
        if (!k.default_value.empty() && k.type != VT::Text) fail("empty value");
        return;
    }
    double x;
    long long i;
    bool b;
    switch (k.type) {
        case VT::Real:
            if (!parse_real(v, x)) fail("expected a finite number");
            break;
        case VT::Integer: {
            std::uint64_t u;
            if (!parse_int(v, i) && !parse_u64(v, u)) fail("expected an integer");
            break;
        }
        case VT::Boolean:
            if (!parse_bool(v, b)) fail("expected true or false");
            break;
        case VT::Choice:
            if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end()) {
                std::string opts;
                for (const auto& c : k.choices) opts += (opts.empty() ? "" : ", ") + c;
                fail("expected one of " + opts);
            }
            break;
        case VT::RealList:
            for (const auto& e : split_list(v))
                if (!parse_real(e, x)) fail("expected a comma-separated list of numbers");
            break;
        case VT::IntegerList:
            for (const auto& e : split_list(v))
                if (!parse_int(e, i)) fail("expected a comma-separated list of integers");
            break;
        case VT::Text:
            break;
    }
}

void set_entry(ConfigMap& cfg, const std::string& key, const std::string& value, const std::string& where,
               bool allow_replace) {
    const auto* k = find_key(key);
    if (!k) throw ConfigError(where + ": unknown key '" + key + "'");
    check_value(*k, value, where);
    if (!allow_replace && cfg.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    cfg[key] = value;
}

// Typed accessors on a resolved map.
struct Reader {
    const ConfigMap& m;

    const std::string& text(const std::string& key) const {
        const auto it = m.find(key);
        if (it == m.end()) throw ConfigError("missing key '" + key + "'");
        return it->second;
    }
    double real(const std::string& key) const {
        double x = 0.0;
        parse_real(text(key), x);
        return x;
    }
    long long integer(const std::string& key) const {
        long long x = 0;
        parse_int(text(key), x);
        return x;
    }
    long long nonneg(const std::string& key) const {
        const auto x = integer(key);
        if (x < 0) throw ConfigError(key + " must be >= 0");
        return x;
    }
    std::uint64_t seed(const std::string& key) const {
        std::uint64_t x = 0;
        if (!parse_u64(text(key), x)) throw ConfigError(key + " must be a nonnegative 64-bit integer");
        return x;
    }
    bool boolean(const std::string& key) const {
        bool b = false;
        parse_bool(text(key), b);
        return b;
    }
    Component field(const std::string& key) const {
        const auto& s = text(key);
        return s == "v1" ? Component::V1 : s == "v2" ? Component::V2 : Component::T;
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SpectralState cos_mode(const DomainSpec& d, Component c, int kx, int ky, int m, double amp) {
    if (std::abs(kx) > d.N1 || std::abs(ky) > d.N2 || m < 0 || m > d.M) {
        throw ConfigError("mode (" + std::to_string(kx) + ", " + std::to_string(ky) + ", " + std::to_string(m) +
                          ") is not resolved by the domain");
    }
    SpectralState u(d);
    // amp cos(k.x) cos(m pi z/h)
    u.at(c, kx, ky, m) += 0.5 * amp;
    u.at(c, -kx, -ky, m) += 0.5 * amp;
    return u;
}

const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> p = {
        {"linear-decay", R"(# Deterministic linear flow: no noise, no advection.
run.name = linear-decay
domain.L1 = 1
domain.L2 = 1
domain.h = 1
domain.N1 = 4
domain.N2 = 4
domain.M = 4
domain.mu = 0.5
domain.nu = 1
solver.dt = 0.01
solver.t_end = 1
solver.advection = false
init.type = random
init.amp = 1
init.decay = 1
)"},
        {"ou-additive", R"(# Linear flow driven by one additive temperature mode.
run.name = ou-additive
domain.N1 = 2
domain.N2 = 2
domain.M = 2
domain.mu = 0.5
domain.nu = 0.5
solver.dt = 0.01
solver.t_end = 1
solver.advection = false
run.stride = 100
noise.family = example1
noise.K = 1
noise.chi_amp = 1
noise.chi_kx = 1
noise.chi_m = 0
noise.chi_field = T
init.type = zero
ensemble.paths = 10000
converge.dts = 0.04, 0.02, 0.01
converge.paths = 32
converge.refine = 4
)"},
        {"small-noise", R"(# Full nonlinear system with small Example 1 noise.
run.name = small-noise
domain.N1 = 4
domain.N2 = 4
domain.M = 4
domain.mu = 1
domain.nu = 1
physics.f = 0.5
physics.beta_T = 0.1
physics.g = 1
solver.dt = 0.01
solver.t_end = 1
solver.n_galerkin = 200
noise.family = example1
noise.K = 4
noise.decay = 0.5
noise.phi_const = 0.03
noise.psi_const = 0.015
noise.alpha = 0.05
noise.chi_amp = 0.1
noise.chi_m = 1
noise.chi_field = v1
init.type = random
init.amp = 0.5
init.decay = 1
init.lambda_max = 3
init.per_path = false
ensemble.paths = 100
converge.dts = 0.02, 0.01, 0.005
converge.paths = 16
converge.refine = 8
)"},
        {"large-theta1", R"(# Example 1 with steep transport gradients: violates the smallness hypotheses.
run.name = large-theta1
domain.N1 = 4
domain.N2 = 4
domain.M = 4
solver.dt = 0.01
solver.t_end = 0.2
noise.family = example1
noise.K = 4
noise.decay = 0.5
noise.phi_wave_amp = 1.0
noise.phi_wave_m = 1
noise.wave = 2
init.amp = 0.2
)"},
        {"example2", R"(# Example 2: transport of the depth average by a z-independent field.
run.name = example2
domain.N1 = 4
domain.N2 = 4
domain.M = 4
solver.dt = 0.01
solver.t_end = 0.5
noise.family = example2
noise.K = 2
noise.phi_const = 0.1
noise.alpha = 0.05
noise.temperature = false
init.amp = 0.3
)"},
    };
    return p;
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
    static const std::vector<ConfigKey> s = build_schema();
    return s;
}

ConfigMap parse_config(const std::string& text, const std::string& origin) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = origin + ":" + std::to_string(lineno);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        set_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where, false);
    }
    return cfg;
}

void apply_overrides(ConfigMap& cfg, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + o + "': expected key=value");
        set_entry(cfg, trim(o.substr(0, eq)), trim(o.substr(eq + 1)), "override", true);
    }
}

ConfigMap resolve_config(const ConfigMap& cfg) {
    ConfigMap out = cfg;
    for (const auto& k : config_schema()) out.emplace(k.key, k.default_value);
    return out;
}

std::string config_to_text(const ConfigMap& resolved) {
    std::string out;
    for (const auto& k : config_schema()) {
        const auto it = resolved.find(k.key);
        out += k.key + " = " + (it == resolved.end() ? k.default_value : it->second) + "\n";
    }
    return out;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, v] : presets()) n.push_back(k);
        return n;
    }();
    return names;
}

std::string preset_text(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return it->second;
}

InitialCondition Experiment::initial_condition() const {
    const auto d = solver.domain;
    const auto spec = init;
    if (spec.type == "zero") {
        return [d](std::uint32_t) { return SpectralState(d); };
    }
    if (spec.type == "mode") {
        const auto u = leray_project(cos_mode(d, spec.field, spec.kx, spec.ky, spec.m, spec.amp));
        return [u](std::uint32_t) { return u; };
    }
    if (spec.type == "checkpoint") {
        SpectralState u;
        try {
            u = load_checkpoint(spec.file);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("init.file: ") + e.what());
        }
        if (!(u.domain() == d)) throw ConfigError("init.file: checkpoint resolution does not match the domain");
        return [u](std::uint32_t) { return u; };
    }
    RandomStateOptions o;
    o.amplitude = spec.amp;
    o.decay = spec.decay;
    if (spec.lambda_max > 0.0) o.lambda_max = spec.lambda_max;
    if (!spec.per_path) {
        GaussianStream g(spec.seed, 0);
        const auto u = random_state(d, g, o);
        return [u](std::uint32_t) { return u; };
    }
    return [d, o, seed = spec.seed](std::uint32_t path) {
        GaussianStream g(seed, path + 1);
        return random_state(d, g, o);
    };
}

Experiment build_experiment(const ConfigMap& resolved) {
    for (const auto& [key, value] : resolved) {
        const auto* k = find_key(key);
        if (!k) throw ConfigError("unknown key '" + key + "'");
        check_value(*k, value, "config");
    }
    const Reader r{resolved};
    Experiment e;
    e.resolved = resolved;
    e.name = r.text("run.name");
    if (e.name.empty() || e.name.find('/') != std::string::npos || e.name == "." || e.name == "..") {
        throw ConfigError("run.name must be a plain directory name");
    }

    auto& s = e.solver;
    try {
        auto& d = s.domain;
        d.L1 = r.real("domain.L1");
        d.L2 = r.real("domain.L2");
        d.h = r.real("domain.h");
        d.N1 = static_cast<int>(r.nonneg("domain.N1"));
        d.N2 = static_cast<int>(r.nonneg("domain.N2"));
        d.M = static_cast<int>(r.nonneg("domain.M"));
        d.mu = r.real("domain.mu");
        d.nu = r.real("domain.nu");
        d.validate();

        s.physics.f = r.real("physics.f");
        s.physics.beta_T = r.real("physics.beta_T");
        s.physics.g = r.real("physics.g");
        s.physics.rho0 = r.real("physics.rho0");
        s.physics.T_r = r.real("physics.T_r");

        s.dt = r.real("solver.dt");
        s.t_end = r.real("solver.t_end");
        s.n_galerkin = static_cast<std::size_t>(r.nonneg("solver.n_galerkin"));
        s.kappa_cutoff = r.real("solver.kappa_cutoff");
        s.scheme = scheme_from_string(r.text("solver.scheme"));
        s.equation = equation_from_string(r.text("solver.equation"));
        s.advection = r.boolean("solver.advection");
        s.blowup_norm = r.real("solver.blowup_norm");
        s.stop_at_tau = r.boolean("solver.stop_at_tau");
        s.noise_substeps = static_cast<std::uint32_t>(r.nonneg("solver.noise_substeps"));
        s.seed = r.seed("run.seed");
        s.path = static_cast<std::uint32_t>(r.nonneg("run.path"));
        s.stride = static_cast<std::size_t>(r.nonneg("run.stride"));
        s.diagnostics = r.text("run.diagnostics") == "full" ? DiagnosticLevel::Full : DiagnosticLevel::Basic;
        for (const auto& name : stopping_functionals()) {
            const auto& v = r.text("stopping." + name);
            if (!v.empty()) s.thresholds[name] = r.real("stopping." + name);
        }

        auto& np = e.noise_preset;
        np.family = noise_family_from_string(r.text("noise.family"));
        np.K = static_cast<std::size_t>(r.nonneg("noise.K"));
        np.decay = r.real("noise.decay");
        np.phi_const = r.real("noise.phi_const");
        np.phi_wave_amp = r.real("noise.phi_wave_amp");
        np.wave = static_cast<int>(r.nonneg("noise.wave"));
        np.phi_wave_m = static_cast<int>(r.nonneg("noise.phi_wave_m"));
        np.psi_const = r.real("noise.psi_const");
        np.psi_wave_amp = r.real("noise.psi_wave_amp");
        np.alpha = r.real("noise.alpha");
        np.chi_amp = r.real("noise.chi_amp");
        np.chi_kx = static_cast<int>(r.integer("noise.chi_kx"));
        np.chi_ky = static_cast<int>(r.integer("noise.chi_ky"));
        np.chi_m = static_cast<int>(r.nonneg("noise.chi_m"));
        np.chi_field = r.field("noise.chi_field");
        np.temperature = r.boolean("noise.temperature");
        const auto& noise_file = r.text("noise.file");
        NoiseSpec spec = noise_file.empty() ? make_noise(d, np) : load_noise_fields(noise_file, d);
        if (spec.K > 0) s.noise = std::make_shared<NoiseOperator>(std::move(spec));

        const auto& forcing_file = r.text("forcing.file");
        if (!forcing_file.empty()) {
            s.forcing = load_checkpoint(forcing_file);
            if (!(s.forcing.domain() == d)) throw ConfigError("forcing.file: resolution does not match the domain");
        } else if (r.real("forcing.amp") != 0.0) {
            s.forcing = cos_mode(d, r.field("forcing.field"), static_cast<int>(r.integer("forcing.kx")),
                                 static_cast<int>(r.integer("forcing.ky")), static_cast<int>(r.nonneg("forcing.m")),
                                 r.real("forcing.amp"));
        }
        s.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError(ex.what());
    }

    auto& in = e.init;
    in.type = r.text("init.type");
    in.amp = r.real("init.amp");
    in.decay = r.real("init.decay");
    in.seed = r.seed("init.seed");
    in.lambda_max = r.real("init.lambda_max");
    in.per_path = r.boolean("init.per_path");
    in.kx = static_cast<int>(r.integer("init.kx"));
    in.ky = static_cast<int>(r.integer("init.ky"));
    in.m = static_cast<int>(r.nonneg("init.m"));
    in.field = r.field("init.field");
    in.file = r.text("init.file");
    if (in.type == "checkpoint" && in.file.empty()) throw ConfigError("init.type = checkpoint needs init.file");
    if (in.type == "mode") cos_mode(s.domain, in.field, in.kx, in.ky, in.m, in.amp);
    if (in.lambda_max < 0.0) throw ConfigError("init.lambda_max must be >= 0");

    e.ensemble.paths = static_cast<std::size_t>(r.nonneg("ensemble.paths"));
    e.ensemble.workers = static_cast<std::size_t>(r.nonneg("ensemble.workers"));
    e.ensemble.first_path = s.path;
    if (e.ensemble.paths == 0) throw ConfigError("ensemble.paths must be >= 1");
    if (e.ensemble.workers == 0) throw ConfigError("ensemble.workers must be >= 1");

    for (const auto& v : split_list(r.text("converge.dts"))) {
        if (v.empty()) continue;
        double x = 0.0;
        parse_real(v, x);
        if (!(x > 0.0)) throw ConfigError("converge.dts entries must be > 0");
        e.converge.dts.push_back(x);
    }
    for (const auto& v : split_list(r.text("converge.n_values"))) {
        if (v.empty()) continue;
        long long x = 0;
        parse_int(v, x);
        if (x <= 0) throw ConfigError("converge.n_values entries must be >= 1");
        e.converge.n_values.push_back(static_cast<std::size_t>(x));
    }
    e.converge.paths = static_cast<std::size_t>(r.nonneg("converge.paths"));
    e.converge.refine = static_cast<std::uint32_t>(r.nonneg("converge.refine"));

    e.hypothesis_p = r.real("hypothesis.p");
    e.hypothesis_samples = static_cast<std::size_t>(r.nonneg("hypothesis.samples"));
    e.estimator.C_BDG = r.real("hypothesis.C_BDG");
    e.estimator.seed = r.seed("hypothesis.seed");
    e.estimator.quantile = r.real("hypothesis.quantile");
    if (!(e.hypothesis_p >= 2.0)) throw ConfigError("hypothesis.p must be >= 2");
    if (!(e.estimator.C_BDG > 0.0)) throw ConfigError("hypothesis.C_BDG must be > 0");
    if (!(e.estimator.quantile > 0.0 && e.estimator.quantile <= 1.0)) {
        throw ConfigError("hypothesis.quantile must lie in (0, 1]");
    }
    if (e.hypothesis_samples < 4) throw ConfigError("hypothesis.samples must be >= 4");

    auto& v = e.verify;
    v.domain = s.domain;
    v.physics = s.physics;
    v.noise = e.noise_preset;
    v.noise_operator = s.noise;
    v.p = e.hypothesis_p;
    v.estimator = e.estimator;
    v.estimator_samples = e.hypothesis_samples;
    v.samples = static_cast<std::size_t>(r.nonneg("verify.samples"));
    v.seed = r.seed("verify.seed");
    if (v.samples == 0) throw ConfigError("verify.samples must be >= 1");
    return e;
}

Experiment load_experiment(const std::string& path, const std::string& preset,
                           const std::vector<std::string>& overrides) {
    if (!path.empty() && !preset.empty()) throw ConfigError("give either a config file or a preset, not both");
    ConfigMap cfg;
    if (!path.empty()) cfg = parse_config(read_file(path), path);
    if (!preset.empty()) cfg = parse_config(preset_text(preset), "preset " + preset);
    apply_overrides(cfg, overrides);
    return build_experiment(resolve_config(cfg));
}

}  // namespace stochpe
