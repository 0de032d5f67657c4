#include "stochpe/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "stochpe/checkpoint.hpp"
#include "stochpe/spectral.hpp"

#ifndef STOCHPE_VERSION
#define STOCHPE_VERSION "0.0.0"
#endif

namespace stochpe {

namespace fs = std::filesystem;
using nlohmann::json;

const char* version() { return STOCHPE_VERSION; }

std::string output_root() {
    const char* env = std::getenv("STOCHPE_OUTPUT_ROOT");
    return env && *env ? env : "stochpe-output";
}

namespace {

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json moment_json(const Moment& m) { return {{"mean", m.mean}, {"se", m.se}, {"n", m.n}}; }

json opt_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

// Single writer for every artifact of a command.
class Artifacts {
  public:
    Artifacts(std::string root, const Experiment& e, std::string command)
        : dir_(fs::path(root.empty() ? output_root() : root) / e.name), exp_(e), command_(std::move(command)),
          start_(utc_now()) {}

    void open() { fs::create_directories(dir_); }

    void write(const std::string& name, const std::string& content) {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw std::runtime_error("cannot write " + path.string());
        outputs_.push_back({{"path", name}, {"bytes", content.size()}});
    }

    void manifest(const json& verdict) {
        json m;
        m["format"] = "stochpe-manifest";
        m["version"] = 1;
        m["command"] = command_;
        m["code_version"] = version();
        m["config"] = exp_.resolved;
        m["seed"] = exp_.solver.seed;
        m["start_time"] = start_;
        m["end_time"] = utc_now();
        m["outputs"] = outputs_;
        m["verdict"] = verdict;
        const auto path = dir_ / "manifest.json";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << m.dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write " + path.string());
    }

    std::string dir() const { return dir_.string(); }

  private:
    fs::path dir_;
    const Experiment& exp_;
    std::string command_;
    std::string start_;
    json outputs_ = json::array();
};

// Shared error handling: config problems map to kExitConfig, the rest to kExitFailure.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

Experiment load(const CommandOptions& opt) { return load_experiment(opt.config_path, opt.preset, opt.overrides); }

// Closed-form second moment when the configuration is an OU process.
std::optional<double> ou_reference(const Experiment& e, const SpectralState& u0) {
    const auto& s = e.solver;
    if (s.advection || !(s.physics == PhysicsParams{}) || !s.forcing.coeffs().empty()) return std::nullopt;
    try {
        return ou_mean_square(s, u0, s.t_end);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

}  // namespace

std::string report_json(const EnsembleReport& r) {
    json j;
    j["format"] = "stochpe-ensemble";
    j["version"] = 1;
    j["paths"] = r.paths;
    j["blowups"] = r.blowups;
    json cols = json::object();
    for (const auto& name : DiagnosticRecord::columns()) {
        cols[name] = {{"sup", moment_json(r.sup.at(name))}, {"final", moment_json(r.final.at(name))}};
    }
    j["columns"] = cols;
    json hits = json::object();
    for (const auto& [name, count] : r.hit_count) hits[name] = {{"count", count}, {"time", moment_json(r.hit_time.at(name))}};
    j["hits"] = hits;
    return j.dump(2);
}

std::string report_json(const std::vector<SuiteResult>& suites) {
    json j;
    j["format"] = "stochpe-verify";
    j["version"] = 1;
    bool pass = true;
    json arr = json::array();
    for (const auto& s : suites) {
        json checks = json::array();
        for (const auto& c : s.checks) {
            checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance},
                              {"detail", c.detail}});
        }
        arr.push_back({{"suite", s.suite}, {"pass", s.pass()}, {"seconds", s.seconds}, {"checks", checks}});
        pass = pass && s.pass();
    }
    j["pass"] = pass;
    j["suites"] = arr;
    return j.dump(2);
}

std::string report_json(const ConvergenceReport& r) {
    json j;
    j["format"] = "stochpe-convergence";
    j["version"] = 1;
    j["kind"] = "dt";
    j["dts"] = r.dts;
    j["errors"] = r.errors;
    j["error_se"] = r.error_se;
    j["dt_ref"] = r.dt_ref;
    j["order"] = r.order;
    j["paths"] = r.paths;
    return j.dump(2);
}

std::string report_json(const SpatialReport& r) {
    json j;
    j["format"] = "stochpe-convergence";
    j["version"] = 1;
    j["kind"] = "n";
    j["n_values"] = r.n_values;
    j["n_effective"] = r.n_effective;
    j["projection_errors"] = r.projection_errors;
    j["errors"] = r.errors;
    j["error_se"] = r.error_se;
    j["paths"] = r.paths;
    return j.dump(2);
}

std::string report_json(const HypothesisReport& r) {
    json j;
    j["p"] = r.p;
    j["C_BDG"] = r.C_BDG;
    j["samples"] = r.samples;
    for (auto [name, v, b, bound, pass] :
         {std::tuple{"eta0", r.eta0, r.b0, r.eta0_bound, r.eta0_pass}, std::tuple{"eta1", r.eta1, r.b1, r.eta1_bound, r.eta1_pass},
          std::tuple{"eta2", r.eta2, r.b2, r.eta2_bound, r.eta2_pass}, std::tuple{"eta3", r.eta3, r.b3, r.eta3_bound, r.eta3_pass},
          std::tuple{"gamma", r.gamma, r.bgamma, r.gamma_bound, r.gamma_pass}}) {
        j[name] = {{"value", v}, {"constant", b}, {"bound", bound}, {"pass", pass}};
    }
    j["maximal_pass"] = r.maximal_pass();
    j["global_pass"] = r.global_pass();
    return j.dump(2);
}

int cmd_run(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto e = load(opt);
        const auto u0 = e.initial_condition()(e.solver.path);
        Artifacts art(opt.output_root, e, "run");
        art.open();
        const auto tr = run_trajectory(e.solver, u0);
        art.write("diagnostics.csv", diagnostics_csv(tr.records));
        art.write("final_state.json", checkpoint_to_string(tr.final_state));
        json verdict;
        verdict["status"] = tr.blew_up ? "blowup" : "completed";
        verdict["steps"] = tr.steps;
        verdict["end_time"] = tr.end_time;
        verdict["kappa"] = tr.kappa;
        verdict["n_effective"] = tr.n_effective;
        verdict["initial_H"] = std::sqrt(tr.records.front().H2);
        verdict["final_H"] = norm_H(tr.final_state);
        json hits = json::object();
        for (const auto& [name, t] : tr.hits) hits[name] = opt_json(t);
        verdict["hits"] = hits;
        art.manifest(verdict);
        out << "run " << e.name << ": " << verdict["status"].get<std::string>() << " after " << tr.steps
            << " steps, t = " << tr.end_time << ", |U|_H = " << norm_H(tr.final_state) << " -> " << art.dir() << '\n';
        return tr.blew_up ? kExitBlowup : kExitOk;
    });
}

int cmd_ensemble(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto e = load(opt);
        const auto ic = e.initial_condition();
        Artifacts art(opt.output_root, e, "ensemble");
        art.open();
        const auto rep = run_ensemble(e.solver, ic, e.ensemble);
        art.write("ensemble.json", report_json(rep));
        json verdict;
        verdict["paths"] = rep.paths;
        verdict["blowups"] = rep.blowups;
        const auto& h2 = rep.final.at("H_norm2");
        verdict["final_H_norm2"] = moment_json(h2);
        if (!e.init.per_path) {
            if (const auto ref = ou_reference(e, ic(e.ensemble.first_path))) {
                const double z = h2.se > 0.0 ? (h2.mean - *ref) / h2.se : 0.0;
                verdict["ou_closed_form"] = *ref;
                verdict["ou_z_score"] = z;
                out << "closed-form E|U|^2 = " << *ref << ", ensemble " << h2.mean << " +- " << h2.se << " (z = " << z
                    << ")\n";
            }
        }
        art.manifest(verdict);
        out << "ensemble " << e.name << ": " << rep.paths << " paths, " << rep.blowups << " blow-ups -> " << art.dir()
            << '\n';
        return rep.blowups > 0 ? kExitBlowup : kExitOk;
    });
}

int cmd_verify(const std::string& suite, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto& names = verify_suites();
        if (std::find(names.begin(), names.end(), suite) == names.end()) {
            throw ConfigError("unknown suite '" + suite + "' (expected operators, noise, solver, diagnostics or all)");
        }
        const auto e = load(opt);
        const auto results = run_verify(suite, e.verify);
        Artifacts art(opt.output_root, e, "verify " + suite);
        art.open();
        const auto report = report_json(results);
        art.write("verify.json", report);
        bool pass = true;
        for (const auto& s : results) {
            for (const auto& c : s.checks) {
                out << (c.pass ? "PASS " : "FAIL ") << s.suite << '.' << c.name << "  " << c.value
                    << " <= " << c.tolerance << '\n';
            }
            pass = pass && s.pass();
        }
        art.manifest({{"pass", pass}});
        out << "verify " << suite << ": " << (pass ? "pass" : "FAIL") << '\n';
        return pass ? kExitOk : kExitVerifyFail;
    });
}

int cmd_converge(const std::string& mode, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (mode != "dt" && mode != "n") throw ConfigError("converge mode must be dt or n");
        const auto e = load(opt);
        const auto ic = e.initial_condition();
        const auto& cs = e.converge;
        if (mode == "dt") {
            if (cs.dts.size() < 3) throw ConfigError("converge.dts needs at least three step sizes");
            if (cs.paths == 0) throw ConfigError("converge.paths must be >= 1");
            // nesting and the dt grid are validated before any output exists
            ConvergenceReport rep;
            try {
                for (double dt : cs.dts) {
                    auto c = e.solver;
                    c.dt = dt;
                    c.validate();
                }
                rep = strong_convergence(e.solver, ic, cs.dts, cs.paths, cs.refine, e.ensemble.workers);
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(ex.what());
            }
            Artifacts art(opt.output_root, e, "converge dt");
            art.open();
            std::string csv = "dt,error,error_se\n";
            char buf[96];
            for (std::size_t i = 0; i < rep.dts.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", rep.dts[i], rep.errors[i], rep.error_se[i]);
                csv += buf;
            }
            art.write("convergence.csv", csv);
            art.write("convergence.json", report_json(rep));
            art.manifest({{"order", rep.order}, {"dt_ref", rep.dt_ref}});
            out << "temporal order " << rep.order << " (reference dt " << rep.dt_ref << ", " << rep.paths
                << " paths) -> " << art.dir() << '\n';
            return kExitOk;
        }
        if (cs.n_values.size() < 3) throw ConfigError("converge.n_values needs at least three values");
        SpatialReport rep;
        try {
            rep = spatial_convergence(e.solver, ic, cs.n_values, cs.paths, e.ensemble.workers);
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(ex.what());
        }
        Artifacts art(opt.output_root, e, "converge n");
        art.open();
        std::string csv = "n,n_effective,projection_error,error,error_se\n";
        char buf[128];
        for (std::size_t i = 0; i < rep.n_values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g\n", rep.n_values[i], rep.n_effective[i],
                          rep.projection_errors[i], rep.errors[i], rep.error_se[i]);
            csv += buf;
        }
        art.write("convergence.csv", csv);
        art.write("convergence.json", report_json(rep));
        art.manifest({{"n_values", rep.n_values}, {"errors", rep.errors}});
        out << "spatial study over " << rep.n_values.size() << " sizes -> " << art.dir() << '\n';
        return kExitOk;
    });
}

}  // namespace stochpe
