#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stochpe/experiment.hpp"

namespace py = pybind11;
using namespace stochpe;

namespace {

Experiment load(const std::string& preset, const std::string& config, const std::vector<std::string>& overrides) {
    return load_experiment(config, preset, overrides);
}

py::dict trajectory_dict(const Trajectory& tr) {
    py::dict d;
    d["columns"] = DiagnosticRecord::columns();
    std::vector<std::vector<double>> rows;
    rows.reserve(tr.records.size());
    for (const auto& r : tr.records) rows.push_back(r.values());
    d["records"] = rows;
    py::dict hits;
    for (const auto& [name, t] : tr.hits) hits[py::str(name)] = t ? py::cast(*t) : py::none();
    d["hits"] = hits;
    d["kappa"] = tr.kappa;
    d["blew_up"] = tr.blew_up;
    d["steps"] = tr.steps;
    d["end_time"] = tr.end_time;
    d["n_effective"] = tr.n_effective;
    return d;
}

py::tuple command(const std::string& verb, const std::string& arg, const std::string& preset, const std::string& config,
                  const std::vector<std::string>& overrides, const std::string& output_root) {
    CommandOptions opt{config, preset, overrides, output_root};
    std::ostringstream out, err;
    int code;
    {
        py::gil_scoped_release release;
        if (verb == "run") code = cmd_run(opt, out, err);
        else if (verb == "ensemble") code = cmd_ensemble(opt, out, err);
        else if (verb == "verify") code = cmd_verify(arg, opt, out, err);
        else if (verb == "converge") code = cmd_converge(arg, opt, out, err);
        else throw py::value_error("unknown command '" + verb + "'");
    }
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral-Galerkin simulator for the stochastic primitive equations";
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("version", &version);
    m.def("presets", &preset_names);
    m.def("preset_text", &preset_text, py::arg("name"));
    m.def("verify_suites", &verify_suites);
    m.def("schema", [] {
        py::list out;
        for (const auto& k : config_schema()) {
            py::dict d;
            d["key"] = k.key;
            d["default"] = k.default_value;
            d["help"] = k.help;
            d["choices"] = k.choices;
            out.append(d);
        }
        return out;
    });
    m.def("resolved_config",
          [](const std::string& preset, const std::string& config, const std::vector<std::string>& overrides) {
              return load(preset, config, overrides).resolved;
          },
          py::arg("preset") = "", py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{});

    m.def("simulate",
          [](const std::string& preset, const std::string& config, const std::vector<std::string>& overrides) {
              const auto e = load(preset, config, overrides);
              Trajectory tr;
              {
                  py::gil_scoped_release release;
                  tr = run_trajectory(e.solver, e.initial_condition()(e.solver.path));
              }
              return trajectory_dict(tr);
          },
          py::arg("preset") = "", py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{},
          "Integrate one path; returns the diagnostic series and hitting times.");

    m.def("ensemble_json",
          [](const std::string& preset, const std::string& config, const std::vector<std::string>& overrides) {
              const auto e = load(preset, config, overrides);
              py::gil_scoped_release release;
              return report_json(run_ensemble(e.solver, e.initial_condition(), e.ensemble));
          },
          py::arg("preset") = "", py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{});

    m.def("verify_json",
          [](const std::string& suite, const std::string& preset, const std::string& config,
             const std::vector<std::string>& overrides) {
              const auto e = load(preset, config, overrides);
              py::gil_scoped_release release;
              return report_json(run_verify(suite, e.verify));
          },
          py::arg("suite"), py::arg("preset") = "", py::arg("config") = "",
          py::arg("overrides") = std::vector<std::string>{});

    m.def("growth_constants_json",
          [](const std::string& preset, const std::string& config, const std::vector<std::string>& overrides) {
              const auto e = load(preset, config, overrides);
              if (!e.solver.noise) throw ConfigError("the configuration has no noise");
              py::gil_scoped_release release;
              return report_json(
                  estimate_growth_constants(*e.solver.noise, e.hypothesis_samples, e.hypothesis_p, e.estimator));
          },
          py::arg("preset") = "", py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{});

    m.def("ou_mean_square",
          [](const std::string& preset, const std::string& config, const std::vector<std::string>& overrides) {
              const auto e = load(preset, config, overrides);
              return ou_mean_square(e.solver, e.initial_condition()(0), e.solver.t_end);
          },
          py::arg("preset") = "", py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{});

    m.def("command", &command, py::arg("verb"), py::arg("arg") = "", py::arg("preset") = "", py::arg("config") = "",
          py::arg("overrides") = std::vector<std::string>{}, py::arg("output_root") = "",
          "Run a CLI verb; returns (exit_code, stdout, stderr).");
}
