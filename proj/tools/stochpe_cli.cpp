// stochpe: command-line front end.
//
//   stochpe run      --preset linear-decay
//   stochpe ensemble --config my.cfg --paths 1000 --workers 4
//   stochpe verify   all --preset small-noise
//   stochpe converge dt --preset ou-additive --set converge.paths=64
//   stochpe presets | show-preset NAME | schema | version

#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stochpe/experiment.hpp"

using namespace stochpe;

namespace {

void add_common(CLI::App* cmd, CommandOptions& opt) {
    cmd->add_option("-c,--config", opt.config_path, "config file (key = value)");
    cmd->add_option("-p,--preset", opt.preset, "start from a shipped preset");
    cmd->add_option("-s,--set", opt.overrides, "override a key, key=value (repeatable)")->take_all();
    cmd->add_option("-o,--output-root", opt.output_root, "output root (default $STOCHPE_OUTPUT_ROOT or ./stochpe-output)");
}

const char* type_name(ValueType t) {
    switch (t) {
        case ValueType::Real: return "real";
        case ValueType::Integer: return "integer";
        case ValueType::Boolean: return "bool";
        case ValueType::Text: return "text";
        case ValueType::Choice: return "choice";
        case ValueType::RealList: return "real list";
        case ValueType::IntegerList: return "integer list";
    }
    return "?";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral-Galerkin simulator for the stochastic primitive equations"};
    app.require_subcommand(1);

    CommandOptions opt;
    std::string suite, mode, preset_name;
    std::size_t paths = 0, workers = 0;

    auto* run = app.add_subcommand("run", "integrate one trajectory");
    add_common(run, opt);

    auto* ens = app.add_subcommand("ensemble", "integrate many paths and summarize");
    add_common(ens, opt);
    ens->add_option("--paths", paths, "number of paths (ensemble.paths)");
    ens->add_option("--workers", workers, "worker threads (ensemble.workers)");

    auto* ver = app.add_subcommand("verify", "run invariant suites");
    ver->add_option("suite", suite, "operators | noise | solver | diagnostics | all")->required();
    add_common(ver, opt);

    auto* conv = app.add_subcommand("converge", "temporal (dt) or spatial (n) convergence study");
    conv->add_option("mode", mode, "dt | n")->required();
    add_common(conv, opt);
    conv->add_option("--workers", workers, "worker threads (ensemble.workers)");

    auto* pre = app.add_subcommand("presets", "list shipped presets");
    auto* show = app.add_subcommand("show-preset", "print a preset's config text");
    show->add_option("name", preset_name)->required();
    auto* sch = app.add_subcommand("schema", "list every config key with type and default");
    auto* vers = app.add_subcommand("version", "print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (paths > 0) opt.overrides.push_back("ensemble.paths=" + std::to_string(paths));
    if (workers > 0) opt.overrides.push_back("ensemble.workers=" + std::to_string(workers));

    try {
        if (*run) return cmd_run(opt, std::cout, std::cerr);
        if (*ens) return cmd_ensemble(opt, std::cout, std::cerr);
        if (*ver) return cmd_verify(suite, opt, std::cout, std::cerr);
        if (*conv) return cmd_converge(mode, opt, std::cout, std::cerr);
        if (*pre) {
            for (const auto& n : preset_names()) std::cout << n << '\n';
            return kExitOk;
        }
        if (*show) {
            std::cout << preset_text(preset_name);
            return kExitOk;
        }
        if (*sch) {
            for (const auto& k : config_schema()) {
                std::cout << std::left << std::setw(22) << k.key << std::setw(14) << type_name(k.type)
                          << std::setw(20) << (k.default_value.empty() ? "(unset)" : k.default_value) << k.help;
                if (!k.choices.empty()) {
                    std::cout << " [";
                    for (std::size_t i = 0; i < k.choices.size(); ++i) std::cout << (i ? "|" : "") << k.choices[i];
                    std::cout << ']';
                }
                std::cout << '\n';
            }
            return kExitOk;
        }
        if (*vers) {
            std::cout << "stochpe " << version() << '\n';
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
