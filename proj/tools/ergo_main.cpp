// ergo: batch runner for ergodic-average experiments.
//
//   ergo <command> [--config FILE] [--output-dir DIR] [--seed N]
//   ergo counterexample [--eps E] [--stages J] [--margin M] [--grid G] [--window N]
//   ergo validate <command> --config FILE
//
// Exit status: 0 success, 2 invalid input, 3 budget or window exceeded,
// 4 internal consistency failure, 1 anything else.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "ergo/errors.hpp"
#include "ergo/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ergo::InputError("cannot read config file " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct CommonArgs {
    std::string config_path;
    std::string output_dir = ".";
    std::optional<std::uint64_t> seed;
};

struct CounterexampleArgs {
    std::optional<double> eps;
    std::optional<std::size_t> stages;
    std::optional<double> margin;
    std::optional<std::size_t> grid;
    std::optional<std::size_t> window;
};

ergo::ExperimentConfig load(const std::string& command, const CommonArgs& args) {
    ergo::ExperimentConfig cfg;
    cfg.command = command;
    cfg.output_dir = args.output_dir;
    if (!args.config_path.empty()) cfg.doc = ergo::parse_config_text(read_file(args.config_path));
    if (cfg.doc.is_object() && cfg.doc.contains("seed")) {
        const auto& s = cfg.doc.at("seed");
        if (!s.is_number_unsigned() && !s.is_number_integer()) throw ergo::InputError("seed: expected an integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (args.seed) cfg.seed = *args.seed;
    return cfg;
}

void apply_counterexample_flags(ergo::ExperimentConfig& cfg, const CounterexampleArgs& a) {
    if (!cfg.doc.is_object()) return;
    auto& ce = cfg.doc["counterexample"];
    if (ce.is_null()) ce = nlohmann::json::object();
    if (a.eps) ce["eps"] = *a.eps;
    if (a.stages) ce["stages"] = *a.stages;
    if (a.margin) ce["margin"] = *a.margin;
    if (a.grid) ce["grid"] = *a.grid;
    if (a.window) ce["window"] = *a.window;
}

const std::map<std::string, std::string> blurbs = {
    {"rearrange", "Decreasing rearrangement of a function"},
    {"norms", "Lp, Orlicz, Lorentz and tail norms"},
    {"ds-check", "Doubly stochastic certificate for an operator"},
    {"average", "Cesaro averages with majorization checks"},
    {"weighted-average", "Averages weighted by a bounded sequence"},
    {"wiener-wintner", "Averages swept over a grid of unimodular lambda"},
    {"return-times", "Product averages along two systems"},
    {"counterexample", "Build and verify a divergent weighted average"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ergodic averages in symmetric function spaces"};
    app.require_subcommand(1);

    CommonArgs common;
    CounterexampleArgs ce_args;
    std::string validate_command;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "JSON experiment config (schema 1)");
        sub->add_option("--output-dir", common.output_dir, "Directory for reports")->capture_default_str();
        sub->add_option("--seed", common.seed, "Overrides the config seed");
    };

    for (const auto& name : ergo::experiment_commands()) {
        auto it = blurbs.find(name);
        auto* sub = app.add_subcommand(name, it == blurbs.end() ? "" : it->second);
        add_common(sub);
        if (name == "counterexample") {
            sub->add_option("--eps", ce_args.eps, "Probe interval (eps, 1)");
            sub->add_option("--stages", ce_args.stages, "Number of breakpoints J");
            sub->add_option("--margin", ce_args.margin, "Required clearance past +-1/2");
            sub->add_option("--grid", ce_args.grid, "Atoms per unit cell");
            sub->add_option("--window", ce_args.window, "Truncation window length");
        }
    }
    auto* validate_sub = app.add_subcommand("validate", "Check a config without running it");
    validate_sub->add_option("command", validate_command, "Subcommand the config is meant for")->required();
    add_common(validate_sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ergo::ExitCode::Validation);
    }

    auto* sub = app.get_subcommands().front();
    const std::string command = sub == validate_sub ? validate_command : sub->get_name();
    try {
        auto cfg = load(command, common);
        if (command == "counterexample") apply_counterexample_flags(cfg, ce_args);
        if (sub == validate_sub) {
            const auto diags = ergo::validate(cfg);
            for (const auto& d : diags) std::cerr << (d.path.empty() ? "config" : d.path) << ": " << d.message << "\n";
            if (diags.empty()) std::cout << "valid\n";
            return diags.empty() ? 0 : static_cast<int>(ergo::ExitCode::Validation);
        }
        const auto result = ergo::run(cfg);
        if (result.code != ergo::ExitCode::Ok) {
            std::cerr << "ergo " << command << ": " << result.message;
            if (!result.message.empty() && result.message.back() != '\n') std::cerr << '\n';
        }
        for (const auto& p : result.outputs) std::cout << p.string() << "\n";
        return static_cast<int>(result.code);
    } catch (const ergo::InputError& e) {
        std::cerr << "ergo " << command << ": " << e.what() << "\n";
        return static_cast<int>(ergo::ExitCode::Validation);
    } catch (const std::exception& e) {
        std::cerr << "ergo " << command << ": " << e.what() << "\n";
        return static_cast<int>(ergo::ExitCode::Failure);
    }
}
