#include "ergo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "ergo/averaging.hpp"
#include "ergo/counterexample.hpp"
#include "ergo/errors.hpp"
#include "ergo/io.hpp"
#include "ergo/measure_space.hpp"
#include "ergo/operators.hpp"
#include "ergo/random.hpp"
#include "ergo/return_times.hpp"
#include "ergo/weights.hpp"

namespace ergo {

using json = nlohmann::json;

namespace {

// file name -> content
using Outputs = std::map<std::string, std::string>;

constexpr std::size_t kDefaultBudget = 100'000'000;

std::string output_name(const json& doc, const char* kind, const std::string& fallback) {
    if (doc.contains("outputs") && doc.at("outputs").is_object() && doc.at("outputs").contains(kind)) {
        const auto& v = doc.at("outputs").at(kind);
        if (!v.is_string()) throw InputError(std::string("outputs.") + kind + ": expected a file name");
        return v.get<std::string>();
    }
    return fallback;
}

std::size_t budget_of(const json& doc) {
    if (!doc.contains("budget")) return kDefaultBudget;
    const auto& b = doc.at("budget");
    if (!b.is_number() || b.get<double>() < 1.0) throw InputError("budget: expected a positive number");
    return static_cast<std::size_t>(b.get<double>());
}

std::vector<std::size_t> probes_of(const json& doc, std::size_t atoms) {
    if (!doc.contains("probes")) return {0};
    const auto& p = doc.at("probes");
    if (!p.is_array()) throw InputError("probes: expected an array of atom indices");
    std::vector<std::size_t> out;
    for (const auto& x : p) {
        if (!x.is_number_integer() || x.get<std::int64_t>() < 0) {
            throw InputError("probes: expected nonnegative integers");
        }
        const auto v = x.get<std::size_t>();
        if (v >= atoms) {
            std::ostringstream msg;
            msg << "probes: atom " << v << " is outside the space of " << atoms << " atoms";
            throw InputError(msg.str());
        }
        out.push_back(v);
    }
    return out;
}

const json& section(const json& doc, const char* key) {
    if (!doc.contains(key)) throw InputError(std::string("missing section \"") + key + "\"");
    return doc.at(key);
}

bool is_counterexample_operator(const json& doc) {
    return doc.contains("operator") && doc.at("operator").is_object() &&
           doc.at("operator").value("kind", std::string{}) == "counterexample";
}

// Space for commands that act on (space, function[, operator]).
SpacePtr resolve_space(const json& doc, Rng& rng, std::optional<Operator>& op) {
    if (doc.contains("operator")) {
        if (is_counterexample_operator(doc)) {
            op = io::parse_operator(doc.at("operator"), nullptr, rng);
            return operator_space_ptr(*op);
        }
        auto space = io::parse_space(section(doc, "space"));
        op = io::parse_operator(doc.at("operator"), space, rng);
        return space;
    }
    return io::parse_space(section(doc, "space"));
}

std::string header(const ExperimentConfig& cfg) { return io::provenance_line(cfg.command, cfg.seed) + "\n"; }

json base_json(const ExperimentConfig& cfg) {
    return {{"schema", 1}, {"command", cfg.command}, {"seed", cfg.seed}};
}

// ---------------------------------------------------------------------------
// subcommands

Outputs cmd_rearrange(const ExperimentConfig& cfg, Rng& rng) {
    auto space = io::parse_space(section(cfg.doc, "space"));
    const auto f = io::parse_function(section(cfg.doc, "function"), space, rng);
    std::ostringstream csv;
    csv << header(cfg);
    write_rearrangement_csv(csv, rearrangement(f));
    return {{output_name(cfg.doc, "csv", "rearrangement.csv"), csv.str()}};
}

Outputs cmd_norms(const ExperimentConfig& cfg, Rng& rng) {
    auto space = io::parse_space(section(cfg.doc, "space"));
    const auto f = io::parse_function(section(cfg.doc, "function"), space, rng);
    json out = base_json(cfg);
    out["L1"] = norm(f, NormKind::L1);
    out["Linf"] = norm(f, NormKind::Linf);
    out["L1plusLinf"] = norm(f, NormKind::L1plusLinf);
    out["L1capLinf"] = norm(f, NormKind::L1capLinf);
    if (cfg.doc.contains("norms")) {
        const auto& n = cfg.doc.at("norms");
        const double tol = n.value("tol", 1e-12);
        if (n.contains("orlicz_power")) {
            const auto phi = OrliczFunction::power(n.at("orlicz_power").get<double>());
            out["luxemburg"] = {{"phi", phi.name}, {"value", luxemburg_norm(f, phi, tol)}};
        }
        if (n.contains("lorentz")) {
            const auto& l = n.at("lorentz");
            const LorentzWeight w(l.at("knots").get<std::vector<double>>(), l.at("slopes").get<std::vector<double>>());
            out["lorentz"] = lorentz_norm(f, w);
        }
        if (n.contains("tail_t0")) {
            const auto tail = r_mu_tail(f, n.at("tail_t0").get<double>());
            out["r_mu_tail"] = {{"value", tail.value}, {"truncation_warning", tail.truncation_warning}};
        }
    }
    out["truncated"] = space->truncated();
    return {{output_name(cfg.doc, "json", "norms.json"), out.dump(2) + "\n"}};
}

Outputs cmd_ds_check(const ExperimentConfig& cfg, Rng& rng) {
    std::optional<Operator> op;
    resolve_space(cfg.doc, rng, op);
    if (!op) throw InputError("missing section \"operator\"");
    json out = base_json(cfg);
    out["certificate"] = io::to_json(ds_certificate(*op));
    if (const auto* k = std::get_if<KernelOperator>(&*op)) {
        out["adjoint_certificate"] = io::to_json(ds_certificate(adjoint(*k)));
        out["modulus_certificate"] = io::to_json(ds_certificate(linear_modulus(*k)));
        out["adjoint_modulus_commutes"] = adjoint_modulus_commutation(*k);
    }
    return {{output_name(cfg.doc, "json", "ds_check.json"), out.dump(2) + "\n"}};
}

json averaging_summary(const ExperimentConfig& cfg, const AveragingReport& rep) {
    json out = base_json(cfg);
    std::vector<std::size_t> ns;
    for (const auto& r : rep.records) ns.push_back(r.n);
    out["checkpoints"] = ns;
    out["probes"] = rep.probes;
    out["oscillation"] = rep.probe_oscillation;
    out["normalizer"] = rep.normalizer;
    out["full"] = rep.full;
    bool all_majorized = true;
    bool evaluated = false;
    for (const auto& r : rep.records) {
        if (r.majorized) {
            evaluated = true;
            all_majorized = all_majorized && *r.majorized;
        }
    }
    out["majorized_at_every_checkpoint"] = evaluated ? json(all_majorized) : json(nullptr);
    return out;
}

Outputs cmd_average(const ExperimentConfig& cfg, Rng& rng, bool weighted_run) {
    std::optional<Operator> op;
    auto space = resolve_space(cfg.doc, rng, op);
    if (!op) throw InputError("missing section \"operator\"");
    const auto f = io::parse_function(section(cfg.doc, "function"), space, rng);
    const auto cps = io::parse_checkpoints(section(cfg.doc, "checkpoints"));
    AveragingOptions opts;
    opts.probes = probes_of(cfg.doc, space->size());
    opts.retain_full = cfg.doc.value("full", true);
    opts.check_majorization = cfg.doc.value("majorization", true);
    opts.iteration_budget = budget_of(cfg.doc);

    AveragingReport rep;
    json summary;
    if (weighted_run) {
        const auto beta = io::parse_weight(section(cfg.doc, "weight"));
        rep = weighted(*op, f, beta, cps, opts);
        summary = averaging_summary(cfg, rep);
        const auto check = validate_bound(beta, cps.max());
        summary["weight_bound"] = beta.bound();
        summary["weight_bound_ok"] = check.ok;
    } else {
        rep = cesaro(*op, f, cps, opts);
        summary = averaging_summary(cfg, rep);
    }
    const std::string stem = weighted_run ? "weighted_average" : "average";
    std::ostringstream csv;
    csv << header(cfg);
    io::write_report_csv(csv, rep);
    return {{output_name(cfg.doc, "csv", stem + ".csv"), csv.str()},
            {output_name(cfg.doc, "json", stem + ".json"), summary.dump(2) + "\n"}};
}

Outputs cmd_wiener_wintner(const ExperimentConfig& cfg, Rng& rng) {
    const auto& sys_json = section(cfg.doc, "system");
    const auto sys = io::parse_system(sys_json);
    const auto& f_json = section(cfg.doc, "function");
    const auto f = io::parse_function(f_json, sys.space_ptr(), rng);
    const auto cps = io::parse_checkpoints(section(cfg.doc, "checkpoints"));
    const auto probes = probes_of(cfg.doc, sys.size());
    const json& grid_json = section(cfg.doc, "lambda_grid");
    if (!grid_json.is_number_integer() || grid_json.get<std::int64_t>() < 1) {
        throw InputError("lambda_grid: expected a positive integer");
    }
    SweepOptions opts;
    opts.iteration_budget = budget_of(cfg.doc);
    const auto sweep = wiener_wintner_sweep(sys, f, probes, grid_json.get<std::size_t>(), cps, opts);

    // a rotation by a/N sampled through a character has a closed form
    io::SweepOracle oracle;
    std::vector<std::size_t> resonant;
    if (sys_json.contains("rotation") && f_json.contains("character")) {
        const auto atoms = static_cast<std::int64_t>(sys.size());
        const auto step = static_cast<std::int64_t>(sys_json.at("rotation").at("step").get<std::size_t>());
        const auto freq = f_json.at("character").get<std::int64_t>();
        const auto a = (freq % atoms) * (step % atoms) % atoms;
        oracle = [&sweep, atoms, a, freq](std::size_t j, std::size_t p, std::size_t c) {
            const double omega = static_cast<double>((freq * static_cast<std::int64_t>(sweep.probes[p])) % atoms) /
                                 static_cast<double>(atoms);
            return rotation_closed_form(a, atoms, sweep.lambdas[j], omega, sweep.checkpoints[c]);
        };
        for (std::size_t j = 0; j < sweep.lambdas.size(); ++j) {
            if (std::abs(1.0 - sweep.lambdas[j] * unit_root(a, atoms)) < kResonanceThreshold) resonant.push_back(j);
        }
    }
    std::ostringstream csv;
    csv << header(cfg);
    io::write_sweep_csv(csv, sweep, oracle);

    json summary = base_json(cfg);
    summary["lambda_grid"] = sweep.lambdas.size();
    summary["probes"] = sweep.probes;
    summary["checkpoints"] = sweep.checkpoints;
    summary["closed_form"] = static_cast<bool>(oracle);
    summary["resonant_lambda_indices"] = resonant;
    double max_err = 0.0;
    if (oracle) {
        for (std::size_t j = 0; j < sweep.lambdas.size(); ++j)
            for (std::size_t p = 0; p < sweep.probes.size(); ++p)
                for (std::size_t c = 0; c < sweep.checkpoints.size(); ++c)
                    max_err = std::max(max_err, std::abs(sweep.at(j, p, c) - oracle(j, p, c)));
        summary["max_abs_err"] = max_err;
    }
    return {{output_name(cfg.doc, "csv", "wiener_wintner.csv"), csv.str()},
            {output_name(cfg.doc, "json", "wiener_wintner.json"), summary.dump(2) + "\n"}};
}

Outputs cmd_return_times(const ExperimentConfig& cfg, Rng& rng) {
    const auto sys1 = io::parse_system(section(cfg.doc, "system"));
    const auto sys2 = io::parse_system(section(cfg.doc, "system2"));
    const auto f = io::parse_function(section(cfg.doc, "function"), sys1.space_ptr(), rng);
    const auto g = io::parse_function(section(cfg.doc, "function2"), sys2.space_ptr(), rng);
    const auto cps = io::parse_checkpoints(section(cfg.doc, "checkpoints"));
    if (cps.max() > budget_of(cfg.doc)) throw BudgetError("largest checkpoint exceeds the iteration budget");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (cfg.doc.contains("probe_pairs")) {
        for (const auto& p : cfg.doc.at("probe_pairs")) {
            if (!p.is_array() || p.size() != 2) throw InputError("probe_pairs: expected [omega, y] pairs");
            pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
        }
    } else {
        pairs.emplace_back(0, 0);
    }
    const auto rep = product_average(sys1, f, sys2, g, pairs, cps);
    std::ostringstream csv;
    csv << header(cfg);
    io::write_product_csv(csv, rep);
    return {{output_name(cfg.doc, "csv", "return_times.csv"), csv.str()}};
}

std::size_t default_window(std::size_t stages) {
    std::size_t w = 2;
    for (std::size_t i = 0; i < stages && w < (std::size_t{1} << 40); ++i) w *= 3;
    return w;
}

Outputs cmd_counterexample(const ExperimentConfig& cfg) {
    const json ce = cfg.doc.contains("counterexample") ? cfg.doc.at("counterexample") : json::object();
    const double eps = ce.value("eps", 0.1);
    const std::size_t stages = ce.value("stages", std::size_t{3});
    const double margin = ce.value("margin", 0.0);
    CounterexampleOptions opts;
    opts.grid = ce.value("grid", std::size_t{1});
    opts.budget = budget_of(cfg.doc);

    Rearrangement rearr;
    if (ce.contains("rearrangement")) {
        rearr = io::parse_rearrangement(ce.at("rearrangement"));
        if (ce.contains("window")) opts.window = ce.at("window").get<std::size_t>();
    } else {
        // f = 1 on the window
        const std::size_t window = ce.value("window", default_window(stages));
        opts.window = window;
        rearr = Rearrangement({0.0, static_cast<double>(window)}, {1.0});
    }
    const auto cert = construct_breakpoints(rearr, eps, stages, margin, opts);
    const auto check = verify_certificate(cert, rearr);
    const auto op = build_counterexample_operator(cert.breakpoints, cert.grid, cert.window);

    json out = base_json(cfg);
    out["certificate"] = io::to_json(cert);
    out["verification"] = io::to_json(check);
    out["operator_certificate"] = io::to_json(ds_certificate(op));
    std::ostringstream csv;
    csv << header(cfg);
    io::write_report_csv(csv, check.trace);
    if (!check.verified) throw ConsistencyError("constructed certificate failed independent verification");
    return {{output_name(cfg.doc, "json", "counterexample.json"), out.dump(2) + "\n"},
            {output_name(cfg.doc, "csv", "counterexample_trace.csv"), csv.str()}};
}

Outputs dispatch(const ExperimentConfig& cfg) {
    Rng rng(cfg.seed);
    const auto& c = cfg.command;
    if (c == "rearrange") return cmd_rearrange(cfg, rng);
    if (c == "norms") return cmd_norms(cfg, rng);
    if (c == "ds-check") return cmd_ds_check(cfg, rng);
    if (c == "average") return cmd_average(cfg, rng, false);
    if (c == "weighted-average") return cmd_average(cfg, rng, true);
    if (c == "wiener-wintner") return cmd_wiener_wintner(cfg, rng);
    if (c == "return-times") return cmd_return_times(cfg, rng);
    if (c == "counterexample") return cmd_counterexample(cfg);
    throw InputError("unknown command \"" + c + "\"");
}

// ---------------------------------------------------------------------------
// validation

template <class F>
void collect(std::vector<Diagnostic>& out, const char* path, F&& check) {
    try {
        check();
    } catch (const std::exception& e) {
        out.push_back({path, e.what()});
    }
}

std::vector<std::string> required_sections(const std::string& command) {
    if (command == "rearrange" || command == "norms") return {"space", "function"};
    if (command == "ds-check") return {"operator"};
    if (command == "average") return {"operator", "function", "checkpoints"};
    if (command == "weighted-average") return {"operator", "function", "checkpoints", "weight"};
    if (command == "wiener-wintner") return {"system", "function", "checkpoints", "lambda_grid"};
    if (command == "return-times") return {"system", "system2", "function", "function2", "checkpoints"};
    return {};
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
    static const std::vector<std::string> commands = {"rearrange",      "norms",          "ds-check",
                                                      "average",        "weighted-average", "wiener-wintner",
                                                      "return-times",   "counterexample"};
    return commands;
}

json parse_config_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = io::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream msg;
        msg << "malformed JSON at line " << line << ", column " << col << ": " << e.what();
        throw InputError(msg.str());
    }
}

std::vector<Diagnostic> validate(const ExperimentConfig& cfg) {
    std::vector<Diagnostic> out;
    const auto& doc = cfg.doc;
    const auto& commands = experiment_commands();
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end()) {
        out.push_back({"command", "unknown command \"" + cfg.command + "\""});
        return out;
    }
    if (!doc.is_object()) {
        out.push_back({"", "config must be a JSON object"});
        return out;
    }
    if (doc.contains("schema") && doc.at("schema") != 1) out.push_back({"schema", "unsupported schema version"});
    for (const auto& s : required_sections(cfg.command)) {
        if (!doc.contains(s)) out.push_back({s, "missing section required by " + cfg.command});
    }
    if (!out.empty()) return out;

    Rng rng(cfg.seed);
    std::optional<std::size_t> checkpoint_max;
    if (doc.contains("checkpoints")) {
        collect(out, "checkpoints", [&] { checkpoint_max = io::parse_checkpoints(doc.at("checkpoints")).max(); });
    }
    if (doc.contains("budget")) collect(out, "budget", [&] { (void)budget_of(doc); });

    if (doc.contains("weight")) {
        collect(out, "weight", [&] {
            const auto w = io::parse_weight(doc.at("weight"));
            const auto n = std::max<std::size_t>(1, checkpoint_max.value_or(1));
            const auto check = validate_bound(w, n);
            if (!check.ok) {
                std::ostringstream msg;
                msg << "|beta_k| exceeds the declared bound " << w.bound() << " at k = " << *check.first_violation;
                throw InputError(msg.str());
            }
            if (const auto len = w.length(); len && checkpoint_max && *len < *checkpoint_max) {
                throw InputError("explicit weight list is shorter than the largest checkpoint");
            }
        });
    }

    const bool system_command = cfg.command == "wiener-wintner" || cfg.command == "return-times";
    if (system_command) {
        std::optional<std::size_t> atoms1, atoms2;
        collect(out, "system", [&] {
            const auto s = io::parse_system(doc.at("system"));
            atoms1 = s.size();
            (void)io::parse_function(doc.at("function"), s.space_ptr(), rng);
        });
        if (atoms1 && doc.contains("probes")) collect(out, "probes", [&] { (void)probes_of(doc, *atoms1); });
        if (cfg.command == "return-times") {
            collect(out, "system2", [&] {
                const auto s = io::parse_system(doc.at("system2"));
                atoms2 = s.size();
                (void)io::parse_function(doc.at("function2"), s.space_ptr(), rng);
            });
            if (atoms1 && atoms2 && doc.contains("probe_pairs")) {
                collect(out, "probe_pairs", [&] {
                    for (const auto& p : doc.at("probe_pairs")) {
                        if (!p.is_array() || p.size() != 2) throw InputError("expected [omega, y] pairs");
                        if (p.at(0).get<std::size_t>() >= *atoms1 || p.at(1).get<std::size_t>() >= *atoms2) {
                            throw InputError("probe pair index out of range");
                        }
                    }
                });
            }
        }
        return out;
    }

    if (cfg.command == "counterexample") {
        if (doc.contains("counterexample")) {
            collect(out, "counterexample", [&] {
                const auto& ce = doc.at("counterexample");
                if (!ce.is_object()) throw InputError("expected an object");
                const double eps = ce.value("eps", 0.1);
                if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0, 1)");
                if (ce.value("stages", std::size_t{3}) < 2) throw InputError("stages must be >= 2");
                if (ce.value("margin", 0.0) < 0.0) throw InputError("margin must be nonnegative");
                if (ce.value("grid", std::size_t{1}) < 1) throw InputError("grid must be >= 1");
                if (ce.contains("rearrangement")) (void)io::parse_rearrangement(ce.at("rearrangement"));
            });
        }
        return out;
    }

    // space / function / operator commands
    std::optional<std::size_t> atoms;
    SpacePtr space;
    collect(out, doc.contains("space") ? "space" : "operator", [&] {
        if (is_counterexample_operator(doc)) {
            space = operator_space_ptr(io::parse_operator(doc.at("operator"), nullptr, rng));
        } else {
            space = io::parse_space(section(doc, "space"));
        }
        atoms = space->size();
    });
    if (!space) return out;
    if (doc.contains("operator") && !is_counterexample_operator(doc)) {
        collect(out, "operator", [&] {
            const auto& o = doc.at("operator");
            if (o.value("kind", std::string{}) == "kernel" && o.contains("matrix_re") && o.at("matrix_re").is_array()) {
                const auto rows = o.at("matrix_re").size();
                if (rows != *atoms) {
                    std::ostringstream msg;
                    msg << "kernel is " << rows << "x" << rows << " but the space has " << *atoms << " atoms";
                    throw InputError(msg.str());
                }
            }
            (void)io::parse_operator(o, space, rng);
        });
    }
    if (doc.contains("function")) {
        collect(out, "function", [&] { (void)io::parse_function(doc.at("function"), space, rng); });
    }
    if (doc.contains("probes")) collect(out, "probes", [&] { (void)probes_of(doc, *atoms); });
    return out;
}

RunResult run(const ExperimentConfig& cfg) {
    RunResult res;
    try {
        const auto diags = validate(cfg);
        if (!diags.empty()) {
            std::ostringstream msg;
            for (const auto& d : diags) msg << (d.path.empty() ? "config" : d.path) << ": " << d.message << "\n";
            res.code = ExitCode::Validation;
            res.message = msg.str();
            return res;
        }
        const auto outputs = dispatch(cfg);
        for (const auto& [name, content] : outputs) {
            const auto path = cfg.output_dir / name;
            io::write_atomic(path, content);
            res.outputs.push_back(path);
        }
    } catch (const InputError& e) {
        res = {ExitCode::Validation, e.what(), {}};
    } catch (const DomainError& e) {
        res = {ExitCode::Validation, e.what(), {}};
    } catch (const RangeError& e) {
        res = {ExitCode::Validation, e.what(), {}};
    } catch (const CapabilityError& e) {
        res = {ExitCode::Validation, e.what(), {}};
    } catch (const BudgetError& e) {
        res = {ExitCode::Budget, e.what(), {}};
    } catch (const WindowError& e) {
        res = {ExitCode::Budget, e.what(), {}};
    } catch (const ConsistencyError& e) {
        res = {ExitCode::Consistency, e.what(), {}};
    } catch (const json::exception& e) {
        res = {ExitCode::Validation, e.what(), {}};
    } catch (const std::exception& e) {
        res = {ExitCode::Failure, e.what(), {}};
    }
    return res;
}

}  // namespace ergo
