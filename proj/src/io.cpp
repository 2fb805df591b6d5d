#include "ergo/io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "ergo/errors.hpp"

namespace ergo::io {

namespace {

[[noreturn]] void fail(std::string_view what) { throw InputError(std::string(what)); }

const json& field(const json& j, const char* key, std::string_view ctx) {
    if (!j.is_object() || !j.contains(key)) {
        std::ostringstream msg;
        msg << ctx << ": missing field \"" << key << "\"";
        fail(msg.str());
    }
    return j.at(key);
}

double number(const json& j, std::string_view ctx) {
    if (!j.is_number()) {
        std::ostringstream msg;
        msg << ctx << ": expected a number";
        fail(msg.str());
    }
    return j.get<double>();
}

std::size_t count(const json& j, std::string_view ctx) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) {
        std::ostringstream msg;
        msg << ctx << ": expected a nonnegative integer";
        fail(msg.str());
    }
    const auto v = j.get<std::int64_t>();
    if (v < 0) {
        std::ostringstream msg;
        msg << ctx << ": expected a nonnegative integer";
        fail(msg.str());
    }
    return static_cast<std::size_t>(v);
}

std::vector<double> numbers(const json& j, std::string_view ctx) {
    if (!j.is_array()) {
        std::ostringstream msg;
        msg << ctx << ": expected an array of numbers";
        fail(msg.str());
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& x : j) out.push_back(number(x, ctx));
    return out;
}

std::vector<std::size_t> counts(const json& j, std::string_view ctx) {
    if (!j.is_array()) {
        std::ostringstream msg;
        msg << ctx << ": expected an array of integers";
        fail(msg.str());
    }
    std::vector<std::size_t> out;
    out.reserve(j.size());
    for (const auto& x : j) out.push_back(count(x, ctx));
    return out;
}

std::vector<Complex> complex_array(const json& j, const char* re_key, const char* im_key, std::string_view ctx) {
    const auto re = numbers(field(j, re_key, ctx), ctx);
    std::vector<Complex> out(re.begin(), re.end());
    if (j.contains(im_key)) {
        const auto im = numbers(j.at(im_key), ctx);
        if (im.size() != re.size()) {
            std::ostringstream msg;
            msg << ctx << ": \"" << re_key << "\" and \"" << im_key << "\" differ in length";
            fail(msg.str());
        }
        for (std::size_t i = 0; i < im.size(); ++i) out[i].imag(im[i]);
    }
    return out;
}

Complex complex_scalar(const json& j, std::string_view ctx) {
    if (j.is_number()) return number(j, ctx);
    return {number(field(j, "re", ctx), ctx), j.contains("im") ? number(j.at("im"), ctx) : 0.0};
}

std::vector<std::vector<Complex>> complex_matrix(const json& j, std::string_view ctx) {
    const auto& re = field(j, "matrix_re", ctx);
    if (!re.is_array()) fail("kernel: \"matrix_re\" must be an array of rows");
    std::vector<std::vector<Complex>> rows;
    for (const auto& r : re) {
        const auto vals = numbers(r, ctx);
        rows.emplace_back(vals.begin(), vals.end());
    }
    if (j.contains("matrix_im")) {
        const auto& im = j.at("matrix_im");
        if (!im.is_array() || im.size() != rows.size()) fail("kernel: \"matrix_im\" shape differs from \"matrix_re\"");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto vals = numbers(im[i], ctx);
            if (vals.size() != rows[i].size()) fail("kernel: \"matrix_im\" shape differs from \"matrix_re\"");
            for (std::size_t k = 0; k < vals.size(); ++k) rows[i][k].imag(vals[k]);
        }
    }
    return rows;
}

bool flag(const json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) {
        std::ostringstream msg;
        msg << "\"" << key << "\" must be a boolean";
        fail(msg.str());
    }
    return j.at(key).get<bool>();
}

}  // namespace

// ---------------------------------------------------------------------------
// parsing

SpacePtr parse_space(const json& j) {
    if (!j.is_object()) fail("space: expected an object");
    const bool truncated = flag(j, "truncated", false);
    if (j.contains("uniform")) {
        const auto n = count(j.at("uniform"), "space.uniform");
        const double w = j.contains("weight") ? number(j.at("weight"), "space.weight") : 1.0;
        return AtomicMeasureSpace::uniform(n, w, truncated);
    }
    return AtomicMeasureSpace::make(numbers(field(j, "weights", "space"), "space.weights"), truncated);
}

MeasurableFunction parse_function(const json& j, const SpacePtr& space, Rng& rng) {
    if (!j.is_object()) fail("function: expected an object");
    if (j.contains("constant")) {
        return MeasurableFunction::constant(space, complex_scalar(j.at("constant"), "function.constant"));
    }
    if (j.contains("character")) {
        const auto m = j.at("character");
        if (!m.is_number_integer()) fail("function.character: expected an integer frequency");
        return character(space, m.get<std::int64_t>());
    }
    if (j.contains("random")) {
        const auto& r = j.at("random");
        const double lo = r.contains("low") ? number(r.at("low"), "function.random.low") : -1.0;
        const double hi = r.contains("high") ? number(r.at("high"), "function.random.high") : 1.0;
        return random_function(rng, space, lo, hi, flag(r, "complex", false));
    }
    return {space, complex_array(j, "re", "im", "function")};
}

Operator parse_operator(const json& j, const SpacePtr& space, Rng& rng) {
    const auto kind_json = field(j, "kind", "operator");
    if (!kind_json.is_string()) fail("operator.kind: expected a string");
    const auto kind = kind_json.get<std::string>();
    if (kind == "kernel") return KernelOperator(space, complex_matrix(j, "operator"));
    if (kind == "identity") return KernelOperator::identity(space);
    if (kind == "composition") {
        auto map = counts(field(j, "map", "operator"), "operator.map");
        std::vector<Complex> mult;
        if (j.contains("mult_re")) {
            mult = complex_array(j, "mult_re", "mult_im", "operator");
        } else {
            mult.assign(map.size(), 1.0);
        }
        return CompositionOperator(space, std::move(map), std::move(mult), flag(j, "measure_preserving", false));
    }
    if (kind == "cyclic_shift") {
        const std::size_t offset = j.contains("offset") ? count(j.at("offset"), "operator.offset") : 1;
        return CompositionOperator::cyclic_shift(space, offset);
    }
    if (kind == "counterexample") {
        const auto bp = counts(field(j, "breakpoints", "operator"), "operator.breakpoints");
        const auto grid = count(field(j, "grid", "operator"), "operator.grid");
        const auto window = count(field(j, "window", "operator"), "operator.window");
        return build_counterexample_operator(bp, grid, window);
    }
    if (kind == "random_ds_kernel") {
        const double density = j.contains("density") ? number(j.at("density"), "operator.density") : 1.0;
        return random_ds_kernel(rng, space, flag(j, "complex", false), density);
    }
    fail("operator.kind: unknown kind \"" + kind + "\"");
}

WeightSequence parse_weight(const json& j) {
    const auto kind_json = field(j, "kind", "weight");
    if (!kind_json.is_string()) fail("weight.kind: expected a string");
    const auto kind = kind_json.get<std::string>();
    if (kind == "constant") {
        return WeightSequence::constant({number(field(j, "re", "weight"), "weight.re"),
                                         j.contains("im") ? number(j.at("im"), "weight.im") : 0.0});
    }
    if (kind == "lambda_power") {
        return WeightSequence::lambda_power({number(field(j, "lambda_re", "weight"), "weight.lambda_re"),
                                             number(field(j, "lambda_im", "weight"), "weight.lambda_im")});
    }
    if (kind == "periodic") return WeightSequence::periodic(complex_array(j, "re", "im", "weight"));
    if (kind == "explicit") {
        std::optional<double> bound;
        if (j.contains("bound")) bound = number(j.at("bound"), "weight.bound");
        return WeightSequence::explicit_list(complex_array(j, "re", "im", "weight"), bound);
    }
    if (kind == "trig_poly") {
        const auto& terms = field(j, "terms", "weight");
        if (!terms.is_array()) fail("weight.terms: expected an array");
        std::vector<TrigTerm> out;
        for (const auto& t : terms) {
            out.push_back({{number(field(t, "z_re", "weight.terms"), "z_re"),
                            t.contains("z_im") ? number(t.at("z_im"), "z_im") : 0.0},
                           {number(field(t, "lam_re", "weight.terms"), "lam_re"),
                            number(field(t, "lam_im", "weight.terms"), "lam_im")},
                           std::nullopt});
        }
        return WeightSequence::trig_poly(TrigPolynomial(std::move(out)));
    }
    fail("weight.kind: unknown kind \"" + kind + "\"");
}

Checkpoints parse_checkpoints(const json& j) {
    if (j.is_object() && j.contains("geometric")) {
        return Checkpoints::geometric(count(j.at("geometric"), "checkpoints.geometric"));
    }
    return Checkpoints(counts(j, "checkpoints"));
}

PointSystem parse_system(const json& j) {
    if (!j.is_object()) fail("system: expected an object");
    if (j.contains("rotation")) {
        const auto& r = j.at("rotation");
        return PointSystem::rotation(count(field(r, "atoms", "system.rotation"), "system.rotation.atoms"),
                                     count(field(r, "step", "system.rotation"), "system.rotation.step"));
    }
    auto space = parse_space(j);
    auto map = counts(field(j, "map", "system"), "system.map");
    const std::string label = j.contains("label") && j.at("label").is_string() ? j.at("label").get<std::string>() : "";
    return {std::move(space), std::move(map), label};
}

Rearrangement parse_rearrangement(const json& j) {
    return {numbers(field(j, "breakpoints", "rearrangement"), "rearrangement.breakpoints"),
            numbers(field(j, "values", "rearrangement"), "rearrangement.values")};
}

// ---------------------------------------------------------------------------
// JSON emission

json to_json(const DSReport& r) {
    return {{"l1_ok", r.l1_ok},
            {"linf_ok", r.linf_ok},
            {"worst_column_sum", r.worst_column_sum},
            {"worst_row_sum", r.worst_row_sum},
            {"passes", r.passes()}};
}

json to_json(const CounterexampleCertificate& c) {
    json stages = json::array();
    for (const auto& s : c.stages) {
        stages.push_back({{"n", s.n},
                          {"direction", s.direction},
                          {"threshold", s.threshold},
                          {"extremal_value", s.extremal_value},
                          {"margin", s.margin}});
    }
    return {{"eps", c.eps},
            {"breakpoints", c.breakpoints},
            {"grid", c.grid},
            {"window", c.window},
            {"margin", c.margin},
            {"mode", c.mode == GridMode::UnitCell ? "unit_cell" : "full"},
            {"stages", stages}};
}

json to_json(const CertificateVerification& v) {
    json out = {{"verified", v.verified},
                {"stage_margins", v.stage_margins},
                {"min_margin", v.min_margin},
                {"max_discrepancy", v.max_discrepancy}};
    out["failed_stage"] = v.failed_stage ? json(*v.failed_stage) : json(nullptr);
    return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string provenance_line(std::string_view command, std::uint64_t seed) {
    std::ostringstream s;
    s << "# ergo schema=1 command=" << command << " seed=" << seed;
    return s.str();
}

void write_report_csv(std::ostream& out, const AveragingReport& report) {
    out << "n,probe_id,re,im,l1_norm,linf_norm,majorized\n";
    for (const auto& rec : report.records) {
        const std::string maj = rec.majorized ? (*rec.majorized ? "1" : "0") : "";
        for (std::size_t p = 0; p < report.probes.size(); ++p) {
            out << rec.n << ',' << report.probes[p] << ',' << format_number(rec.probe_values[p].real()) << ','
                << format_number(rec.probe_values[p].imag()) << ',' << format_number(rec.l1_norm) << ','
                << format_number(rec.linf_norm) << ',' << maj << '\n';
        }
    }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const SweepOracle& oracle) {
    out << "lambda_index,lambda_re,lambda_im,probe,n,avg_re,avg_im";
    if (oracle) out << ",oracle_re,oracle_im,abs_err";
    out << '\n';
    for (std::size_t j = 0; j < sweep.lambdas.size(); ++j) {
        for (std::size_t p = 0; p < sweep.probes.size(); ++p) {
            for (std::size_t c = 0; c < sweep.checkpoints.size(); ++c) {
                const auto& v = sweep.at(j, p, c);
                out << j << ',' << format_number(sweep.lambdas[j].real()) << ','
                    << format_number(sweep.lambdas[j].imag()) << ',' << sweep.probes[p] << ','
                    << sweep.checkpoints[c] << ',' << format_number(v.real()) << ',' << format_number(v.imag());
                if (oracle) {
                    const Complex o = oracle(j, p, c);
                    out << ',' << format_number(o.real()) << ',' << format_number(o.imag()) << ','
                        << format_number(std::abs(v - o));
                }
                out << '\n';
            }
        }
    }
}

void write_product_csv(std::ostream& out, const ProductAverageReport& report) {
    out << "n,probe_id,omega,y,re,im\n";
    for (std::size_t c = 0; c < report.checkpoints.size(); ++c) {
        for (std::size_t p = 0; p < report.probes.size(); ++p) {
            const auto& v = report.values[c][p];
            out << report.checkpoints[c] << ',' << p << ',' << report.probes[p].first << ','
                << report.probes[p].second << ',' << format_number(v.real()) << ',' << format_number(v.imag())
                << '\n';
        }
    }
}

// ---------------------------------------------------------------------------

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot move output into place at " + path.string());
    }
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace ergo::io
