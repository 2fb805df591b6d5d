#include "ergo/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ergo/errors.hpp"
#include "ergo/operators.hpp"

namespace ergo {

namespace {

constexpr double kStrictClearance = 1e-12;
constexpr double kPipelineTolerance = 1e-9;

// Signed clearance of `value` past the stage threshold.
double clearance(std::size_t stage, double value) {
    if (stage == 1) return value - 1.0;
    return stage % 2 == 0 ? -0.5 - value : value - 0.5;
}

bool stage_holds(std::size_t stage, double value, double margin) {
    const double c = clearance(stage, value);
    if (stage == 1) return c >= -kStrictClearance;
    return c > kStrictClearance && c >= margin;
}

void check_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0, 1)");
}

bool constant_on_window(const Rearrangement& r, std::size_t window) {
    const auto bp = r.breakpoints();
    return r.plateau_count() >= 1 && bp[1] >= static_cast<double>(window);
}

}  // namespace

std::vector<double> sample_rearrangement(const Rearrangement& r, std::size_t grid, std::size_t window) {
    const std::size_t atoms = grid * window;
    std::vector<double> out(atoms);
    const double h = 1.0 / static_cast<double>(grid);
    for (std::size_t i = 0; i < atoms; ++i) out[i] = r.value_at((static_cast<double>(i) + 0.5) * h);
    return out;
}

std::vector<std::size_t> probe_atoms(double eps, std::size_t grid) {
    std::vector<std::size_t> out;
    const double h = 1.0 / static_cast<double>(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        const double t = (static_cast<double>(i) + 0.5) * h;
        if (t > eps && t < 1.0) out.push_back(i);
    }
    return out;
}

double sign_product_average(std::span<const std::size_t> breakpoints, std::span<const double> samples,
                            std::size_t grid, std::size_t probe, std::size_t n) {
    if (n < 1) throw DomainError("average index n must be >= 1");
    if (probe >= grid) throw InputError("probe must lie in the first unit cell");
    if (probe + (n - 1) * grid >= samples.size()) throw WindowError("average reaches past the window");
    double sum = 0.0;
    std::size_t flips = 0;
    for (std::size_t k = 0; k < n; ++k) {
        while (flips < breakpoints.size() && breakpoints[flips] <= k) ++flips;
        const double sign = flips % 2 == 0 ? 1.0 : -1.0;
        sum += sign * samples[probe + k * grid];
    }
    return sum / static_cast<double>(n);
}

CounterexampleCertificate construct_breakpoints(const Rearrangement& rearr, double eps, std::size_t stages,
                                                double margin, const CounterexampleOptions& opts) {
    check_eps(eps);
    if (stages < 2) throw InputError("at least two stages are required");
    if (!(margin >= 0.0)) throw InputError("margin must be nonnegative");
    if (opts.grid < 1) throw InputError("grid must be a positive integer");

    const double support = rearr.support_measure();
    const std::size_t window = opts.window.value_or(static_cast<std::size_t>(std::floor(support)));
    if (window < 1 || static_cast<double>(window) > support) {
        throw InputError("window must be a positive length inside the support of the rearrangement");
    }
    const auto samples = sample_rearrangement(rearr, opts.grid, window);
    if (std::any_of(samples.begin(), samples.end(), [](double v) { return v < 1.0; })) {
        throw InputError("the rearrangement must satisfy mu_t >= 1 on the window");
    }

    CounterexampleCertificate cert;
    cert.eps = eps;
    cert.grid = opts.grid;
    cert.window = window;
    cert.margin = margin;
    cert.mode = constant_on_window(rearr, window) ? GridMode::UnitCell : GridMode::Full;

    auto probes = probe_atoms(eps, opts.grid);
    if (probes.empty()) throw InputError("no grid point lies in (eps, 1)");
    if (cert.mode == GridMode::UnitCell) probes.resize(1);

    std::vector<double> sums(probes.size());
    auto record_stage = [&](std::size_t stage, std::size_t n) {
        StageRecord rec;
        rec.n = n;
        rec.direction = stage % 2 == 0 ? -1 : 1;
        rec.threshold = stage == 1 ? 1.0 : (stage % 2 == 0 ? -0.5 : 0.5);
        double worst_clearance = std::numeric_limits<double>::infinity();
        for (double s : sums) {
            const double a = s / static_cast<double>(n);
            const double c = clearance(stage, a);
            if (c < worst_clearance) {
                worst_clearance = c;
                rec.extremal_value = a;
            }
        }
        rec.margin = worst_clearance;
        cert.stages.push_back(rec);
    };

    // stage 1: n_1 = 1, a_1 = mu_t >= 1
    for (std::size_t p = 0; p < probes.size(); ++p) sums[p] = samples[probes[p]];
    cert.breakpoints.push_back(1);
    record_stage(1, 1);

    std::size_t n = 1;
    for (std::size_t stage = 2; stage <= stages; ++stage) {
        // terms k in [n_{stage-1}, n_stage) carry sign (-1)^{stage-1}
        const double sign = stage % 2 == 0 ? -1.0 : 1.0;
        while (true) {
            ++n;
            if (n > window) {
                std::ostringstream msg;
                msg << "stage " << stage << " needs n > " << window << ", past the window";
                throw WindowError(msg.str());
            }
            if (n > opts.budget) throw BudgetError("breakpoint search exceeded its budget");
            bool all_hold = true;
            for (std::size_t p = 0; p < probes.size(); ++p) {
                sums[p] += sign * samples[probes[p] + (n - 1) * opts.grid];
                if (all_hold && !stage_holds(stage, sums[p] / static_cast<double>(n), margin)) all_hold = false;
            }
            if (all_hold) break;
        }
        cert.breakpoints.push_back(n);
        record_stage(stage, n);
    }
    return cert;
}

CertificateVerification verify_certificate(const CounterexampleCertificate& cert, const Rearrangement& rearr) {
    check_eps(cert.eps);
    if (cert.breakpoints.empty()) throw InputError("certificate has no breakpoints");
    if (cert.grid < 1) throw InputError("certificate grid must be positive");
    const auto probes = probe_atoms(cert.eps, cert.grid);
    if (probes.empty()) throw InputError("no grid point lies in (eps, 1)");
    if (static_cast<double>(cert.window) > rearr.support_measure()) {
        throw InputError("certificate window exceeds the support of the rearrangement");
    }

    const auto op = build_counterexample_operator(cert.breakpoints, cert.grid, cert.window);
    const auto samples = sample_rearrangement(rearr, cert.grid, cert.window);
    const MeasurableFunction f(op.space_ptr(), std::vector<double>(samples.begin(), samples.end()));

    AveragingOptions opts;
    opts.probes = probes;
    opts.retain_full = false;
    CertificateVerification out;
    out.trace = cesaro(Operator{op}, f, Checkpoints(cert.breakpoints), opts);

    out.verified = true;
    out.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cert.breakpoints.size(); ++j) {
        const std::size_t stage = j + 1;
        const auto& rec = out.trace.records[j];
        double stage_margin = std::numeric_limits<double>::infinity();
        bool holds = true;
        for (std::size_t p = 0; p < probes.size(); ++p) {
            const double pipeline = rec.probe_values[p].real();
            const double direct = sign_product_average(cert.breakpoints, samples, cert.grid, probes[p], rec.n);
            const double gap = std::abs(pipeline - direct) + std::abs(rec.probe_values[p].imag());
            out.max_discrepancy = std::max(out.max_discrepancy, gap);
            if (gap > kPipelineTolerance) {
                std::ostringstream msg;
                msg << "operator pipeline and sign-product formula disagree by " << gap << " at n = " << rec.n
                    << ", atom " << probes[p];
                throw ConsistencyError(msg.str());
            }
            stage_margin = std::min(stage_margin, clearance(stage, pipeline));
            if (!stage_holds(stage, pipeline, 0.0)) holds = false;
        }
        out.stage_margins.push_back(stage_margin);
        out.min_margin = std::min(out.min_margin, stage_margin);
        if (!holds && out.verified) {
            out.verified = false;
            out.failed_stage = stage;
        }
    }
    return out;
}

}  // namespace ergo
