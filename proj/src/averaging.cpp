#include "ergo/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergo/errors.hpp"

namespace ergo {

// ---------------------------------------------------------------------------
// Checkpoints

Checkpoints::Checkpoints(std::vector<std::size_t> ns) : ns_(std::move(ns)) {
    if (ns_.empty()) throw InputError("at least one checkpoint is required");
    if (ns_.front() < 1) throw InputError("checkpoints must be >= 1");
    for (std::size_t i = 1; i < ns_.size(); ++i) {
        if (ns_[i] <= ns_[i - 1]) throw InputError("checkpoints must be strictly increasing");
    }
}

Checkpoints Checkpoints::geometric(std::size_t max_n) {
    if (max_n < 1) throw InputError("geometric checkpoints need max_n >= 1");
    std::vector<std::size_t> ns;
    for (std::size_t n = 1; n <= max_n; n *= 2) {
        ns.push_back(n);
        if (n > max_n / 2) break;
    }
    if (ns.back() != max_n) ns.push_back(max_n);
    return Checkpoints(std::move(ns));
}

std::size_t AveragingReport::probe_slot(std::size_t atom) const {
    const auto it = std::find(probes.begin(), probes.end(), atom);
    if (it == probes.end()) {
        std::ostringstream msg;
        msg << "atom " << atom << " was not recorded as a probe";
        throw InputError(msg.str());
    }
    return static_cast<std::size_t>(it - probes.begin());
}

// ---------------------------------------------------------------------------
// streaming engine

namespace {

double complex_oscillation(std::span<const Complex> values) {
    if (values.empty()) return 0.0;
    double re_lo = values[0].real(), re_hi = re_lo;
    double im_lo = values[0].imag(), im_hi = im_lo;
    for (const auto& v : values) {
        re_lo = std::min(re_lo, v.real());
        re_hi = std::max(re_hi, v.real());
        im_lo = std::min(im_lo, v.imag());
        im_hi = std::max(im_hi, v.imag());
    }
    return std::max(re_hi - re_lo, im_hi - im_lo);
}

AveragingReport run_stream(const Operator& op, const MeasurableFunction& f, const WeightSequence* beta,
                           const Checkpoints& cps, const AveragingOptions& opts) {
    const auto& space = operator_space(op);
    if (operator_space_ptr(op) != f.space_ptr() && !space.same_atoms(f.space())) {
        throw InputError("operator and function are bound to different spaces");
    }
    if (cps.max() > opts.iteration_budget) {
        std::ostringstream msg;
        msg << "largest checkpoint " << cps.max() << " exceeds the iteration budget "
            << opts.iteration_budget;
        throw BudgetError(msg.str());
    }
    for (auto p : opts.probes) {
        if (p >= f.size()) throw InputError("probe atom index out of range");
    }
    if (beta) {
        if (const auto len = beta->length(); len && *len < cps.max()) {
            throw RangeError("explicit weight list is shorter than the largest checkpoint");
        }
    }

    AveragingReport report;
    report.probes = opts.probes;
    report.full = opts.retain_full;
    report.weighted = beta != nullptr;
    report.normalizer = beta ? beta->normalizer() : 1.0;
    report.records.reserve(cps.size());

    const auto n_atoms = f.size();
    const auto weights = space.weights();
    std::vector<Complex> power(f.values().begin(), f.values().end());
    std::vector<Complex> scratch(n_atoms);
    std::vector<Complex> sum(n_atoms);
    std::vector<Complex> average(n_atoms);
    std::optional<WeightStream> stream;
    if (beta) stream.emplace(*beta);

    std::optional<Rearrangement> source_rearrangement;
    const bool want_majorization = opts.retain_full && opts.check_majorization;
    if (want_majorization) source_rearrangement = rearrangement(f);

    std::size_t next_cp = 0;
    const std::size_t last = cps.max();
    for (std::size_t k = 0; k < last; ++k) {
        if (stream) {
            const Complex b = stream->next();
            for (std::size_t i = 0; i < n_atoms; ++i) sum[i] += b * power[i];
        } else {
            for (std::size_t i = 0; i < n_atoms; ++i) sum[i] += power[i];
        }
        const std::size_t n = k + 1;
        if (n == cps[next_cp]) {
            const double inv = 1.0 / static_cast<double>(n);
            CheckpointRecord rec;
            rec.n = n;
            CompensatedSum l1;
            for (std::size_t i = 0; i < n_atoms; ++i) {
                average[i] = sum[i] * inv;
                const double m = std::abs(average[i]);
                l1.add(weights[i] * m);
                rec.linf_norm = std::max(rec.linf_norm, m);
            }
            rec.l1_norm = l1.value();
            rec.probe_values.reserve(opts.probes.size());
            for (auto p : opts.probes) rec.probe_values.push_back(average[p]);
            if (opts.retain_full) {
                rec.average.emplace(f.space_ptr(), average);
                if (want_majorization) {
                    const auto& a = *rec.average;
                    const auto r = report.normalizer == 1.0 ? rearrangement(a)
                                                            : rearrangement(a.scaled(1.0 / report.normalizer));
                    rec.majorized = majorizes(*source_rearrangement, r).holds;
                }
            }
            report.records.push_back(std::move(rec));
            ++next_cp;
        }
        if (n < last) {
            apply_into(op, power, scratch);
            power.swap(scratch);
        }
    }

    report.probe_oscillation.resize(opts.probes.size());
    std::vector<Complex> trace(report.records.size());
    for (std::size_t p = 0; p < opts.probes.size(); ++p) {
        for (std::size_t r = 0; r < report.records.size(); ++r) trace[r] = report.records[r].probe_values[p];
        report.probe_oscillation[p] = complex_oscillation(trace);
    }
    return report;
}

}  // namespace

AveragingReport cesaro(const Operator& op, const MeasurableFunction& f, const Checkpoints& cps,
                       const AveragingOptions& opts) {
    return run_stream(op, f, nullptr, cps, opts);
}

AveragingReport weighted(const Operator& op, const MeasurableFunction& f, const WeightSequence& beta,
                         const Checkpoints& cps, const AveragingOptions& opts) {
    return run_stream(op, f, &beta, cps, opts);
}

double oscillation(const AveragingReport& report, std::size_t probe, CheckpointWindow window) {
    std::vector<Complex> values;
    const bool from_full = report.full &&
                           std::find(report.probes.begin(), report.probes.end(), probe) == report.probes.end();
    const std::size_t slot = from_full ? 0 : report.probe_slot(probe);
    for (const auto& rec : report.records) {
        if (rec.n < window.first_n || rec.n > window.last_n) continue;
        if (from_full) {
            if (probe >= rec.average->size()) throw InputError("probe atom index out of range");
            values.push_back((*rec.average)[probe]);
        } else {
            values.push_back(rec.probe_values[slot]);
        }
    }
    if (values.empty()) throw InputError("oscillation window contains no checkpoints");
    return complex_oscillation(values);
}

std::vector<bool> majorization_trace(const AveragingReport& report, const MeasurableFunction& f) {
    if (!report.full) throw CapabilityError("majorization trace needs a report with full averages");
    const auto source = rearrangement(f);
    std::vector<bool> out;
    out.reserve(report.records.size());
    for (const auto& rec : report.records) {
        const auto& a = *rec.average;
        if (!same_space(a, f)) throw InputError("report and function live on different spaces");
        const auto r = report.normalizer == 1.0 ? rearrangement(a) : rearrangement(a.scaled(1.0 / report.normalizer));
        out.push_back(majorizes(source, r).holds);
    }
    return out;
}

}  // namespace ergo
