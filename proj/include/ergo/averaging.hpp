#pragma once

// Streaming ergodic averages a_n(f) = (1/n) sum_{k<n} T^k f and their weighted
// form a_n(beta, f) = (1/n) sum_{k<n} beta_k T^k f, recorded at checkpoints.
// One operator application per step; powers are never recomputed.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ergo/measure_space.hpp"
#include "ergo/operators.hpp"
#include "ergo/weights.hpp"

namespace ergo {

/// Strictly increasing positive integers n at which averages are recorded.
class Checkpoints {
public:
    explicit Checkpoints(std::vector<std::size_t> ns);

    /// 1, 2, 4, ... up to and including the largest power of two <= max_n,
    /// with max_n appended if it is not a power of two.
    static Checkpoints geometric(std::size_t max_n);

    [[nodiscard]] std::span<const std::size_t> values() const noexcept { return ns_; }
    [[nodiscard]] std::size_t size() const noexcept { return ns_.size(); }
    [[nodiscard]] std::size_t max() const noexcept { return ns_.back(); }
    [[nodiscard]] std::size_t operator[](std::size_t i) const { return ns_[i]; }

private:
    std::vector<std::size_t> ns_;
};

struct AveragingOptions {
    /// Atoms whose values are recorded at every checkpoint.
    std::vector<std::size_t> probes;
    /// Keep the whole average function at each checkpoint. Probe-only runs
    /// (false) scale to large spaces but cannot be majorization-checked.
    bool retain_full = true;
    /// Evaluate the majorization flag at each checkpoint (full mode only).
    bool check_majorization = true;
    std::size_t iteration_budget = 100'000'000;
};

struct CheckpointRecord {
    std::size_t n = 0;
    std::optional<MeasurableFunction> average;
    std::vector<Complex> probe_values;  ///< parallel to AveragingReport::probes
    double l1_norm = 0.0;
    double linf_norm = 0.0;
    /// a_n << f (weighted: a_n / M << f); absent when not evaluated.
    std::optional<bool> majorized;
};

struct AveragingReport {
    std::vector<std::size_t> probes;
    std::vector<CheckpointRecord> records;
    bool full = true;
    bool weighted = false;
    /// M = max{1, sup |beta_k|}; 1 for unweighted runs.
    double normalizer = 1.0;
    /// Per probe: oscillation over all recorded checkpoints.
    std::vector<double> probe_oscillation;

    [[nodiscard]] std::size_t probe_slot(std::size_t atom) const;
};

[[nodiscard]] AveragingReport cesaro(const Operator& op, const MeasurableFunction& f,
                                     const Checkpoints& cps, const AveragingOptions& opts = {});

[[nodiscard]] AveragingReport weighted(const Operator& op, const MeasurableFunction& f,
                                       const WeightSequence& beta, const Checkpoints& cps,
                                       const AveragingOptions& opts = {});

/// Inclusive range of checkpoint n values.
struct CheckpointWindow {
    std::size_t first_n = 0;
    std::size_t last_n = static_cast<std::size_t>(-1);
};

/// max - min of the recorded values at `probe` over the window; for complex
/// values the larger of the real-part and imaginary-part oscillations.
/// Throws InputError on an empty window or an unrecorded probe.
[[nodiscard]] double oscillation(const AveragingReport& report, std::size_t probe,
                                 CheckpointWindow window = {});

/// Per checkpoint: a_n << f, or (1/M) a_n << f for weighted runs.
/// Throws CapabilityError for probe-only reports.
[[nodiscard]] std::vector<bool> majorization_trace(const AveragingReport& report,
                                                   const MeasurableFunction& f);

}  // namespace ergo
