#pragma once

// Divergent Cesaro averages for a Dunford-Schwartz operator on (0, inf).
//
// Given a rearrangement mu_t(f) >= 1, the shift-with-sign operator
// T f(t) = phi(t) f(t + 1) has averages
//
//   a_n(mu_t(f)) = (1/n) (mu_t + sum_{k=1}^{n-1} phi(t) ... phi(t+k-1) mu_{t+k}),
//
// and phi flips sign on the last unit cell of each block [n_k, n_{k+1}). The
// breakpoints are picked greedily so that a_{n_1} >= 1 and the subsequent
// averages alternate below -1/2 and above +1/2 for every t in (eps, 1).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ergo/averaging.hpp"
#include "ergo/measure_space.hpp"

namespace ergo {

/// UnitCell: the rearrangement is constant on the window, so one grid point
/// represents every t in (eps, 1). Full: every grid point in (eps, 1).
enum class GridMode { UnitCell, Full };

struct StageRecord {
    std::size_t n = 0;
    /// +1 for a_n >= 1 (first stage) or a_n > 1/2; -1 for a_n < -1/2.
    int direction = 1;
    double threshold = 0.0;
    /// Worst value over the evaluated grid points (min for +1, max for -1).
    double extremal_value = 0.0;
    /// Signed clearance of the extremal value past the threshold.
    double margin = 0.0;
};

struct CounterexampleCertificate {
    double eps = 0.0;
    std::vector<std::size_t> breakpoints;
    std::size_t grid = 1;    ///< atoms per unit cell
    std::size_t window = 0;  ///< truncation length N, in unit cells
    double margin = 0.0;
    GridMode mode = GridMode::UnitCell;
    std::vector<StageRecord> stages;
};

struct CounterexampleOptions {
    std::size_t grid = 1;
    /// Truncation length; defaults to floor of the rearrangement's support.
    std::optional<std::size_t> window;
    std::size_t budget = 100'000'000;
};

/// mu sampled at atom midpoints (i + 1/2)/grid for i < window * grid.
[[nodiscard]] std::vector<double> sample_rearrangement(const Rearrangement& r, std::size_t grid,
                                                       std::size_t window);

/// Atoms of cell 0 whose midpoint lies in (eps, 1).
[[nodiscard]] std::vector<std::size_t> probe_atoms(double eps, std::size_t grid);

/// a_n at atom `probe` (in cell 0) from the sign-product formula, with
/// sign of term k equal to (-1)^{#{j : n_j <= k}}.
[[nodiscard]] double sign_product_average(std::span<const std::size_t> breakpoints,
                                          std::span<const double> samples, std::size_t grid,
                                          std::size_t probe, std::size_t n);

/// Greedy-minimal breakpoints with n_1 = 1. Throws InputError for invalid
/// arguments or mu < 1 on the window, WindowError when a breakpoint would pass
/// the window, BudgetError when the search exceeds `opts.budget`.
[[nodiscard]] CounterexampleCertificate construct_breakpoints(const Rearrangement& rearr, double eps,
                                                              std::size_t stages, double margin = 0.0,
                                                              const CounterexampleOptions& opts = {});

struct CertificateVerification {
    bool verified = false;
    std::optional<std::size_t> failed_stage;  ///< 1-based
    std::vector<double> stage_margins;        ///< min clearance per stage over all grid points
    double min_margin = 0.0;
    /// Largest |pipeline - sign-product| over grid points and checkpoints.
    double max_discrepancy = 0.0;
    /// Probe-only averaging report of the operator pipeline.
    AveragingReport trace;
};

/// Rebuilds T from the breakpoints, streams Cesaro averages of the sampled
/// rearrangement through it and checks every inequality at every grid point
/// in (eps, 1). Throws ConsistencyError if the pipeline and the sign-product
/// formula disagree beyond 1e-9.
[[nodiscard]] CertificateVerification verify_certificate(const CounterexampleCertificate& cert,
                                                         const Rearrangement& rearr);

}  // namespace ergo
