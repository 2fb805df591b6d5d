#pragma once

// Return-times averages (1/n) sum_{k<n} f(tau^k w) g(phi^k y) over two
// measure-preserving systems, and Wiener-Wintner sweeps
// (1/n) sum_{k<n} lambda^k f(tau^k w) over a uniform grid of lambda on the
// unit circle, with a closed-form oracle for rational rotations.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergo/averaging.hpp"
#include "ergo/measure_space.hpp"

namespace ergo {

/// Atomic space with a weight-preserving bijection tau.
class PointSystem {
public:
    PointSystem(SpacePtr space, std::vector<std::size_t> map, std::string label = {});

    /// tau(i) = (i + step) mod atoms on `atoms` unit atoms: rotation by step/atoms.
    static PointSystem rotation(std::size_t atoms, std::size_t step);

    [[nodiscard]] std::size_t size() const noexcept { return map_.size(); }
    [[nodiscard]] std::size_t operator()(std::size_t i) const { return map_[i]; }
    [[nodiscard]] std::span<const std::size_t> map() const noexcept { return map_; }
    [[nodiscard]] const AtomicMeasureSpace& space() const noexcept { return *space_; }
    [[nodiscard]] const SpacePtr& space_ptr() const noexcept { return space_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// (Tf)(i) = f(tau(i)); T^k f(w) = f(tau^k w).
    [[nodiscard]] CompositionOperator koopman() const;

private:
    SpacePtr space_;
    std::vector<std::size_t> map_;
    std::string label_;
};

/// f(w_j) = e^{2 pi i frequency j / atoms}.
[[nodiscard]] MeasurableFunction character(const SpacePtr& space, std::int64_t frequency = 1);

struct ProductAverageReport {
    std::vector<std::pair<std::size_t, std::size_t>> probes;
    std::vector<std::size_t> checkpoints;
    /// values[c][p]: average at checkpoint c for probe pair p.
    std::vector<std::vector<Complex>> values;
};

[[nodiscard]] ProductAverageReport product_average(const PointSystem& sys1, const MeasurableFunction& f,
                                                   const PointSystem& sys2, const MeasurableFunction& g,
                                                   std::span<const std::pair<std::size_t, std::size_t>> probes,
                                                   const Checkpoints& cps);

struct SweepOptions {
    std::size_t iteration_budget = 100'000'000;
    /// Worker threads; 0 reads ERGO_THREADS from the environment (default 1).
    std::size_t threads = 0;
};

struct SweepResult {
    std::vector<Complex> lambdas;  ///< lambda_j = e^{2 pi i j / G}
    std::vector<std::size_t> probes;
    std::vector<std::size_t> checkpoints;
    /// values[j][p][c] for lambda j, probe p, checkpoint c.
    std::vector<std::vector<std::vector<Complex>>> values;
    /// oscillation[j][p] over all checkpoints.
    std::vector<std::vector<double>> oscillation;

    [[nodiscard]] const Complex& at(std::size_t lambda, std::size_t probe, std::size_t cp) const {
        return values[lambda][probe][cp];
    }
};

[[nodiscard]] SweepResult wiener_wintner_sweep(const PointSystem& sys, const MeasurableFunction& f,
                                               std::span<const std::size_t> probes,
                                               std::size_t lambda_grid_size, const Checkpoints& cps,
                                               const SweepOptions& opts = {});

/// Resonance threshold on |1 - q|.
inline constexpr double kResonanceThreshold = 1e-6;

/// (1/n) sum_{k<n} lambda^k e^{2 pi i (omega + k rho)} in closed form:
/// e^{2 pi i omega} (1 - q^n) / (n (1 - q)) with q = lambda e^{2 pi i rho},
/// or e^{2 pi i omega} when q = 1.
[[nodiscard]] Complex rotation_closed_form(double rho, Complex lambda, double omega_phase, std::size_t n);

/// Closed form against the rational rotation a/N; q = lambda e^{2 pi i a/N}.
[[nodiscard]] Complex rotation_closed_form(std::int64_t a, std::int64_t atoms, Complex lambda,
                                           double omega_phase, std::size_t n);

/// |1 - lambda e^{2 pi i rho}| < kResonanceThreshold.
[[nodiscard]] bool is_resonant(double rho, Complex lambda);

}  // namespace ergo
