#pragma once

// Atomic measure spaces, measurable functions and the rearrangement-invariant
// machinery built on top of them: non-increasing rearrangements,
// Hardy-Littlewood majorization and the norms of L1, Linf, L1+Linf, L1capLinf,
// Orlicz (Luxemburg) and Lorentz spaces.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergo/numeric.hpp"

namespace ergo {

/// Finite collection of weighted atoms. A `truncated` space is a finite window
/// of a nominally infinite measure space; statements about behaviour "at
/// infinity" are then only certificates relative to the window.
class AtomicMeasureSpace {
public:
    explicit AtomicMeasureSpace(std::vector<double> weights, bool truncated = false);

    static std::shared_ptr<const AtomicMeasureSpace> make(std::vector<double> weights,
                                                          bool truncated = false);
    static std::shared_ptr<const AtomicMeasureSpace> uniform(std::size_t atoms, double weight = 1.0,
                                                             bool truncated = false);

    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
    [[nodiscard]] double weight(std::size_t i) const { return weights_.at(i); }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] bool truncated() const noexcept { return truncated_; }
    [[nodiscard]] double total_measure() const noexcept { return total_; }

    /// Same atoms with the same weights; the truncation flag is ignored.
    [[nodiscard]] bool same_atoms(const AtomicMeasureSpace& other) const noexcept;

private:
    std::vector<double> weights_;
    bool truncated_;
    double total_;
};

using SpacePtr = std::shared_ptr<const AtomicMeasureSpace>;

/// Complex-valued function on the atoms of a space.
class MeasurableFunction {
public:
    MeasurableFunction(SpacePtr space, std::vector<Complex> values);
    MeasurableFunction(SpacePtr space, const std::vector<double>& real_values);

    static MeasurableFunction zero(SpacePtr space);
    static MeasurableFunction constant(SpacePtr space, Complex c);
    static MeasurableFunction indicator(SpacePtr space, std::span<const std::size_t> atoms);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] const Complex& operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::span<const Complex> values() const noexcept { return values_; }
    [[nodiscard]] const AtomicMeasureSpace& space() const noexcept { return *space_; }
    [[nodiscard]] const SpacePtr& space_ptr() const noexcept { return space_; }

    [[nodiscard]] MeasurableFunction scaled(Complex c) const;

private:
    SpacePtr space_;
    std::vector<Complex> values_;
};

/// Functions live on the same atoms (pointer identity or equal weights).
[[nodiscard]] bool same_space(const MeasurableFunction& a, const MeasurableFunction& b) noexcept;

/// Non-increasing step function on (0, inf): value `plateau(i)` on
/// [breakpoint(i), breakpoint(i+1)) and 0 past the last breakpoint.
class Rearrangement {
public:
    Rearrangement() : breakpoints_{0.0} {}

    /// Builds from explicit steps; validates monotonicity and merges equal plateaus.
    Rearrangement(std::vector<double> breakpoints, std::vector<double> plateau_values);

    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] std::span<const double> plateau_values() const noexcept { return values_; }
    [[nodiscard]] std::size_t plateau_count() const noexcept { return values_.size(); }
    /// t_m, the measure of the support of the source function.
    [[nodiscard]] double support_measure() const noexcept { return breakpoints_.back(); }

    /// mu_t; right-continuous, 0 for t >= t_m.
    [[nodiscard]] double value_at(double t) const;

private:
    friend Rearrangement rearrangement(const MeasurableFunction& f);
    struct Unchecked {};
    Rearrangement(Unchecked, std::vector<double> breakpoints, std::vector<double> plateau_values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(plateau_values)) {}

    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

/// Orlicz function Phi: [0, inf) -> [0, inf), convex, Phi(0) = 0.
struct OrliczFunction {
    std::function<double(double)> phi;
    std::string name;
    /// Phi is declared strictly positive on (positive_from, inf).
    double positive_from = 0.0;

    /// Phi(u) = u^p, p >= 1.
    static OrliczFunction power(double p);

    /// Spot checks of Phi(0) = 0, positivity and midpoint convexity on a sample grid.
    [[nodiscard]] bool validate() const;
};

/// Increasing concave piecewise-linear phi with phi(0) = 0. Segment i has slope
/// `slopes[i]` on [knots[i], knots[i+1]); the last slope extends to infinity.
class LorentzWeight {
public:
    LorentzWeight(std::vector<double> knots, std::vector<double> slopes);

    static LorentzWeight identity();                 ///< phi(t) = t
    static LorentzWeight capped(double cap);         ///< phi(t) = min(t, cap)

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] std::span<const double> knots() const noexcept { return knots_; }
    [[nodiscard]] std::span<const double> slopes() const noexcept { return slopes_; }

private:
    std::vector<double> knots_;
    std::vector<double> slopes_;
};

enum class NormKind { L1, Linf, L1plusLinf, L1capLinf };

struct MajorizationResult {
    bool holds = true;
    /// On failure: the breakpoint s and both integrals at s.
    double at = 0.0;
    double dominated_integral = 0.0;   ///< int_0^s mu_t(g)
    double dominating_integral = 0.0;  ///< int_0^s mu_t(f)

    explicit operator bool() const noexcept { return holds; }
};

struct TailResult {
    double value = 0.0;
    bool truncation_warning = false;
};

inline constexpr double kMajorizationTolerance = 1e-9;

[[nodiscard]] Rearrangement rearrangement(const MeasurableFunction& f);

/// int_0^s mu_t dt in closed form. Throws DomainError for s <= 0.
[[nodiscard]] double hl_integral(const Rearrangement& r, double s);

/// g << f (g is majorized by f): int_0^s mu(g) <= int_0^s mu(f) + tol for all s.
[[nodiscard]] MajorizationResult majorizes(const MeasurableFunction& f, const MeasurableFunction& g,
                                           double tol = kMajorizationTolerance);
[[nodiscard]] MajorizationResult majorizes(const Rearrangement& f, const Rearrangement& g,
                                           double tol = kMajorizationTolerance);

[[nodiscard]] double norm(const MeasurableFunction& f, NormKind which);

/// inf{a > 0 : sum_i w_i Phi(|v_i| / a) <= 1}, to bracket width `tol`.
[[nodiscard]] double luxemburg_norm(const MeasurableFunction& f, const OrliczFunction& phi,
                                    double tol = 1e-12);

/// int_0^inf mu_t(f) dphi(t), exact for the piecewise-linear phi.
[[nodiscard]] double lorentz_norm(const MeasurableFunction& f, const LorentzWeight& w);

/// sup_{t >= t0} mu_t(f) = mu_{t0}(f).
[[nodiscard]] TailResult r_mu_tail(const MeasurableFunction& f, double t0);

/// Split f = g + h with g = f on {|f| > eps} and h = f elsewhere.
[[nodiscard]] std::pair<MeasurableFunction, MeasurableFunction> decompose(const MeasurableFunction& f,
                                                                          double eps);

/// Measure of {|f| > lambda}, summed in atom order.
[[nodiscard]] double distribution(const MeasurableFunction& f, double lambda);

/// CSV with columns t_left,t_right,value.
void write_rearrangement_csv(std::ostream& out, const Rearrangement& r);

}  // namespace ergo
