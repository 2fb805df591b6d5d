#pragma once

// Bounded weight sequences beta_k for weighted ergodic averages, trigonometric
// polynomials P(k) = sum_j z_j lambda_j^k, and the Cesaro-mean l1 deviation
// (1/n) sum_{k<n} |beta_k - P(k)| that defines Besicovitch sequences.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ergo/numeric.hpp"

namespace ergo {

/// Rational frequency num/den; lambda = e^{2 pi i num/den}.
struct RationalFrequency {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

struct TrigTerm {
    Complex z;
    Complex lambda;
    /// When set, lambda^k is evaluated by exact residue reduction instead of
    /// through the floating-point angle.
    std::optional<RationalFrequency> frequency;
};

class TrigPolynomial {
public:
    explicit TrigPolynomial(std::vector<TrigTerm> terms);
    TrigPolynomial(std::initializer_list<std::pair<Complex, Complex>> terms);

    [[nodiscard]] Complex operator()(std::uint64_t k) const;
    [[nodiscard]] std::span<const TrigTerm> terms() const noexcept { return terms_; }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
    /// sum_j |z_j|, an upper bound for sup_k |P(k)|.
    [[nodiscard]] double coefficient_bound() const;

private:
    std::vector<TrigTerm> terms_;
};

enum class WeightKind { Constant, Periodic, TrigPoly, LambdaPower, Explicit };

class WeightSequence {
public:
    static WeightSequence constant(Complex c);
    static WeightSequence periodic(std::vector<Complex> values);
    static WeightSequence trig_poly(TrigPolynomial p);
    static WeightSequence lambda_power(Complex lambda);
    /// Finite list; `declared_bound` defaults to max |beta_k| when absent.
    static WeightSequence explicit_list(std::vector<Complex> values,
                                        std::optional<double> declared_bound = std::nullopt);

    [[nodiscard]] WeightKind kind() const noexcept { return kind_; }
    /// Declared C with |beta_k| <= C.
    [[nodiscard]] double bound() const noexcept { return bound_; }
    /// M = max{1, C}, the normalizer for majorization of weighted averages.
    [[nodiscard]] double normalizer() const noexcept { return bound_ > 1.0 ? bound_ : 1.0; }
    /// Number of defined terms; nullopt for infinite sequences.
    [[nodiscard]] std::optional<std::size_t> length() const noexcept;

    [[nodiscard]] Complex constant_value() const noexcept { return constant_; }
    [[nodiscard]] std::span<const Complex> values() const noexcept { return values_; }
    [[nodiscard]] const std::optional<TrigPolynomial>& polynomial() const noexcept { return poly_; }
    [[nodiscard]] Complex lambda() const noexcept { return constant_; }

private:
    WeightSequence() = default;

    WeightKind kind_ = WeightKind::Constant;
    Complex constant_{};  // constant value, or lambda for LambdaPower
    std::vector<Complex> values_;
    std::optional<TrigPolynomial> poly_;
    double bound_ = 0.0;
};

/// Sequential generator of beta_0, beta_1, ... For lambda powers the running
/// product is renormalized to unit modulus every kRenormalizeEvery steps.
class WeightStream {
public:
    static constexpr std::uint64_t kRenormalizeEvery = 1024;

    /// `w` must outlive the stream.
    explicit WeightStream(const WeightSequence& w);

    /// Returns beta_k for the current k and advances. Throws RangeError past an explicit list.
    Complex next();
    [[nodiscard]] std::uint64_t index() const noexcept { return k_; }

private:
    const WeightSequence* w_;
    std::uint64_t k_ = 0;
    Complex power_{1.0, 0.0};
};

/// beta_k. Lambda powers are produced by the same renormalized running product
/// as WeightStream, so this is O(k) for that kind.
[[nodiscard]] Complex eval_weight(const WeightSequence& w, std::uint64_t k);

/// (1/n) sum_{k<n} |beta_k - P(k)|.
[[nodiscard]] double besicovitch_deviation(const WeightSequence& w, const TrigPolynomial& p,
                                           std::uint64_t n);

struct LimsupEstimate {
    std::vector<std::uint64_t> sample_n;
    std::vector<double> deviations;
    double estimate = 0.0;  ///< max of the deviations over the tail half of the samples
};

/// Samples the deviation on a geometric grid n = 1, 2, 4, ... <= n_max.
[[nodiscard]] LimsupEstimate besicovitch_limsup_estimate(const WeightSequence& w,
                                                         const TrigPolynomial& p,
                                                         std::uint64_t n_max);

/// Exact interpolant of a p-periodic sequence: lambda_j = e^{2 pi i j/p},
/// z_j = (1/p) sum_k beta_k e^{-2 pi i jk/p}, j = 0..p-1.
[[nodiscard]] TrigPolynomial dft_interpolant(std::span<const Complex> periodic_values);

struct BoundCheck {
    bool ok = true;
    std::optional<std::uint64_t> first_violation;
    double max_modulus = 0.0;
};

/// |beta_k| <= C + 1e-12 for k < n (clamped to the list length for explicit lists).
[[nodiscard]] BoundCheck validate_bound(const WeightSequence& w, std::uint64_t n);

}  // namespace ergo
