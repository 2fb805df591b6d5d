#pragma once

// Concrete Dunford-Schwartz operator representations on atomic spaces.
//
// A KernelOperator acts by (Tf)_i = sum_j K[i][j] f_j. A CompositionOperator
// acts by (Tf)_i = m_i f_{sigma(i)}; it covers measure-preserving
// transformations and the shift-with-sign operator used by the divergence
// construction, at sizes where a dense kernel would not fit.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "ergo/measure_space.hpp"

namespace ergo {

class KernelOperator {
public:
    /// `matrix` is row-major, size n*n for an n-atom space.
    KernelOperator(SpacePtr space, std::vector<Complex> matrix);
    KernelOperator(SpacePtr space, const std::vector<std::vector<Complex>>& rows);

    static KernelOperator identity(SpacePtr space);

    [[nodiscard]] std::size_t dim() const noexcept { return space_->size(); }
    [[nodiscard]] const Complex& at(std::size_t i, std::size_t j) const { return matrix_[i * dim() + j]; }
    [[nodiscard]] std::span<const Complex> row(std::size_t i) const {
        return std::span<const Complex>(matrix_).subspan(i * dim(), dim());
    }
    [[nodiscard]] std::span<const Complex> matrix() const noexcept { return matrix_; }
    [[nodiscard]] const AtomicMeasureSpace& space() const noexcept { return *space_; }
    [[nodiscard]] const SpacePtr& space_ptr() const noexcept { return space_; }

private:
    SpacePtr space_;
    std::vector<Complex> matrix_;
};

class CompositionOperator {
public:
    /// Throws InputError if some |m_i| > 1, or if `measure_preserving` is
    /// declared and sigma is not a weight-preserving bijection.
    CompositionOperator(SpacePtr space, std::vector<std::size_t> point_map,
                        std::vector<Complex> multiplier, bool measure_preserving = false);

    /// (Tf)_i = f_{sigma(i)} for a measure-preserving bijection sigma.
    static CompositionOperator from_map(SpacePtr space, std::vector<std::size_t> point_map);
    /// sigma(i) = (i + offset) mod n on a space of n equal atoms.
    static CompositionOperator cyclic_shift(SpacePtr space, std::size_t offset = 1);

    [[nodiscard]] std::size_t dim() const noexcept { return space_->size(); }
    [[nodiscard]] std::span<const std::size_t> point_map() const noexcept { return map_; }
    [[nodiscard]] std::span<const Complex> multiplier() const noexcept { return mult_; }
    [[nodiscard]] bool measure_preserving() const noexcept { return measure_preserving_; }
    [[nodiscard]] const AtomicMeasureSpace& space() const noexcept { return *space_; }
    [[nodiscard]] const SpacePtr& space_ptr() const noexcept { return space_; }

    /// Dense kernel with K[i][sigma(i)] = m_i.
    [[nodiscard]] KernelOperator to_kernel() const;

private:
    SpacePtr space_;
    std::vector<std::size_t> map_;
    std::vector<Complex> mult_;
    bool measure_preserving_;
};

using Operator = std::variant<KernelOperator, CompositionOperator>;

[[nodiscard]] const AtomicMeasureSpace& operator_space(const Operator& op) noexcept;
[[nodiscard]] const SpacePtr& operator_space_ptr(const Operator& op) noexcept;

struct DSReport {
    bool l1_ok = false;
    bool linf_ok = false;
    double worst_column_sum = 0.0;  ///< max_j sum_i w_i |K_ij| / w_j
    double worst_row_sum = 0.0;     ///< max_i sum_j |K_ij|

    [[nodiscard]] bool passes() const noexcept { return l1_ok && linf_ok; }
};

inline constexpr double kCertificateTolerance = 1e-12;

[[nodiscard]] MeasurableFunction apply(const Operator& op, const MeasurableFunction& f);
[[nodiscard]] MeasurableFunction apply(const KernelOperator& op, const MeasurableFunction& f);
[[nodiscard]] MeasurableFunction apply(const CompositionOperator& op, const MeasurableFunction& f);

/// out = T(in) on raw value arrays; `in` and `out` must not alias.
void apply_into(const Operator& op, std::span<const Complex> in, std::span<Complex> out);

/// Exact atomic conditions for ||T||_{1->1} <= 1 and ||T||_{inf->inf} <= 1.
[[nodiscard]] DSReport ds_certificate(const KernelOperator& op, const AtomicMeasureSpace& sp);
[[nodiscard]] DSReport ds_certificate(const KernelOperator& op);
[[nodiscard]] DSReport ds_certificate(const CompositionOperator& op);
[[nodiscard]] DSReport ds_certificate(const Operator& op);

/// Entrywise |K|, the linear modulus of a kernel operator.
[[nodiscard]] KernelOperator linear_modulus(const KernelOperator& op);

/// K*[j][i] = conj(K[i][j]) w_i / w_j, adjoint for <u, v> = sum_i w_i u_i conj(v_i).
[[nodiscard]] KernelOperator adjoint(const KernelOperator& op);

/// Weighted pairing <u, v> = sum_i w_i u_i conj(v_i).
[[nodiscard]] Complex pairing(const MeasurableFunction& u, const MeasurableFunction& v);

struct DominationResult {
    bool holds = true;
    double min_slack = 0.0;  ///< min over k, i of (|T|^k |f|)_i - |T^k f|_i
    std::size_t worst_power = 0;
    std::size_t worst_atom = 0;
};

/// Checks |T^k f| <= |T|^k |f| + 1e-9 componentwise for k = 1..kmax.
[[nodiscard]] DominationResult modulus_domination_check(const KernelOperator& op,
                                                        const MeasurableFunction& f,
                                                        std::size_t kmax);

/// |K*| == (|K|)* entrywise within 1e-12.
[[nodiscard]] bool adjoint_modulus_commutation(const KernelOperator& op);

/// Sign function of the divergence construction, evaluated on the unit cell
/// [cell, cell + 1): -1 on the last cell of every block [n_k, n_{k+1}), +1
/// elsewhere (n_0 = 0), and +1 past the last breakpoint.
[[nodiscard]] int counterexample_sign(std::span<const std::size_t> breakpoints, std::size_t cell);

/// T f(t) = phi(t) f(t + 1) on (0, window) split into `grid` atoms per unit
/// cell of weight 1/grid. Atoms whose shift leaves the window get multiplier 0.
[[nodiscard]] CompositionOperator build_counterexample_operator(std::span<const std::size_t> breakpoints,
                                                                std::size_t grid, std::size_t window);

}  // namespace ergo
