#include "ergo/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergo/errors.hpp"

namespace ergo {

namespace {

void require_same_space(const AtomicMeasureSpace& a, const SpacePtr& pa, const MeasurableFunction& f) {
    if (pa != f.space_ptr() && !a.same_atoms(f.space())) {
        throw InputError("operator and function are bound to different spaces");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// KernelOperator

KernelOperator::KernelOperator(SpacePtr space, std::vector<Complex> matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
    if (!space_) throw InputError("kernel operator needs a space");
    const auto n = space_->size();
    if (matrix_.size() != n * n) {
        std::ostringstream msg;
        msg << "kernel has " << matrix_.size() << " entries, expected " << n << "x" << n;
        throw InputError(msg.str());
    }
    for (const auto& k : matrix_) {
        if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) {
            throw InputError("kernel entries must be finite");
        }
    }
}

KernelOperator::KernelOperator(SpacePtr space, const std::vector<std::vector<Complex>>& rows)
    : KernelOperator(space, [&] {
          const auto n = space ? space->size() : 0;
          if (rows.size() != n) throw InputError("kernel row count does not match the space");
          std::vector<Complex> flat;
          flat.reserve(n * n);
          for (const auto& r : rows) {
              if (r.size() != n) throw InputError("kernel row length does not match the space");
              flat.insert(flat.end(), r.begin(), r.end());
          }
          return flat;
      }()) {}

KernelOperator KernelOperator::identity(SpacePtr space) {
    const auto n = space->size();
    std::vector<Complex> m(n * n);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
    return {std::move(space), std::move(m)};
}

// ---------------------------------------------------------------------------
// CompositionOperator

CompositionOperator::CompositionOperator(SpacePtr space, std::vector<std::size_t> point_map,
                                         std::vector<Complex> multiplier, bool measure_preserving)
    : space_(std::move(space)),
      map_(std::move(point_map)),
      mult_(std::move(multiplier)),
      measure_preserving_(measure_preserving) {
    if (!space_) throw InputError("composition operator needs a space");
    const auto n = space_->size();
    if (map_.size() != n || mult_.size() != n) {
        throw InputError("composition map and multiplier must have one entry per atom");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (map_[i] >= n) throw InputError("composition map points outside the space");
        if (!(std::abs(mult_[i]) <= 1.0 + kCertificateTolerance)) {
            std::ostringstream msg;
            msg << "multiplier at atom " << i << " has modulus " << std::abs(mult_[i]) << " > 1";
            throw InputError(msg.str());
        }
    }
    if (measure_preserving_) {
        std::vector<bool> hit(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            if (hit[map_[i]]) throw InputError("declared measure-preserving map is not a bijection");
            hit[map_[i]] = true;
            const double wi = space_->weight(i);
            if (std::abs(space_->weight(map_[i]) - wi) > 1e-12 * wi) {
                throw InputError("declared measure-preserving map does not preserve atom weights");
            }
        }
    }
}

CompositionOperator CompositionOperator::from_map(SpacePtr space, std::vector<std::size_t> point_map) {
    const auto n = point_map.size();
    return {std::move(space), std::move(point_map), std::vector<Complex>(n, 1.0), true};
}

CompositionOperator CompositionOperator::cyclic_shift(SpacePtr space, std::size_t offset) {
    const auto n = space->size();
    std::vector<std::size_t> map(n);
    for (std::size_t i = 0; i < n; ++i) map[i] = (i + offset) % n;
    return from_map(std::move(space), std::move(map));
}

KernelOperator CompositionOperator::to_kernel() const {
    const auto n = dim();
    std::vector<Complex> m(n * n);
    for (std::size_t i = 0; i < n; ++i) m[i * n + map_[i]] += mult_[i];
    return {space_, std::move(m)};
}

const AtomicMeasureSpace& operator_space(const Operator& op) noexcept {
    return std::visit([](const auto& o) -> const AtomicMeasureSpace& { return o.space(); }, op);
}

const SpacePtr& operator_space_ptr(const Operator& op) noexcept {
    return std::visit([](const auto& o) -> const SpacePtr& { return o.space_ptr(); }, op);
}

// ---------------------------------------------------------------------------
// application

void apply_into(const Operator& op, std::span<const Complex> in, std::span<Complex> out) {
    if (const auto* k = std::get_if<KernelOperator>(&op)) {
        const auto n = k->dim();
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = k->row(i);
            Complex acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += row[j] * in[j];
            out[i] = acc;
        }
    } else {
        const auto& c = std::get<CompositionOperator>(op);
        const auto map = c.point_map();
        const auto mult = c.multiplier();
        for (std::size_t i = 0; i < map.size(); ++i) out[i] = mult[i] * in[map[i]];
    }
}

MeasurableFunction apply(const Operator& op, const MeasurableFunction& f) {
    require_same_space(operator_space(op), operator_space_ptr(op), f);
    std::vector<Complex> out(f.size());
    apply_into(op, f.values(), out);
    return {operator_space_ptr(op), std::move(out)};
}

MeasurableFunction apply(const KernelOperator& op, const MeasurableFunction& f) {
    return ergo::apply(Operator{op}, f);
}

MeasurableFunction apply(const CompositionOperator& op, const MeasurableFunction& f) {
    return ergo::apply(Operator{op}, f);
}

// ---------------------------------------------------------------------------
// certificates

DSReport ds_certificate(const KernelOperator& op, const AtomicMeasureSpace& sp) {
    const auto n = op.dim();
    if (sp.size() != n) throw InputError("kernel and space dimensions differ");
    const auto w = sp.weights();
    DSReport rep;
    for (std::size_t j = 0; j < n; ++j) {
        CompensatedSum col;
        for (std::size_t i = 0; i < n; ++i) col.add(w[i] * std::abs(op.at(i, j)));
        rep.worst_column_sum = std::max(rep.worst_column_sum, col.value() / w[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        CompensatedSum row;
        for (std::size_t j = 0; j < n; ++j) row.add(std::abs(op.at(i, j)));
        rep.worst_row_sum = std::max(rep.worst_row_sum, row.value());
    }
    rep.l1_ok = rep.worst_column_sum <= 1.0 + kCertificateTolerance;
    rep.linf_ok = rep.worst_row_sum <= 1.0 + kCertificateTolerance;
    return rep;
}

DSReport ds_certificate(const KernelOperator& op) { return ds_certificate(op, op.space()); }

DSReport ds_certificate(const CompositionOperator& op) {
    const auto n = op.dim();
    const auto w = op.space().weights();
    const auto map = op.point_map();
    const auto mult = op.multiplier();
    std::vector<double> column(n, 0.0);
    DSReport rep;
    for (std::size_t i = 0; i < n; ++i) {
        column[map[i]] += w[i] * std::abs(mult[i]);
        rep.worst_row_sum = std::max(rep.worst_row_sum, std::abs(mult[i]));
    }
    for (std::size_t j = 0; j < n; ++j) {
        rep.worst_column_sum = std::max(rep.worst_column_sum, column[j] / w[j]);
    }
    rep.l1_ok = rep.worst_column_sum <= 1.0 + kCertificateTolerance;
    rep.linf_ok = rep.worst_row_sum <= 1.0 + kCertificateTolerance;
    return rep;
}

DSReport ds_certificate(const Operator& op) {
    return std::visit([](const auto& o) { return ds_certificate(o); }, op);
}

KernelOperator linear_modulus(const KernelOperator& op) {
    std::vector<Complex> m(op.matrix().size());
    std::transform(op.matrix().begin(), op.matrix().end(), m.begin(),
                   [](const Complex& k) { return Complex(std::abs(k), 0.0); });
    return {op.space_ptr(), std::move(m)};
}

KernelOperator adjoint(const KernelOperator& op) {
    const auto n = op.dim();
    const auto w = op.space().weights();
    std::vector<Complex> m(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m[j * n + i] = std::conj(op.at(i, j)) * (w[i] / w[j]);
        }
    }
    return {op.space_ptr(), std::move(m)};
}

Complex pairing(const MeasurableFunction& u, const MeasurableFunction& v) {
    if (!same_space(u, v)) throw InputError("pairing needs functions on the same space");
    const auto w = u.space().weights();
    Complex acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += w[i] * u[i] * std::conj(v[i]);
    return acc;
}

DominationResult modulus_domination_check(const KernelOperator& op, const MeasurableFunction& f,
                                          std::size_t kmax) {
    if (kmax < 1) throw DomainError("modulus_domination_check needs kmax >= 1");
    require_same_space(op.space(), op.space_ptr(), f);
    const Operator t{op};
    const Operator modulus{linear_modulus(op)};
    const auto n = f.size();

    std::vector<Complex> power(f.values().begin(), f.values().end());
    std::vector<Complex> dominating(n);
    for (std::size_t i = 0; i < n; ++i) dominating[i] = std::abs(f[i]);
    std::vector<Complex> scratch(n);

    DominationResult res;
    bool first = true;
    for (std::size_t k = 1; k <= kmax; ++k) {
        apply_into(t, power, scratch);
        power.swap(scratch);
        apply_into(modulus, dominating, scratch);
        dominating.swap(scratch);
        for (std::size_t i = 0; i < n; ++i) {
            const double slack = dominating[i].real() - std::abs(power[i]);
            if (first || slack < res.min_slack) {
                res.min_slack = slack;
                res.worst_power = k;
                res.worst_atom = i;
                first = false;
            }
        }
    }
    res.holds = res.min_slack >= -1e-9;
    return res;
}

bool adjoint_modulus_commutation(const KernelOperator& op) {
    const auto lhs = linear_modulus(adjoint(op));
    const auto rhs = adjoint(linear_modulus(op));
    const auto a = lhs.matrix();
    const auto b = rhs.matrix();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > 1e-12) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// divergence construction

int counterexample_sign(std::span<const std::size_t> breakpoints, std::size_t cell) {
    // block k is [n_k, n_{k+1}) with n_0 = 0: +1 on [n_k, n_{k+1} - 1), -1 on the last cell
    std::size_t block_start = 0;
    for (const auto block_end : breakpoints) {
        if (cell >= block_start && cell < block_end) return cell + 1 == block_end ? -1 : 1;
        block_start = block_end;
    }
    return 1;
}

CompositionOperator build_counterexample_operator(std::span<const std::size_t> breakpoints,
                                                  std::size_t grid, std::size_t window) {
    if (grid == 0) throw InputError("counterexample grid must be a positive integer");
    if (breakpoints.empty()) throw InputError("counterexample needs at least one breakpoint");
    for (std::size_t k = 0; k < breakpoints.size(); ++k) {
        if (breakpoints[k] == 0 || (k > 0 && breakpoints[k] <= breakpoints[k - 1])) {
            throw InputError("counterexample breakpoints must be positive and strictly increasing");
        }
    }
    if (window < breakpoints.back()) {
        std::ostringstream msg;
        msg << "window " << window << " is shorter than the last breakpoint " << breakpoints.back();
        throw InputError(msg.str());
    }
    const std::size_t atoms = window * grid;
    auto space = AtomicMeasureSpace::uniform(atoms, 1.0 / static_cast<double>(grid), true);
    std::vector<std::size_t> map(atoms);
    std::vector<Complex> mult(atoms);
    for (std::size_t i = 0; i < atoms; ++i) {
        if (i + grid < atoms) {
            map[i] = i + grid;
            mult[i] = static_cast<double>(counterexample_sign(breakpoints, i / grid));
        } else {
            map[i] = i;
            mult[i] = 0.0;
        }
    }
    return {std::move(space), std::move(map), std::move(mult), false};
}

}  // namespace ergo
