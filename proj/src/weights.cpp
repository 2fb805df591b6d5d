#include "ergo/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergo/errors.hpp"

namespace ergo {

namespace {

constexpr double kUnitTolerance = 1e-12;

Complex term_power(const TrigTerm& t, std::uint64_t k) {
    if (t.frequency) {
        const auto den = t.frequency->den;
        std::int64_t num = t.frequency->num % den;
        if (num < 0) num += den;
        const auto reduced = static_cast<std::int64_t>(
            (static_cast<unsigned __int128>(num) * k) % static_cast<std::uint64_t>(den));
        return unit_root(reduced, den);
    }
    const double modulus = std::abs(t.lambda);
    const double angle = std::arg(t.lambda);
    const double kd = static_cast<double>(k);
    return std::polar(std::pow(modulus, kd), std::fmod(angle * kd, 2.0 * std::numbers::pi));
}

}  // namespace

// ---------------------------------------------------------------------------
// TrigPolynomial

TrigPolynomial::TrigPolynomial(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw InputError("trigonometric polynomial needs at least one term");
    for (const auto& t : terms_) {
        if (std::abs(std::abs(t.lambda) - 1.0) > kUnitTolerance) {
            throw InputError("trigonometric polynomial frequencies must lie on the unit circle");
        }
        if (t.frequency && t.frequency->den <= 0) {
            throw InputError("rational frequency needs a positive denominator");
        }
    }
}

TrigPolynomial::TrigPolynomial(std::initializer_list<std::pair<Complex, Complex>> terms)
    : TrigPolynomial([&] {
          std::vector<TrigTerm> v;
          for (const auto& [z, lambda] : terms) v.push_back({z, lambda, std::nullopt});
          return v;
      }()) {}

Complex TrigPolynomial::operator()(std::uint64_t k) const {
    Complex acc = 0.0;
    for (const auto& t : terms_) acc += t.z * term_power(t, k);
    return acc;
}

double TrigPolynomial::coefficient_bound() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.z);
    return s;
}

// ---------------------------------------------------------------------------
// WeightSequence

WeightSequence WeightSequence::constant(Complex c) {
    WeightSequence w;
    w.kind_ = WeightKind::Constant;
    w.constant_ = c;
    w.bound_ = std::abs(c);
    return w;
}

WeightSequence WeightSequence::periodic(std::vector<Complex> values) {
    if (values.empty()) throw InputError("periodic weight needs at least one value");
    WeightSequence w;
    w.kind_ = WeightKind::Periodic;
    for (const auto& v : values) w.bound_ = std::max(w.bound_, std::abs(v));
    w.values_ = std::move(values);
    return w;
}

WeightSequence WeightSequence::trig_poly(TrigPolynomial p) {
    WeightSequence w;
    w.kind_ = WeightKind::TrigPoly;
    w.bound_ = p.coefficient_bound();
    w.poly_ = std::move(p);
    return w;
}

WeightSequence WeightSequence::lambda_power(Complex lambda) {
    if (std::abs(std::abs(lambda) - 1.0) > kUnitTolerance) {
        throw InputError("lambda_power weight needs |lambda| = 1");
    }
    WeightSequence w;
    w.kind_ = WeightKind::LambdaPower;
    w.constant_ = lambda;
    w.bound_ = 1.0;
    return w;
}

WeightSequence WeightSequence::explicit_list(std::vector<Complex> values,
                                             std::optional<double> declared_bound) {
    WeightSequence w;
    w.kind_ = WeightKind::Explicit;
    double observed = 0.0;
    for (const auto& v : values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw InputError("explicit weights must be finite");
        }
        observed = std::max(observed, std::abs(v));
    }
    if (declared_bound && !(std::isfinite(*declared_bound) && *declared_bound >= 0.0)) {
        throw InputError("declared weight bound must be finite and nonnegative");
    }
    w.bound_ = declared_bound.value_or(observed);
    w.values_ = std::move(values);
    return w;
}

std::optional<std::size_t> WeightSequence::length() const noexcept {
    if (kind_ == WeightKind::Explicit) return values_.size();
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// WeightStream

WeightStream::WeightStream(const WeightSequence& w) : w_(&w) {}

Complex WeightStream::next() {
    const auto k = k_;
    Complex out;
    switch (w_->kind()) {
        case WeightKind::Constant: out = w_->constant_value(); break;
        case WeightKind::Periodic: {
            const auto vals = w_->values();
            out = vals[k % vals.size()];
            break;
        }
        case WeightKind::TrigPoly: out = (*w_->polynomial())(k); break;
        case WeightKind::LambdaPower:
            out = power_;
            power_ *= w_->lambda();
            if ((k + 1) % kRenormalizeEvery == 0) power_ /= std::abs(power_);
            break;
        case WeightKind::Explicit: {
            const auto vals = w_->values();
            if (k >= vals.size()) {
                std::ostringstream msg;
                msg << "explicit weight list of length " << vals.size() << " exhausted at k = " << k;
                throw RangeError(msg.str());
            }
            out = vals[k];
            break;
        }
    }
    ++k_;
    return out;
}

Complex eval_weight(const WeightSequence& w, std::uint64_t k) {
    switch (w.kind()) {
        case WeightKind::Constant: return w.constant_value();
        case WeightKind::Periodic: return w.values()[k % w.values().size()];
        case WeightKind::TrigPoly: return (*w.polynomial())(k);
        case WeightKind::Explicit:
            if (k >= w.values().size()) {
                std::ostringstream msg;
                msg << "explicit weight list of length " << w.values().size() << " exhausted at k = " << k;
                throw RangeError(msg.str());
            }
            return w.values()[k];
        case WeightKind::LambdaPower: {
            WeightStream s(w);
            Complex out;
            for (std::uint64_t i = 0; i <= k; ++i) out = s.next();
            return out;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------

double besicovitch_deviation(const WeightSequence& w, const TrigPolynomial& p, std::uint64_t n) {
    if (n < 1) throw DomainError("besicovitch_deviation needs n >= 1");
    WeightStream s(w);
    CompensatedSum sum;
    for (std::uint64_t k = 0; k < n; ++k) sum.add(std::abs(s.next() - p(k)));
    return sum.value() / static_cast<double>(n);
}

LimsupEstimate besicovitch_limsup_estimate(const WeightSequence& w, const TrigPolynomial& p,
                                           std::uint64_t n_max) {
    if (n_max < 1) throw DomainError("besicovitch_limsup_estimate needs n_max >= 1");
    LimsupEstimate est;
    WeightStream s(w);
    CompensatedSum sum;
    std::uint64_t next_sample = 1;
    for (std::uint64_t k = 0; k < n_max; ++k) {
        sum.add(std::abs(s.next() - p(k)));
        if (k + 1 == next_sample) {
            est.sample_n.push_back(k + 1);
            est.deviations.push_back(sum.value() / static_cast<double>(k + 1));
            next_sample *= 2;
        }
    }
    const auto tail_begin = est.deviations.size() / 2;
    for (auto i = tail_begin; i < est.deviations.size(); ++i) {
        est.estimate = std::max(est.estimate, est.deviations[i]);
    }
    return est;
}

TrigPolynomial dft_interpolant(std::span<const Complex> periodic_values) {
    const auto p = static_cast<std::int64_t>(periodic_values.size());
    if (p < 1) throw InputError("dft_interpolant needs at least one value");
    std::vector<TrigTerm> terms;
    terms.reserve(periodic_values.size());
    for (std::int64_t j = 0; j < p; ++j) {
        Complex z = 0.0;
        for (std::int64_t k = 0; k < p; ++k) {
            z += periodic_values[static_cast<std::size_t>(k)] * unit_root(-(j * k % p), p);
        }
        z /= static_cast<double>(p);
        terms.push_back({z, unit_root(j, p), RationalFrequency{j, p}});
    }
    return TrigPolynomial(std::move(terms));
}

BoundCheck validate_bound(const WeightSequence& w, std::uint64_t n) {
    if (n < 1) throw DomainError("validate_bound needs n >= 1");
    if (const auto len = w.length()) n = std::min<std::uint64_t>(n, *len);
    BoundCheck res;
    WeightStream s(w);
    for (std::uint64_t k = 0; k < n; ++k) {
        const double m = std::abs(s.next());
        res.max_modulus = std::max(res.max_modulus, m);
        if (m > w.bound() + 1e-12 && res.ok) {
            res.ok = false;
            res.first_violation = k;
        }
    }
    return res;
}

}  // namespace ergo
