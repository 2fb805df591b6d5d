#include "ergo/measure_space.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ergo/errors.hpp"

namespace ergo {

// ---------------------------------------------------------------------------
// AtomicMeasureSpace

AtomicMeasureSpace::AtomicMeasureSpace(std::vector<double> weights, bool truncated)
    : weights_(std::move(weights)), truncated_(truncated), total_(0.0) {
    CompensatedSum sum;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double w = weights_[i];
        if (!(w > 0.0) || !std::isfinite(w)) {
            std::ostringstream msg;
            msg << "atom " << i << " has non-positive or non-finite weight " << w;
            throw InputError(msg.str());
        }
        sum.add(w);
    }
    total_ = sum.value();
}

SpacePtr AtomicMeasureSpace::make(std::vector<double> weights, bool truncated) {
    return std::make_shared<const AtomicMeasureSpace>(std::move(weights), truncated);
}

SpacePtr AtomicMeasureSpace::uniform(std::size_t atoms, double weight, bool truncated) {
    return make(std::vector<double>(atoms, weight), truncated);
}

bool AtomicMeasureSpace::same_atoms(const AtomicMeasureSpace& other) const noexcept {
    return weights_ == other.weights_;
}

// ---------------------------------------------------------------------------
// MeasurableFunction

MeasurableFunction::MeasurableFunction(SpacePtr space, std::vector<Complex> values)
    : space_(std::move(space)), values_(std::move(values)) {
    if (!space_) throw InputError("measurable function needs a space");
    if (values_.size() != space_->size()) {
        std::ostringstream msg;
        msg << "function has " << values_.size() << " values but the space has " << space_->size()
            << " atoms";
        throw InputError(msg.str());
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag())) {
            std::ostringstream msg;
            msg << "function value at atom " << i << " is not finite";
            throw InputError(msg.str());
        }
    }
}

MeasurableFunction::MeasurableFunction(SpacePtr space, const std::vector<double>& real_values)
    : MeasurableFunction(std::move(space),
                         std::vector<Complex>(real_values.begin(), real_values.end())) {}

MeasurableFunction MeasurableFunction::zero(SpacePtr space) {
    const auto n = space->size();
    return {std::move(space), std::vector<Complex>(n)};
}

MeasurableFunction MeasurableFunction::constant(SpacePtr space, Complex c) {
    const auto n = space->size();
    return {std::move(space), std::vector<Complex>(n, c)};
}

MeasurableFunction MeasurableFunction::indicator(SpacePtr space, std::span<const std::size_t> atoms) {
    std::vector<Complex> values(space->size());
    for (auto a : atoms) {
        if (a >= values.size()) throw InputError("indicator atom index out of range");
        values[a] = 1.0;
    }
    return {std::move(space), std::move(values)};
}

MeasurableFunction MeasurableFunction::scaled(Complex c) const {
    std::vector<Complex> v(values_);
    for (auto& x : v) x *= c;
    return {space_, std::move(v)};
}

bool same_space(const MeasurableFunction& a, const MeasurableFunction& b) noexcept {
    return a.space_ptr() == b.space_ptr() || a.space().same_atoms(b.space());
}

// ---------------------------------------------------------------------------
// Rearrangement

Rearrangement::Rearrangement(std::vector<double> breakpoints, std::vector<double> plateau_values) {
    if (breakpoints.size() != plateau_values.size() + 1) {
        throw InputError("rearrangement needs exactly one more breakpoint than plateaus");
    }
    if (breakpoints.front() != 0.0) throw InputError("rearrangement must start at t = 0");
    for (std::size_t i = 0; i < plateau_values.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i]) || !std::isfinite(breakpoints[i + 1])) {
            throw InputError("rearrangement breakpoints must be finite and strictly increasing");
        }
        const double v = plateau_values[i];
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InputError("rearrangement plateau values must be finite and nonnegative");
        }
        if (i > 0 && v > plateau_values[i - 1]) {
            throw InputError("rearrangement plateau values must be non-increasing");
        }
    }
    breakpoints_.push_back(0.0);
    for (std::size_t i = 0; i < plateau_values.size(); ++i) {
        // zero plateaus carry no mass; the support ends at the first of them
        if (plateau_values[i] == 0.0) break;
        if (!values_.empty() && values_.back() == plateau_values[i]) {
            breakpoints_.back() = breakpoints[i + 1];
        } else {
            values_.push_back(plateau_values[i]);
            breakpoints_.push_back(breakpoints[i + 1]);
        }
    }
}

double Rearrangement::value_at(double t) const {
    if (t < 0.0) throw DomainError("rearrangement is defined for t >= 0");
    // first breakpoint strictly greater than t
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    if (it == breakpoints_.end()) return 0.0;
    const auto idx = static_cast<std::size_t>(it - breakpoints_.begin());
    return values_[idx - 1];
}

Rearrangement rearrangement(const MeasurableFunction& f) {
    struct Atom {
        double magnitude;
        double weight;
    };
    std::vector<Atom> atoms;
    atoms.reserve(f.size());
    const auto weights = f.space().weights();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double m = std::abs(f[i]);
        if (m > 0.0) atoms.push_back({m, weights[i]});
    }
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& a, const Atom& b) { return a.magnitude > b.magnitude; });

    std::vector<double> breakpoints{0.0};
    std::vector<double> values;
    CompensatedSum position;
    for (const auto& a : atoms) {
        position.add(a.weight);
        if (!values.empty() && values.back() == a.magnitude) {
            breakpoints.back() = position.value();
        } else {
            values.push_back(a.magnitude);
            breakpoints.push_back(position.value());
        }
    }
    return {Rearrangement::Unchecked{}, std::move(breakpoints), std::move(values)};
}

double hl_integral(const Rearrangement& r, double s) {
    if (!(s > 0.0)) throw DomainError("hl_integral needs s > 0");
    const auto bp = r.breakpoints();
    const auto vals = r.plateau_values();
    CompensatedSum area;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (bp[i] >= s) break;
        const double right = std::min(bp[i + 1], s);
        area.add(vals[i] * (right - bp[i]));
    }
    return area.value();
}

MajorizationResult majorizes(const Rearrangement& f, const Rearrangement& g, double tol) {
    std::vector<double> points;
    points.reserve(f.breakpoints().size() + g.breakpoints().size());
    for (double s : f.breakpoints()) if (s > 0.0) points.push_back(s);
    for (double s : g.breakpoints()) if (s > 0.0) points.push_back(s);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    // Both integrals are piecewise linear with kinks only at breakpoints, so
    // checking the union of breakpoints suffices; past the last one both are flat.
    for (double s : points) {
        const double lhs = hl_integral(g, s);
        const double rhs = hl_integral(f, s);
        if (lhs > rhs + tol) return {false, s, lhs, rhs};
    }
    return {};
}

MajorizationResult majorizes(const MeasurableFunction& f, const MeasurableFunction& g, double tol) {
    const auto& sf = f.space();
    const auto& sg = g.space();
    const double scale = std::max({1.0, sf.total_measure(), sg.total_measure()});
    const bool equal_measure = std::abs(sf.total_measure() - sg.total_measure()) <= 1e-12 * scale;
    if (!equal_measure && !(sf.truncated() && sg.truncated())) {
        throw InputError("majorization needs spaces of equal total measure or two truncated windows");
    }
    return majorizes(rearrangement(f), rearrangement(g), tol);
}

double norm(const MeasurableFunction& f, NormKind which) {
    const auto weights = f.space().weights();
    auto l1 = [&] {
        CompensatedSum s;
        for (std::size_t i = 0; i < f.size(); ++i) s.add(weights[i] * std::abs(f[i]));
        return s.value();
    };
    auto linf = [&] {
        double m = 0.0;
        for (const auto& v : f.values()) m = std::max(m, std::abs(v));
        return m;
    };
    switch (which) {
        case NormKind::L1: return l1();
        case NormKind::Linf: return linf();
        case NormKind::L1plusLinf: return hl_integral(rearrangement(f), 1.0);
        case NormKind::L1capLinf: return std::max(l1(), linf());
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Orlicz / Luxemburg

OrliczFunction OrliczFunction::power(double p) {
    if (!(p >= 1.0)) throw InputError("Orlicz power needs p >= 1");
    std::ostringstream name;
    name << "u^" << p;
    return {[p](double u) { return p == 1.0 ? u : std::pow(u, p); }, name.str(), 0.0};
}

bool OrliczFunction::validate() const {
    if (!phi || phi(0.0) != 0.0) return false;
    std::vector<double> grid;
    for (int e = -6; e <= 6; ++e) {
        for (double m : {1.0, 2.5, 5.0}) grid.push_back(m * std::pow(10.0, e));
    }
    for (double u : grid) {
        const double v = phi(u);
        if (!(v >= 0.0)) return false;
        if (u > positive_from && !(v > 0.0)) return false;
    }
    for (double a : grid) {
        for (double b : grid) {
            const double mid = phi(0.5 * (a + b));
            const double chord = 0.5 * (phi(a) + phi(b));
            if (mid > chord + 1e-12 * std::max(1.0, std::abs(chord))) return false;
        }
    }
    return true;
}

double luxemburg_norm(const MeasurableFunction& f, const OrliczFunction& phi, double tol) {
    if (!(tol > 0.0)) throw DomainError("luxemburg_norm needs tol > 0");
    const double sup = norm(f, NormKind::Linf);
    if (sup == 0.0) return 0.0;

    const auto weights = f.space().weights();
    auto modular = [&](double a) {
        CompensatedSum s;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double m = std::abs(f[i]);
            if (m > 0.0) s.add(weights[i] * phi.phi(m / a));
        }
        return s.value();
    };

    constexpr int kMaxDoublings = 200;
    double hi = sup;
    int steps = 0;
    while (!(modular(hi) <= 1.0)) {
        hi *= 2.0;
        if (++steps > kMaxDoublings) throw NumericError("Luxemburg bracket did not close from above");
    }
    double lo = hi;
    steps = 0;
    while (modular(lo) <= 1.0) {
        lo *= 0.5;
        if (++steps > kMaxDoublings) throw NumericError("Luxemburg bracket did not close from below");
    }
    // invariant: modular(lo) > 1 >= modular(hi)
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (modular(mid) <= 1.0) hi = mid; else lo = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------
// Lorentz

LorentzWeight::LorentzWeight(std::vector<double> knots, std::vector<double> slopes)
    : knots_(std::move(knots)), slopes_(std::move(slopes)) {
    if (knots_.empty() || knots_.size() != slopes_.size()) {
        throw InputError("Lorentz weight needs one slope per knot");
    }
    if (knots_.front() != 0.0) throw InputError("Lorentz weight knots must start at 0");
    for (std::size_t i = 0; i < slopes_.size(); ++i) {
        if (!(slopes_[i] >= 0.0) || !std::isfinite(slopes_[i])) {
            throw InputError("Lorentz weight slopes must be finite and nonnegative");
        }
        if (i > 0) {
            if (!(knots_[i] > knots_[i - 1])) throw InputError("Lorentz weight knots must increase");
            if (slopes_[i] > slopes_[i - 1]) {
                throw InputError("Lorentz weight slopes must be non-increasing (concavity)");
            }
        }
    }
}

LorentzWeight LorentzWeight::identity() { return {{0.0}, {1.0}}; }

LorentzWeight LorentzWeight::capped(double cap) { return {{0.0, cap}, {1.0, 0.0}}; }

double LorentzWeight::operator()(double t) const {
    double value = 0.0;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (t <= knots_[i]) break;
        const double right = i + 1 < knots_.size() ? std::min(t, knots_[i + 1]) : t;
        value += slopes_[i] * (right - knots_[i]);
    }
    return value;
}

double lorentz_norm(const MeasurableFunction& f, const LorentzWeight& w) {
    const auto r = rearrangement(f);
    const auto bp = r.breakpoints();
    const auto vals = r.plateau_values();
    CompensatedSum s;
    double prev = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double next = w(bp[i + 1]);
        s.add(vals[i] * (next - prev));
        prev = next;
    }
    return s.value();
}

// ---------------------------------------------------------------------------

TailResult r_mu_tail(const MeasurableFunction& f, double t0) {
    if (!(t0 > 0.0)) throw DomainError("r_mu_tail needs t0 > 0");
    if (t0 >= f.space().total_measure()) return {0.0, true};
    return {rearrangement(f).value_at(t0), false};
}

std::pair<MeasurableFunction, MeasurableFunction> decompose(const MeasurableFunction& f, double eps) {
    if (!(eps > 0.0)) throw DomainError("decompose needs eps > 0");
    std::vector<Complex> g(f.size());
    std::vector<Complex> h(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::abs(f[i]) > eps) g[i] = f[i]; else h[i] = f[i];
    }
    return {MeasurableFunction(f.space_ptr(), std::move(g)),
            MeasurableFunction(f.space_ptr(), std::move(h))};
}

double distribution(const MeasurableFunction& f, double lambda) {
    const auto weights = f.space().weights();
    CompensatedSum s;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::abs(f[i]) > lambda) s.add(weights[i]);
    }
    return s.value();
}

void write_rearrangement_csv(std::ostream& out, const Rearrangement& r) {
    out << "t_left,t_right,value\n";
    const auto bp = r.breakpoints();
    const auto vals = r.plateau_values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        out << format_number(bp[i]) << ',' << format_number(bp[i + 1]) << ','
            << format_number(vals[i]) << '\n';
    }
}

}  // namespace ergo
