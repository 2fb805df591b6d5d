#include "ergo/return_times.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "ergo/errors.hpp"
#include "ergo/weights.hpp"

namespace ergo {

PointSystem::PointSystem(SpacePtr space, std::vector<std::size_t> map, std::string label)
    : space_(std::move(space)), map_(std::move(map)), label_(std::move(label)) {
    if (!space_) throw InputError("point system needs a space");
    const auto n = space_->size();
    if (map_.size() != n) throw InputError("point map must have one entry per atom");
    std::vector<bool> hit(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (map_[i] >= n || hit[map_[i]]) throw InputError("point map is not a bijection");
        hit[map_[i]] = true;
        const double wi = space_->weight(i);
        if (std::abs(space_->weight(map_[i]) - wi) > 1e-12 * wi) {
            throw InputError("point map does not preserve atom weights");
        }
    }
}

PointSystem PointSystem::rotation(std::size_t atoms, std::size_t step) {
    if (atoms == 0) throw InputError("rotation needs at least one atom");
    std::vector<std::size_t> map(atoms);
    for (std::size_t i = 0; i < atoms; ++i) map[i] = (i + step) % atoms;
    std::ostringstream label;
    label << "rotation " << step << "/" << atoms;
    return {AtomicMeasureSpace::uniform(atoms), std::move(map), label.str()};
}

CompositionOperator PointSystem::koopman() const { return CompositionOperator::from_map(space_, map_); }

MeasurableFunction character(const SpacePtr& space, std::int64_t frequency) {
    const auto n = static_cast<std::int64_t>(space->size());
    std::vector<Complex> v(space->size());
    for (std::int64_t j = 0; j < n; ++j) {
        v[static_cast<std::size_t>(j)] = unit_root((frequency % n) * j % n, n);
    }
    return {space, std::move(v)};
}

namespace {

void require_on(const PointSystem& sys, const MeasurableFunction& f, const char* what) {
    if (sys.space_ptr() != f.space_ptr() && !sys.space().same_atoms(f.space())) {
        std::ostringstream msg;
        msg << what << " is not defined on its system's space";
        throw InputError(msg.str());
    }
}

std::size_t thread_count(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ERGO_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 1;
}

}  // namespace

ProductAverageReport product_average(const PointSystem& sys1, const MeasurableFunction& f,
                                     const PointSystem& sys2, const MeasurableFunction& g,
                                     std::span<const std::pair<std::size_t, std::size_t>> probes,
                                     const Checkpoints& cps) {
    require_on(sys1, f, "f");
    require_on(sys2, g, "g");
    for (const auto& [w, y] : probes) {
        if (w >= sys1.size() || y >= sys2.size()) throw InputError("probe index out of range");
    }
    ProductAverageReport rep;
    rep.probes.assign(probes.begin(), probes.end());
    rep.checkpoints.assign(cps.values().begin(), cps.values().end());
    rep.values.assign(cps.size(), std::vector<Complex>(probes.size()));

    for (std::size_t p = 0; p < probes.size(); ++p) {
        auto [w, y] = probes[p];
        Complex sum = 0.0;
        std::size_t next_cp = 0;
        for (std::size_t k = 0; k < cps.max(); ++k) {
            sum += f[w] * g[y];
            if (k + 1 == cps[next_cp]) {
                rep.values[next_cp][p] = sum * (1.0 / static_cast<double>(k + 1));
                ++next_cp;
            }
            w = sys1(w);
            y = sys2(y);
        }
    }
    return rep;
}

SweepResult wiener_wintner_sweep(const PointSystem& sys, const MeasurableFunction& f,
                                 std::span<const std::size_t> probes, std::size_t lambda_grid_size,
                                 const Checkpoints& cps, const SweepOptions& opts) {
    require_on(sys, f, "f");
    if (lambda_grid_size < 1) throw InputError("lambda grid needs at least one point");
    if (cps.max() > opts.iteration_budget) {
        std::ostringstream msg;
        msg << "largest checkpoint " << cps.max() << " exceeds the iteration budget " << opts.iteration_budget;
        throw BudgetError(msg.str());
    }
    for (auto p : probes) {
        if (p >= sys.size()) throw InputError("probe index out of range");
    }

    SweepResult res;
    res.probes.assign(probes.begin(), probes.end());
    res.checkpoints.assign(cps.values().begin(), cps.values().end());
    const auto grid = static_cast<std::int64_t>(lambda_grid_size);
    for (std::int64_t j = 0; j < grid; ++j) res.lambdas.push_back(unit_root(j, grid));
    res.values.assign(lambda_grid_size,
                      std::vector<std::vector<Complex>>(probes.size(), std::vector<Complex>(cps.size())));
    res.oscillation.assign(lambda_grid_size, std::vector<double>(probes.size()));

    // orbit samples f(tau^k w), shared read-only by every lambda accumulator
    std::vector<std::vector<Complex>> orbits(probes.size(), std::vector<Complex>(cps.max()));
    for (std::size_t p = 0; p < probes.size(); ++p) {
        std::size_t w = probes[p];
        for (std::size_t k = 0; k < cps.max(); ++k) {
            orbits[p][k] = f[w];
            w = sys(w);
        }
    }

    auto run_lambda = [&](std::size_t j) {
        const auto weight = WeightSequence::lambda_power(res.lambdas[j]);
        for (std::size_t p = 0; p < probes.size(); ++p) {
            WeightStream stream(weight);
            Complex sum = 0.0;
            std::size_t next_cp = 0;
            auto& out = res.values[j][p];
            for (std::size_t k = 0; k < cps.max(); ++k) {
                sum += stream.next() * orbits[p][k];
                if (k + 1 == cps[next_cp]) {
                    out[next_cp] = sum * (1.0 / static_cast<double>(k + 1));
                    ++next_cp;
                }
            }
            double re_lo = out[0].real(), re_hi = re_lo, im_lo = out[0].imag(), im_hi = im_lo;
            for (const auto& v : out) {
                re_lo = std::min(re_lo, v.real());
                re_hi = std::max(re_hi, v.real());
                im_lo = std::min(im_lo, v.imag());
                im_hi = std::max(im_hi, v.imag());
            }
            res.oscillation[j][p] = std::max(re_hi - re_lo, im_hi - im_lo);
        }
    };

    const auto workers = std::min(thread_count(opts.threads), lambda_grid_size);
    if (workers <= 1) {
        for (std::size_t j = 0; j < lambda_grid_size; ++j) run_lambda(j);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t j = t; j < lambda_grid_size; j += workers) run_lambda(j);
            });
        }
    }
    return res;
}

namespace {

Complex closed_form(Complex q, double omega_phase, std::size_t n) {
    const Complex base = unit_phase(omega_phase);
    if (std::abs(1.0 - q) < 1e-12) return base;
    const double nd = static_cast<double>(n);
    const Complex qn = std::polar(std::pow(std::abs(q), nd), std::fmod(std::arg(q) * nd, 2.0 * std::numbers::pi));
    return base * (1.0 - qn) / (nd * (1.0 - q));
}

}  // namespace

Complex rotation_closed_form(double rho, Complex lambda, double omega_phase, std::size_t n) {
    if (n < 1) throw DomainError("rotation_closed_form needs n >= 1");
    if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw InputError("lambda must be unimodular");
    return closed_form(lambda * unit_phase(rho), omega_phase, n);
}

Complex rotation_closed_form(std::int64_t a, std::int64_t atoms, Complex lambda, double omega_phase,
                             std::size_t n) {
    if (n < 1) throw DomainError("rotation_closed_form needs n >= 1");
    if (atoms < 1) throw InputError("rotation needs a positive denominator");
    if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw InputError("lambda must be unimodular");
    return closed_form(lambda * unit_root(a, atoms), omega_phase, n);
}

bool is_resonant(double rho, Complex lambda) {
    return std::abs(1.0 - lambda * unit_phase(rho)) < kResonanceThreshold;
}

}  // namespace ergo
