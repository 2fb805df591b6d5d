#include "ergo/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ergo {

SpacePtr random_space(Rng& rng, std::size_t atoms, double lo, double hi, bool truncated) {
    std::vector<double> w(atoms);
    for (auto& x : w) x = rng.uniform(lo, hi);
    return AtomicMeasureSpace::make(std::move(w), truncated);
}

MeasurableFunction random_function(Rng& rng, const SpacePtr& space, double lo, double hi,
                                   bool complex_values) {
    std::vector<Complex> v(space->size());
    for (auto& x : v) {
        const double re = rng.uniform(lo, hi);
        const double im = complex_values ? rng.uniform(lo, hi) : 0.0;
        x = {re, im};
    }
    return {space, std::move(v)};
}

namespace {

Complex random_entry(Rng& rng, bool complex_entries) {
    if (complex_entries) {
        const double r = rng.uniform();
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        return std::polar(r, theta);
    }
    return rng.uniform(-1.0, 1.0);
}

}  // namespace

KernelOperator random_kernel(Rng& rng, const SpacePtr& space, bool complex_entries) {
    const auto n = space->size();
    std::vector<Complex> m(n * n);
    for (auto& k : m) k = random_entry(rng, complex_entries);
    return {space, std::move(m)};
}

KernelOperator random_ds_kernel(Rng& rng, const SpacePtr& space, bool complex_entries, double density) {
    const auto n = space->size();
    std::vector<Complex> m(n * n);
    for (auto& k : m) {
        const bool keep = rng.uniform() < density;
        const Complex v = random_entry(rng, complex_entries);
        if (keep) k = v;
    }
    const auto rep = ds_certificate(KernelOperator(space, m), *space);
    const double scale = std::max(rep.worst_column_sum, rep.worst_row_sum);
    if (scale > 0.0) {
        for (auto& k : m) k /= scale;
    }
    return {space, std::move(m)};
}

}  // namespace ergo
