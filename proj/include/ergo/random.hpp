#pragma once

// Seeded generators for test functions and kernels. The engine is
// std::mt19937_64, whose output sequence is fixed by the C++ standard; doubles
// are formed from the top 53 bits, so results do not depend on the standard
// library's distribution implementations.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "ergo/measure_space.hpp"
#include "ergo/operators.hpp"

namespace ergo {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform on {0, ..., n-1}; n > 0.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Weights uniform in [lo, hi).
[[nodiscard]] SpacePtr random_space(Rng& rng, std::size_t atoms, double lo = 0.1, double hi = 2.0,
                                    bool truncated = false);

/// Values with real (and optionally imaginary) parts uniform in [lo, hi).
[[nodiscard]] MeasurableFunction random_function(Rng& rng, const SpacePtr& space, double lo = -1.0,
                                                 double hi = 1.0, bool complex_values = false);

/// Random kernel rescaled so that both Dunford-Schwartz conditions hold;
/// `density` is the probability that an entry is nonzero.
[[nodiscard]] KernelOperator random_ds_kernel(Rng& rng, const SpacePtr& space, bool complex_entries = false,
                                              double density = 1.0);

/// Random kernel with entries uniform in [-1, 1), no contraction guarantee.
[[nodiscard]] KernelOperator random_kernel(Rng& rng, const SpacePtr& space, bool complex_entries = false);

}  // namespace ergo
