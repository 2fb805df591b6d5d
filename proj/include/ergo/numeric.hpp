#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <charconv>
#include <numbers>
#include <string>

namespace ergo {

using Complex = std::complex<double>;

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// e^{2 pi i m / p}, with the residue reduced exactly and quarter turns returned exactly.
inline Complex unit_root(std::int64_t m, std::int64_t p) {
    std::int64_t r = m % p;
    if (r < 0) r += p;
    if ((4 * r) % p == 0) {
        switch ((4 * r) / p) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(p);
    return {std::cos(angle), std::sin(angle)};
}

/// e^{2 pi i x} for real x, reducing x mod 1 first.
inline Complex unit_phase(double x) {
    const double frac = x - std::floor(x);
    const double angle = 2.0 * std::numbers::pi * frac;
    return {std::cos(angle), std::sin(angle)};
}

/// Shortest round-trip decimal form of x; locale independent.
inline std::string format_number(double x) {
    if (x == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace ergo
