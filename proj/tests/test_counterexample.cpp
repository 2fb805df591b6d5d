#include <doctest.h>

#include <cmath>

#include "ergo/counterexample.hpp"
#include "ergo/errors.hpp"

using namespace ergo;

namespace {

// phi from the block formula: -1 on the cell n_{k+1} - 1 closing each block, +1 elsewhere.
int phi_cell(const std::vector<std::size_t>& bp, std::size_t cell) {
    for (auto n : bp)
        if (cell + 1 == n) return -1;
    return 1;
}

// (1/n)(mu_t + sum_{k=1}^{n-1} phi(t) ... phi(t+k-1) mu_{t+k}) with t in cell 0.
double brute_average(const std::vector<std::size_t>& bp, const Rearrangement& r, double t, std::size_t n) {
    double sum = r.value_at(t);
    int prod = 1;
    for (std::size_t k = 1; k < n; ++k) {
        prod *= phi_cell(bp, k - 1);
        sum += prod * r.value_at(t + double(k));
    }
    return sum / double(n);
}

bool stage_ok(std::size_t stage, double a, double margin) {
    if (stage == 1) return a >= 1.0 - 1e-12;
    return stage % 2 == 0 ? a < -0.5 - margin : a > 0.5 + margin;
}

// greedy search driven only by brute_average on a grid of t values
std::vector<std::size_t> brute_greedy(const Rearrangement& r, const std::vector<double>& ts, std::size_t stages,
                                      double margin) {
    std::vector<std::size_t> bp{1};
    std::size_t n = 1;
    for (std::size_t stage = 2; stage <= stages; ++stage) {
        for (;;) {
            ++n;
            auto trial = bp;
            trial.push_back(n);
            bool ok = true;
            for (double t : ts) ok = ok && stage_ok(stage, brute_average(trial, r, t, n), margin);
            if (ok) break;
        }
        bp.push_back(n);
    }
    return bp;
}

Rearrangement ones(double length) { return Rearrangement({0.0, length}, {1.0}); }

Rearrangement decaying(std::size_t grid, std::size_t cells) {
    std::vector<double> bp{0.0}, vals;
    for (std::size_t i = 0; i < grid * cells; ++i) {
        const double mid = (double(i) + 0.5) / double(grid);
        bp.push_back(double(i + 1) / double(grid));
        vals.push_back(1.0 + 1.0 / (1.0 + mid));
    }
    return Rearrangement(bp, vals);
}

}  // namespace

TEST_CASE("brute force confirms the greedy breakpoints for f = 1") {
    auto r = ones(1000);
    const std::vector<double> ts{0.15, 0.5, 0.95};
    auto bp = brute_greedy(r, ts, 6, 0.0);
    const std::vector<std::size_t> expect{1, 5, 17, 53, 161, 485};
    CHECK(bp == expect);
    CHECK(brute_average(bp, r, 0.5, 1) == 1.0);
    CHECK(brute_average(bp, r, 0.5, 5) == doctest::Approx(-3.0 / 5).epsilon(1e-15));
    CHECK(brute_average(bp, r, 0.5, 17) == doctest::Approx(9.0 / 17).epsilon(1e-15));

    auto cert = construct_breakpoints(r, 0.1, 6);
    CHECK(cert.breakpoints == expect);
    CHECK(cert.mode == GridMode::UnitCell);
}

TEST_CASE("construct and verify the three-stage certificate") {
    auto r = ones(100);
    auto cert = construct_breakpoints(r, 0.1, 3);
    const std::vector<std::size_t> expect{1, 5, 17};
    REQUIRE(cert.breakpoints == expect);
    REQUIRE(cert.stages.size() == 3);
    CHECK(cert.stages[0].extremal_value == 1.0);
    CHECK(cert.stages[0].margin == 0.0);
    CHECK(cert.stages[1].extremal_value == doctest::Approx(-0.6).epsilon(1e-15));
    CHECK(cert.stages[1].margin == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(cert.stages[2].margin == doctest::Approx(9.0 / 17 - 0.5).epsilon(1e-12));

    auto v = verify_certificate(cert, r);
    CHECK(v.verified);
    CHECK_FALSE(v.failed_stage.has_value());
    REQUIRE(v.stage_margins.size() == 3);
    CHECK(v.stage_margins[0] == 0.0);
    CHECK(v.stage_margins[1] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(v.stage_margins[2] == doctest::Approx(9.0 / 17 - 0.5).epsilon(1e-12));
    CHECK(v.min_margin == 0.0);
    CHECK(v.max_discrepancy <= 1e-9);

    const auto probe = v.trace.probes.front();
    CHECK(oscillation(v.trace, probe) == doctest::Approx(1.6).epsilon(1e-12));
}

TEST_CASE("tampered certificate fails at stage 2") {
    auto r = ones(100);
    auto cert = construct_breakpoints(r, 0.1, 3);
    cert.breakpoints = {1, 4, 17};
    auto v = verify_certificate(cert, r);
    CHECK_FALSE(v.verified);
    REQUIRE(v.failed_stage.has_value());
    CHECK(*v.failed_stage == 2);
}

TEST_CASE("greedy minimality with a margin") {
    auto r = ones(2000);
    const double margin = 0.05;
    auto cert = construct_breakpoints(r, 0.2, 5, margin);
    auto bp = cert.breakpoints;
    CHECK(bp == brute_greedy(r, {0.5}, 5, margin));
    for (std::size_t j = 1; j < bp.size(); ++j) {
        auto shorter = std::vector<std::size_t>(bp.begin(), bp.begin() + std::ptrdiff_t(j + 1));
        shorter.back() -= 1;
        if (shorter.back() <= shorter[j - 1]) continue;
        CHECK_FALSE(stage_ok(j + 1, brute_average(shorter, r, 0.5, shorter.back()), margin));
    }
}

TEST_CASE("non-constant rearrangement uses the full grid") {
    const std::size_t grid = 10;
    auto r = decaying(grid, 400);
    CounterexampleOptions opts;
    opts.grid = grid;
    auto cert = construct_breakpoints(r, 0.1, 4, 0.0, opts);
    CHECK(cert.mode == GridMode::Full);
    std::vector<double> ts;
    for (auto p : probe_atoms(0.1, grid)) ts.push_back((double(p) + 0.5) / grid);
    CHECK(ts.size() == 9);
    CHECK(cert.breakpoints == brute_greedy(r, ts, 4, 0.0));

    auto v = verify_certificate(cert, r);
    CHECK(v.verified);
    CHECK(v.max_discrepancy <= 1e-9);
    for (auto p : v.trace.probes) CHECK(oscillation(v.trace, p) >= 1.0);
}

TEST_CASE("sign product formula") {
    const std::size_t bp[] = {1, 5, 17};
    std::vector<double> samples(20, 1.0);
    CHECK(sign_product_average(bp, samples, 1, 0, 5) == doctest::Approx(-0.6).epsilon(1e-15));
    CHECK(sign_product_average(bp, samples, 1, 0, 17) == doctest::Approx(9.0 / 17).epsilon(1e-15));
    CHECK_THROWS_AS((void)sign_product_average(bp, samples, 1, 0, 21), WindowError);
    CHECK_THROWS_AS((void)sign_product_average(bp, samples, 1, 1, 2), InputError);
}

TEST_CASE("probe atoms sit at midpoints inside (eps, 1)") {
    CHECK(probe_atoms(0.1, 1) == std::vector<std::size_t>{0});
    CHECK(probe_atoms(0.5, 1).empty());
    CHECK(probe_atoms(0.25, 4) == std::vector<std::size_t>{1, 2, 3});
    auto s = sample_rearrangement(Rearrangement({0, 0.5, 2}, {3, 1}), 2, 2);
    CHECK(s == std::vector<double>{3, 1, 1, 1});
}

TEST_CASE("errors") {
    auto r = ones(30);
    CHECK_THROWS_AS((void)construct_breakpoints(r, 1.0, 3), InputError);
    CHECK_THROWS_AS((void)construct_breakpoints(r, 0.0, 3), InputError);
    CHECK_THROWS_AS((void)construct_breakpoints(r, 0.1, 1), InputError);
    CHECK_THROWS_AS((void)construct_breakpoints(r, 0.1, 4), WindowError);
    CHECK_THROWS_AS((void)construct_breakpoints(Rearrangement({0, 30}, {0.5}), 0.1, 3), InputError);
    CounterexampleOptions small;
    small.budget = 10;
    CHECK_THROWS_AS((void)construct_breakpoints(r, 0.1, 3, 0.0, small), BudgetError);
    CounterexampleOptions coarse;
    coarse.grid = 2;
    CHECK_THROWS_AS((void)construct_breakpoints(r, 0.8, 3, 0.0, coarse), InputError);

    auto cert = construct_breakpoints(r, 0.1, 3);
    cert.eps = 1.0;
    CHECK_THROWS_AS((void)verify_certificate(cert, r), InputError);
}
