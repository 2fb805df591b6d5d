#include <doctest.h>

#include <cmath>

#include "ergo/errors.hpp"
#include "ergo/random.hpp"
#include "ergo/weights.hpp"

using namespace ergo;

namespace {

const Complex I{0.0, 1.0};

Complex naive_power(Complex z, std::uint64_t k) {
    Complex r = 1.0;
    for (std::uint64_t i = 0; i < k; ++i) r *= z;
    return r;
}

}  // namespace

TEST_CASE("eval_weight per kind") {
    CHECK(eval_weight(WeightSequence::constant(1.0), 12345) == 1.0);
    CHECK(eval_weight(WeightSequence::periodic({1.0, -1.0}), 7) == -1.0);
    auto tp = WeightSequence::trig_poly(TrigPolynomial{{2.0, I}});
    auto v = eval_weight(tp, 3);
    CHECK(std::abs(v - Complex(0, -2)) <= 1e-15);
    auto lp = WeightSequence::lambda_power(I);
    CHECK(eval_weight(lp, 0) == 1.0);
    CHECK(std::abs(eval_weight(lp, 5) - I) <= 1e-15);

    auto ex = WeightSequence::explicit_list({0.5, 2.0});
    CHECK(eval_weight(ex, 1) == 2.0);
    CHECK_THROWS_AS((void)eval_weight(ex, 2), RangeError);
    WeightStream s(ex);
    (void)s.next();
    (void)s.next();
    CHECK_THROWS_AS((void)s.next(), RangeError);
}

TEST_CASE("trig polynomial invariants") {
    CHECK_THROWS_AS(TrigPolynomial(std::vector<TrigTerm>{}), InputError);
    CHECK_THROWS_AS((TrigPolynomial{{1.0, 1.01}}), InputError);
    TrigPolynomial p{{1.0, I}, {Complex(0, -2), -1.0}};
    CHECK(p.coefficient_bound() == 3.0);
    for (std::uint64_t k = 0; k < 20; ++k) {
        CHECK(std::abs(p(k) - (naive_power(I, k) + Complex(0, -2) * naive_power(-1.0, k))) <= 1e-14);
    }
}

TEST_CASE("stream agrees with direct evaluation") {
    auto lam = unit_phase(0.1234567);
    std::vector<WeightSequence> ws{WeightSequence::periodic({1.0, 0.5, I}), WeightSequence::lambda_power(lam),
                                   WeightSequence::trig_poly(TrigPolynomial{{0.3, lam}, {0.2, -1.0}})};
    for (const auto& w : ws) {
        WeightStream s(w);
        for (std::uint64_t k = 0; k < 300; ++k) CHECK(std::abs(s.next() - eval_weight(w, k)) <= 1e-15);
    }
    WeightStream s(ws[1]);
    for (std::uint64_t k = 0; k < 200; ++k) CHECK(std::abs(s.next() - naive_power(lam, k)) <= 1e-12);
}

TEST_CASE("lambda power drift stays bounded") {
    auto w = WeightSequence::lambda_power(unit_phase(std::sqrt(2.0) - 1.0));
    WeightStream s(w);
    double worst = 0.0;
    for (std::uint64_t k = 0; k <= 1'000'000; ++k) worst = std::max(worst, std::abs(std::abs(s.next()) - 1.0));
    CHECK(worst <= 1e-10);
}

TEST_CASE("besicovitch deviation") {
    TrigPolynomial p{{2.0, I}, {0.5, unit_phase(0.3)}};
    auto self = WeightSequence::trig_poly(p);
    for (std::uint64_t n : {1, 2, 7, 100}) CHECK(besicovitch_deviation(self, p, n) == 0.0);

    TrigPolynomial zero{{0.0, 1.0}};
    auto alt = WeightSequence::periodic({1.0, -1.0});
    for (std::uint64_t n : {1, 2, 3, 50}) CHECK(besicovitch_deviation(alt, zero, n) == doctest::Approx(1.0).epsilon(1e-15));

    auto three = WeightSequence::periodic({1.0, 0.0, 0.0});
    std::vector<Complex> vals{1.0, 0.0, 0.0};
    auto interp = dft_interpolant(vals);
    for (std::uint64_t n = 1; n < 40; ++n) CHECK(besicovitch_deviation(three, interp, n) <= 1e-13);

    CHECK_THROWS_AS((void)besicovitch_deviation(alt, zero, 0), DomainError);
}

TEST_CASE("deviation triangle inequality") {
    Rng rng(4);
    auto w = WeightSequence::periodic({1.0, -0.3, Complex(0.2, 0.4), 0.0, 0.9});
    TrigPolynomial p1{{0.7, unit_phase(0.2)}};
    TrigPolynomial p2{{0.1, unit_phase(0.37)}, {Complex(0, 0.05), -1.0}};
    std::vector<TrigTerm> both(p1.terms().begin(), p1.terms().end());
    both.insert(both.end(), p2.terms().begin(), p2.terms().end());
    TrigPolynomial sum(both);
    for (std::uint64_t n : {1, 10, 100, 1000}) {
        double sup = 0.0;
        for (std::uint64_t k = 0; k < n; ++k) sup = std::max(sup, std::abs(p2(k)));
        const double d = besicovitch_deviation(w, sum, n);
        CHECK(d >= 0.0);
        CHECK(d <= besicovitch_deviation(w, p1, n) + sup + 1e-12);
    }
}

TEST_CASE("limsup estimate samples a geometric grid") {
    auto alt = WeightSequence::periodic({1.0, -1.0});
    auto est = besicovitch_limsup_estimate(alt, TrigPolynomial{{0.0, 1.0}}, 100);
    REQUIRE(est.sample_n.size() == 7);
    CHECK(est.sample_n.front() == 1);
    CHECK(est.sample_n.back() == 64);
    CHECK(est.estimate == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("dft interpolant examples") {
    std::vector<Complex> c{Complex(2, -1)};
    auto p1 = dft_interpolant(c);
    REQUIRE(p1.size() == 1);
    CHECK(p1.terms()[0].z == Complex(2, -1));
    CHECK(p1.terms()[0].lambda == 1.0);

    std::vector<Complex> alt{1.0, -1.0};
    auto p2 = dft_interpolant(alt);
    REQUIRE(p2.size() == 2);
    CHECK(std::abs(p2.terms()[0].z) <= 1e-15);
    CHECK(std::abs(p2.terms()[1].z - 1.0) <= 1e-15);
    CHECK(p2.terms()[1].lambda == -1.0);
    for (std::uint64_t k = 0; k < 10; ++k) CHECK(std::abs(p2(k) - naive_power(-1.0, k)) <= 1e-15);

    std::vector<Complex> quarter{1.0, I, -1.0, -I};
    auto p4 = dft_interpolant(quarter);
    REQUIRE(p4.size() == 4);
    for (std::size_t j = 0; j < 4; ++j) {
        if (j == 1) {
            CHECK(std::abs(p4.terms()[j].z - 1.0) <= 1e-15);
            CHECK(p4.terms()[j].lambda == I);
        } else {
            CHECK(std::abs(p4.terms()[j].z) <= 1e-15);
        }
    }
}

TEST_CASE("dft interpolant reproduces random periodic sequences far out") {
    Rng rng(9);
    for (std::size_t p : {3, 7, 16, 64}) {
        std::vector<Complex> vals(p);
        for (auto& v : vals) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        auto poly = dft_interpolant(vals);
        double worst = 0.0;
        for (std::uint64_t k = 0; k < 100'000; k += 97) worst = std::max(worst, std::abs(poly(k) - vals[k % p]));
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("validate_bound") {
    CHECK(validate_bound(WeightSequence::lambda_power(unit_phase(0.77)), 5000).ok);
    CHECK(WeightSequence::lambda_power(I).bound() == 1.0);

    auto ex = WeightSequence::explicit_list({0.5, 2.0}, 1.0);
    auto r = validate_bound(ex, 10);
    CHECK_FALSE(r.ok);
    REQUIRE(r.first_violation.has_value());
    CHECK(*r.first_violation == 1);
    CHECK(r.max_modulus == 2.0);

    TrigPolynomial p{{0.5, unit_phase(0.1)}, {Complex(0.3, 0.4), unit_phase(0.71)}};
    auto tp = WeightSequence::trig_poly(p);
    CHECK(tp.bound() == doctest::Approx(1.0).epsilon(1e-15));
    auto chk = validate_bound(tp, 10000);
    CHECK(chk.ok);
    CHECK(chk.max_modulus <= 1.0 + 1e-12);

    CHECK(WeightSequence::constant(3.0).normalizer() == 3.0);
    CHECK(WeightSequence::constant(0.5).normalizer() == 1.0);
}
