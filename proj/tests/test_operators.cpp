#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ergo/errors.hpp"
#include "ergo/operators.hpp"
#include "ergo/random.hpp"

using namespace ergo;

namespace {

// sup over sign vectors g in {-1, +1}^n with |g| <= f of |Tg| at row i,
// scaled by f: the lattice sup restricted to extreme points.
double sign_vector_sup(const KernelOperator& k, const std::vector<double>& f, std::size_t row) {
    const std::size_t n = k.dim();
    double best = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += k.at(row, j).real() * ((mask >> j) & 1 ? f[j] : -f[j]);
        best = std::max(best, std::abs(acc));
    }
    return best;
}

std::vector<Complex> naive_matvec(const KernelOperator& k, const std::vector<Complex>& v) {
    std::vector<Complex> out(k.dim());
    for (std::size_t i = 0; i < k.dim(); ++i)
        for (std::size_t j = 0; j < k.dim(); ++j) out[i] += k.at(i, j) * v[j];
    return out;
}

}  // namespace

TEST_CASE("apply") {
    auto sp = AtomicMeasureSpace::uniform(3);
    MeasurableFunction f(sp, std::vector<double>{1, 2, 3});
    auto id = ergo::apply(KernelOperator::identity(sp), f);
    for (int i = 0; i < 3; ++i) CHECK(id[i] == f[i]);

    auto shifted = ergo::apply(CompositionOperator::cyclic_shift(sp), f);
    CHECK(shifted[0] == 2.0);
    CHECK(shifted[1] == 3.0);
    CHECK(shifted[2] == 1.0);

    auto two = AtomicMeasureSpace::uniform(2);
    KernelOperator k(two, std::vector<std::vector<Complex>>{{0, 1}, {0, 0}});
    auto g = ergo::apply(k, MeasurableFunction(two, std::vector<double>{5, 7}));
    CHECK(g[0] == 7.0);
    CHECK(g[1] == 0.0);

    CHECK_THROWS_AS((void)ergo::apply(k, f), InputError);
    Operator var = k;
    CHECK(ergo::apply(var, MeasurableFunction(two, std::vector<double>{5, 7}))[0] == 7.0);
}

TEST_CASE("composition invariants") {
    auto sp = AtomicMeasureSpace::make({1, 1, 2});
    CHECK_THROWS_AS(CompositionOperator(sp, {0, 1, 2}, {1.0, 1.5, 1.0}), InputError);
    CHECK_THROWS_AS(CompositionOperator(sp, {1, 0, 0}, {1.0, 1.0, 1.0}, true), InputError);
    CHECK_THROWS_AS(CompositionOperator(sp, {2, 1, 0}, {1.0, 1.0, 1.0}, true), InputError);
    CHECK_NOTHROW(CompositionOperator(sp, {1, 0, 2}, {1.0, -1.0, Complex(0, 1)}, true));
}

TEST_CASE("ds certificate examples") {
    auto sp = AtomicMeasureSpace::uniform(2);
    auto perm = CompositionOperator(sp, {1, 0}, {Complex(0, 1), -1.0}, true);
    auto rep = ds_certificate(perm);
    CHECK(rep.passes());
    CHECK(rep.worst_column_sum == 1.0);
    CHECK(rep.worst_row_sum == 1.0);
    auto krep = ds_certificate(perm.to_kernel());
    CHECK(krep.worst_column_sum == 1.0);
    CHECK(krep.worst_row_sum == 1.0);

    KernelOperator bad(sp, std::vector<std::vector<Complex>>{{1, 1}, {0, 0}});
    auto b = ds_certificate(bad);
    CHECK_FALSE(b.linf_ok);
    CHECK(b.worst_row_sum == 2.0);

    KernelOperator good(sp, std::vector<std::vector<Complex>>{{0.5, 0.25}, {0.25, 0.5}});
    auto g = ds_certificate(good, *sp);
    CHECK(g.passes());
    CHECK(g.worst_column_sum == 0.75);
    CHECK(g.worst_row_sum == 0.75);

    CHECK_THROWS_AS((void)ds_certificate(good, *AtomicMeasureSpace::uniform(3)), InputError);
}

TEST_CASE("ds certificate uses the weights") {
    // column sums w_i |K_ij| / w_j: column 0 is (1*0 + 2*1)/1 = 2
    auto sp = AtomicMeasureSpace::make({1, 2});
    KernelOperator k(sp, std::vector<std::vector<Complex>>{{0, 1}, {1, 0}});
    auto rep = ds_certificate(k);
    CHECK(rep.linf_ok);
    CHECK_FALSE(rep.l1_ok);
    CHECK(rep.worst_column_sum == 2.0);
}

TEST_CASE("certified kernels contract L1 and Linf") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        auto sp = random_space(rng, 12);
        auto k = random_ds_kernel(rng, sp, trial % 2 == 1, 0.6);
        REQUIRE(ds_certificate(k).passes());
        for (int r = 0; r < 100; ++r) {
            auto f = random_function(rng, sp, -1, 1, true);
            auto tf = ergo::apply(k, f);
            CHECK(norm(tf, NormKind::L1) <= norm(f, NormKind::L1) + 1e-12);
            CHECK(norm(tf, NormKind::Linf) <= norm(f, NormKind::Linf) + 1e-12);
            if (r < 5) CHECK(majorizes(f, tf).holds);
        }
    }
}

TEST_CASE("linear modulus") {
    auto sp = AtomicMeasureSpace::uniform(2);
    KernelOperator k(sp, std::vector<std::vector<Complex>>{{0.3, -0.4}, {-0.2, 0.1}});
    auto mod = linear_modulus(k);
    auto mf = ergo::apply(mod, MeasurableFunction(sp, std::vector<double>{1, 1}));
    CHECK(mf[0].real() == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(mf[1].real() == doctest::Approx(0.3).epsilon(1e-15));
    const std::vector<double> ones{1, 1};
    CHECK(std::abs(mf[0].real() - sign_vector_sup(k, ones, 0)) <= 1e-15);
    CHECK(std::abs(mf[1].real() - sign_vector_sup(k, ones, 1)) <= 1e-15);

    KernelOperator pos(sp, std::vector<std::vector<Complex>>{{0.3, 0.4}, {0.2, 0.1}});
    auto pm = linear_modulus(pos);
    for (std::size_t i = 0; i < 4; ++i) CHECK(pm.matrix()[i] == pos.matrix()[i]);
}

TEST_CASE("linear modulus matches sign-vector sup on real kernels") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng.index(8);
        auto sp = random_space(rng, n);
        auto k = random_kernel(rng, sp);
        std::vector<double> f(n);
        for (auto& x : f) x = rng.uniform();
        auto mf = ergo::apply(linear_modulus(k), MeasurableFunction(sp, f));
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(mf[i].real() - sign_vector_sup(k, f, i)) <= 1e-12);
    }
}

TEST_CASE("complex modulus against a phase grid") {
    auto sp = AtomicMeasureSpace::uniform(2);
    KernelOperator k(sp, std::vector<std::vector<Complex>>{{std::polar(0.4, 0.7), std::polar(0.3, -2.1)},
                                                           {std::polar(0.25, 1.3), std::polar(0.5, 0.2)}});
    const std::vector<double> f{0.8, 0.6};
    auto exact = ergo::apply(linear_modulus(k), MeasurableFunction(sp, f));
    double prev_err = 1e300;
    for (int phases : {16, 64, 256}) {
        double worst_err = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            double best = 0.0;
            for (int a = 0; a < phases; ++a)
                for (int b = 0; b < phases; ++b) {
                    const Complex g0 = std::polar(f[0], 2 * std::numbers::pi * a / phases);
                    const Complex g1 = std::polar(f[1], 2 * std::numbers::pi * b / phases);
                    best = std::max(best, std::abs(k.at(i, 0) * g0 + k.at(i, 1) * g1));
                }
            CHECK(best <= exact[i].real() + 1e-12);
            worst_err = std::max(worst_err, exact[i].real() - best);
        }
        if (phases == 64) CHECK(worst_err < 1e-3);
        CHECK(worst_err <= prev_err);
        prev_err = worst_err;
    }
}

TEST_CASE("adjoint") {
    auto unit = AtomicMeasureSpace::uniform(2);
    KernelOperator c(unit, std::vector<std::vector<Complex>>{{Complex(1, 2), 3}, {Complex(0, -1), 4}});
    auto ca = adjoint(c);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(ca.at(i, j) == std::conj(c.at(j, i)));

    auto w = AtomicMeasureSpace::make({1, 2});
    KernelOperator k(w, std::vector<std::vector<Complex>>{{0, 1}, {0, 0}});
    auto ka = adjoint(k);
    CHECK(ka.at(0, 0) == 0.0);
    CHECK(ka.at(0, 1) == 0.0);
    CHECK(ka.at(1, 0) == 0.5);
    CHECK(ka.at(1, 1) == 0.0);
    MeasurableFunction f(w, std::vector<double>{0, 1});
    MeasurableFunction g(w, std::vector<double>{1, 0});
    CHECK(pairing(ergo::apply(k, f), g) == 1.0);
    CHECK(pairing(f, ergo::apply(ka, g)) == 1.0);

    KernelOperator sym(unit, std::vector<std::vector<Complex>>{{0.2, 0.3}, {0.3, 0.1}});
    auto sa = adjoint(sym);
    for (std::size_t i = 0; i < 4; ++i) CHECK(sa.matrix()[i] == sym.matrix()[i]);
}

TEST_CASE("adjoint duality, involution and DS transfer") {
    Rng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        auto sp = random_space(rng, 1 + rng.index(10));
        auto k = random_kernel(rng, sp, true);
        auto ka = adjoint(k);
        auto f = random_function(rng, sp, -1, 1, true);
        auto g = random_function(rng, sp, -1, 1, true);
        CHECK(std::abs(pairing(ergo::apply(ka, f), g) - pairing(f, ergo::apply(k, g))) <= 1e-12);
        auto kaa = adjoint(ka);
        for (std::size_t i = 0; i < k.matrix().size(); ++i) CHECK(std::abs(kaa.matrix()[i] - k.matrix()[i]) <= 1e-12);
        CHECK(adjoint_modulus_commutation(k));

        auto ds = random_ds_kernel(rng, sp, true);
        CHECK(ds_certificate(adjoint(ds)).passes());

        auto mod = ds_certificate(linear_modulus(k));
        auto raw = ds_certificate(k);
        CHECK(mod.worst_row_sum == raw.worst_row_sum);
        CHECK(mod.worst_column_sum == raw.worst_column_sum);
    }
}

TEST_CASE("adjoint modulus commutation on a weighted complex kernel") {
    Rng rng(2);
    auto sp = AtomicMeasureSpace::make({1, 2, 0.5});
    auto k = random_kernel(rng, sp, true);
    CHECK(adjoint_modulus_commutation(k));
    auto lhs = linear_modulus(adjoint(k));
    auto rhs = adjoint(linear_modulus(k));
    for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(lhs.matrix()[i] - rhs.matrix()[i]) <= 1e-12);
}

TEST_CASE("modulus domination") {
    auto sp = AtomicMeasureSpace::uniform(2);
    KernelOperator pos(sp, std::vector<std::vector<Complex>>{{0.3, 0.4}, {0.2, 0.1}});
    auto eq = modulus_domination_check(pos, MeasurableFunction(sp, std::vector<double>{1, 2}), 6);
    CHECK(eq.holds);
    CHECK(std::abs(eq.min_slack) <= 1e-12);

    // K = D|K|D with D = diag(1, -1) and f = D 1, so |K^k f| = |K|^k |f| exactly.
    KernelOperator k(sp, std::vector<std::vector<Complex>>{{0.3, -0.4}, {-0.2, 0.1}});
    auto tight = modulus_domination_check(k, MeasurableFunction(sp, std::vector<double>{1, -1}), 5);
    CHECK(tight.holds);
    CHECK(std::abs(tight.min_slack) <= 1e-12);

    auto loose = modulus_domination_check(k, MeasurableFunction(sp, std::vector<double>{1, 1}), 1);
    CHECK(loose.holds);
    CHECK(loose.min_slack == doctest::Approx(0.2).epsilon(1e-12));  // min(0.7 - 0.1, 0.3 - 0.1)

    auto perm = CompositionOperator(sp, {1, 0}, {-1.0, -1.0}, true).to_kernel();
    auto iso = modulus_domination_check(perm, MeasurableFunction(sp, std::vector<double>{3, -5}), 7);
    CHECK(iso.holds);
    CHECK(iso.min_slack == 0.0);

    CHECK_THROWS_AS((void)modulus_domination_check(k, MeasurableFunction(sp, std::vector<double>{1, 1}), 0),
                    DomainError);
}

TEST_CASE("modulus domination holds on random kernels") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        auto sp = random_space(rng, 6);
        auto k = random_kernel(rng, sp, trial % 2 == 0);
        auto r = modulus_domination_check(k, random_function(rng, sp, -1, 1, true), 6);
        CHECK(r.holds);
        CHECK(r.min_slack >= -1e-9);
    }
}

TEST_CASE("counterexample operator") {
    const std::size_t bp[] = {1, 5};
    auto op = build_counterexample_operator(bp, 1, 6);
    const double expect[] = {-1, 1, 1, 1, -1, 1};
    for (std::size_t i = 0; i < 5; ++i) CHECK(op.multiplier()[i] == expect[i]);
    CHECK(op.multiplier()[5] == 0.0);
    for (std::size_t i = 0; i < 6; ++i) CHECK(counterexample_sign(bp, i) == (i == 0 || i == 4 ? -1 : 1));

    auto one = MeasurableFunction::constant(op.space_ptr(), 1.0);
    auto t1 = ergo::apply(op, one);
    for (std::size_t i = 0; i < 5; ++i) CHECK(t1[i] == expect[i]);

    CHECK(ds_certificate(op).passes());
    CHECK_THROWS_AS((void)build_counterexample_operator(bp, 1, 4), InputError);

    const std::size_t bp3[] = {1, 5, 17};
    auto fine = build_counterexample_operator(bp3, 4, 20);
    CHECK(fine.dim() == 80);
    CHECK(fine.space().weight(0) == 0.25);
    CHECK(ds_certificate(fine).passes());
    for (std::size_t i = 0; i < 80; ++i) {
        const auto m = fine.multiplier()[i];
        CHECK((m == 1.0 || m == -1.0 || m == 0.0));
        if (i + 4 < 80) {
            CHECK(fine.point_map()[i] == i + 4);
            CHECK(m.real() == counterexample_sign(bp3, i / 4));
        } else {
            CHECK(m == 0.0);
        }
    }
}

TEST_CASE("apply_into matches a naive product") {
    Rng rng(8);
    auto sp = random_space(rng, 9);
    auto k = random_kernel(rng, sp, true);
    auto f = random_function(rng, sp, -1, 1, true);
    std::vector<Complex> in(f.values().begin(), f.values().end()), out(9);
    apply_into(Operator{k}, in, out);
    auto ref = naive_matvec(k, in);
    for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(out[i] - ref[i]) <= 1e-15);
}
