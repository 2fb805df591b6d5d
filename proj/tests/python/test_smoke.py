import cmath
import math

import pytest

import ergo


def test_rearrangement_and_norms():
    sp = ergo.AtomicMeasureSpace([2.0, 1.0, 0.5])
    f = ergo.MeasurableFunction(sp, [0.5, 0.5, 2.0])
    r = ergo.rearrangement(f)
    assert r.values == [2.0, 0.5]
    assert r.breakpoints == [0.0, 0.5, 3.5]
    assert ergo.hl_integral(r, 1.0) == pytest.approx(1.25, abs=1e-15)
    assert ergo.norm(f, ergo.NormKind.L1) == pytest.approx(2.5)
    assert ergo.luxemburg_norm(f, ergo.OrliczFunction.power(1)) == pytest.approx(2.5, rel=1e-11)
    with pytest.raises(ergo.DomainError):
        ergo.hl_integral(r, 0.0)


def test_majorization_witness():
    sp = ergo.AtomicMeasureSpace.uniform(3)
    res = ergo.majorizes(ergo.MeasurableFunction(sp, [1, 1, 1]), ergo.MeasurableFunction(sp, [3, 0, 0]))
    assert not res
    assert res.at == 1.0


def test_operators():
    sp = ergo.AtomicMeasureSpace([1.0, 2.0])
    k = ergo.KernelOperator(sp, [[0, 1], [0, 0]])
    assert ergo.adjoint(k).matrix == [[0, 0], [0.5, 0]]
    assert ergo.ds_certificate(ergo.KernelOperator(sp, [[0.5, 0.25], [0.1, 0.5]])).passes()
    shift = ergo.CompositionOperator(ergo.AtomicMeasureSpace.uniform(3), [1, 2, 0], [1, 1, 1], True)
    g = ergo.apply(shift, ergo.MeasurableFunction(shift.space, [1, 2, 3]))
    assert g.values == [2, 3, 1]
    with pytest.raises(ergo.InputError):
        ergo.CompositionOperator(sp, [0, 0], [1, 1], True)


def test_cesaro_on_full_cycle():
    sp = ergo.AtomicMeasureSpace.uniform(4)
    shift = ergo.CompositionOperator(sp, [1, 2, 3, 0], [1, 1, 1, 1], True)
    rep = ergo.cesaro(shift, ergo.MeasurableFunction(sp, [1, 2, 3, 6]), ergo.Checkpoints([4, 8]), probes=[0, 3])
    for rec in rep.records:
        assert all(abs(v - 3) < 1e-15 for v in rec.average.values)
        assert rec.majorized


def test_weighted_normalizer():
    sp = ergo.AtomicMeasureSpace.uniform(2)
    ident = ergo.KernelOperator(sp, [[1, 0], [0, 1]])
    f = ergo.MeasurableFunction(sp, [1, -2])
    rep = ergo.weighted(ident, f, ergo.WeightSequence.constant(3), ergo.Checkpoints([1, 2]))
    assert rep.normalizer == 3
    assert ergo.majorization_trace(rep, f) == [True, True]


def test_weights():
    p = ergo.dft_interpolant([1, 1j, -1, -1j])
    assert abs(p(7) - 1j**7) < 1e-15
    assert ergo.eval_weight(ergo.WeightSequence.periodic([1, -1]), 7) == -1
    assert not ergo.validate_bound(ergo.WeightSequence.explicit_list([0.5, 2.0], 1.0), 2)


def test_sweep_matches_closed_form():
    sys = ergo.PointSystem.rotation(16, 3)
    f = ergo.character(sys.space)
    cps = ergo.Checkpoints([1, 10, 100])
    res = ergo.wiener_wintner_sweep(sys, f, [0, 5], 8, cps)
    for j, lam in enumerate(res.lambdas):
        for p, omega in enumerate([0, 5]):
            for c, n in enumerate(cps.values):
                oracle = ergo.rotation_closed_form(3 / 16, lam, omega / 16, n)
                assert abs(res.values[j][p][c] - oracle) < 1e-9


def test_counterexample():
    r = ergo.Rearrangement([0.0, 100.0], [1.0])
    cert = ergo.construct_breakpoints(r, 0.1, 3)
    assert cert.breakpoints == [1, 5, 17]
    check = ergo.verify_certificate(cert, r)
    assert check.verified
    assert check.stage_margins[1] == pytest.approx(0.1)
    cert.breakpoints = [1, 4, 17]
    assert ergo.verify_certificate(cert, r).failed_stage == 2
    with pytest.raises(ergo.WindowError):
        ergo.construct_breakpoints(ergo.Rearrangement([0.0, 20.0], [1.0]), 0.1, 4)
