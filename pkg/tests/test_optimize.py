import math

import numpy as np
import pytest

from faraday_noise.dynamics import IDEAL_FIDELITY
from faraday_noise.errors import InfeasibleError, PoleError
from faraday_noise.optimize import golden_section_max, optimize_fidelity, solve_kappa, solve_memory

R = 10.0


def test_kappa_decreases_towards_one(cs):
    ds = [30, 100, 300, 1000, 3000, 1e4, 1e5]
    ks = [solve_kappa(cs, d, -500.0, "par", ratio=R) for d in ds]
    assert ks[0] > 1.0
    assert all(a > b for a, b in zip(ks, ks[1:]))
    assert abs(ks[-1] - 1.0) < 1e-3


def test_constraint_residual(cs):
    for d, det, ori, ratio in [(50, -500.0, "par", R), (300, -2000.0, "orth", None), (1e4, -1e5, "par", 1.0)]:
        res = solve_memory(cs, d, det, ori, ratio=ratio)
        assert abs(res.kappa_A - 1.0) < 1e-10


def test_infeasible_low_depth(cs):
    with pytest.raises(InfeasibleError):
        solve_kappa(cs, 5.0, -500.0, "par", ratio=R)


def test_pole_propagates(cs):
    with pytest.raises(PoleError):
        solve_kappa(cs, 100.0, 0.1, "par", ratio=R)


def test_golden_section():
    x, fx = golden_section_max(lambda x: -(x - 0.3) ** 2, -2.0, 3.0, xtol=1e-8)
    assert x == pytest.approx(0.3, abs=1e-7)
    assert fx == pytest.approx(0.0, abs=1e-14)


@pytest.fixture(scope="module")
def optima(cs):
    return {(d, o): optimize_fidelity(cs, d, o) for d in (30, 100, 300, 1000, 3000) for o in ("par", "orth")}


def test_optimum_invariants(cs, optima):
    for (d, o), opt in optima.items():
        assert opt.fidelity <= IDEAL_FIDELITY
        assert opt.detuning < 0
        assert 1e2 <= -opt.detuning <= 1e7
        assert abs(opt.result.kappa_A - 1.0) < 1e-8


def test_optimum_monotone_in_depth(optima):
    for o in ("par", "orth"):
        f = [optima[(d, o)].fidelity for d in (30, 100, 300, 1000, 3000)]
        assert all(a <= b for a, b in zip(f, f[1:]))


def test_orthogonal_beats_parallel_at_large_depth(optima):
    for d in (300, 1000, 3000):
        assert optima[(d, "orth")].fidelity >= optima[(d, "par")].fidelity


def test_grid_doubling_invariance(cs, optima):
    base = optima[(100, "par")]
    fine = optimize_fidelity(cs, 100, "par", grid_points=64)
    assert abs(fine.fidelity - base.fidelity) <= 2e-6


@pytest.mark.parametrize("d,o", [(1000, "par"), (100, "orth")])
def test_flat_maximum(cs, optima, d, o):
    opt = optima[(d, o)]
    for factor in (0.8, 1.25):
        f = solve_memory(cs, d, opt.detuning * factor, o).fidelity
        assert opt.fidelity - f < 1e-3
        assert f <= opt.fidelity + 1e-9


def test_negative_canonical_decay_excluded(cs, optima):
    # close to resonance the parallel geometry has Gamma_X < 0; the optimum stops at its edge
    opt = optima[(30, "par")]
    assert opt.result.rates.Gamma_X >= 0.0
    inside = solve_memory(cs, 30, -250.0, "par")
    assert inside.rates.Gamma_X < 0.0


def test_fixed_ratio_optimization(cs):
    opt = optimize_fidelity(cs, 300, "par", ratio=R)
    assert opt.ratio == R
    assert 0.5 < opt.fidelity <= IDEAL_FIDELITY


def test_red_detuning_search(cs):
    opt = optimize_fidelity(cs, 300, "par", red=True, grid_points=16)
    assert opt.detuning > 0


def test_infeasible_optimization(cs):
    with pytest.raises(InfeasibleError):
        optimize_fidelity(cs, 1e-3, "par", grid_points=8)


def test_deterministic(cs, optima):
    again = optimize_fidelity(cs, 30, "orth")
    assert again.fidelity == optima[(30, "orth")].fidelity
    assert again.detuning == optima[(30, "orth")].detuning
    assert math.isfinite(again.kappa)
    assert np.isfinite(again.result.covariance).all()
