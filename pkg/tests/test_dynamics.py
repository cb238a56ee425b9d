import math

import numpy as np
import pytest
from scipy.optimize import brentq

from faraday_noise.dynamics import (IDEAL_FIDELITY, AtomicNoise, DecayRates, ProtocolConfig,
                                    atomic_noise, closure_linewidth_MHz, decay_rates,
                                    deficit_coefficients, fidelity_approx, h, mean_field_rotation,
                                    photon_ratio, propagate_memory, simulate_memory, transfer_gains)
from faraday_noise.errors import DomainError
from faraday_noise.polarizability import asymptotic_coeffs, tensor_coeffs
from faraday_noise.scatter import assemble

BASE_RATES = dict(gamma_x=0.02, gamma_y=0.02, Gamma_x=0.05, Gamma_y=0.04, Gamma_z=0.04)
BASE_NOISE = dict(F_X2=0.03, F_P2=0.03)


def test_h_values():
    assert h(0.0) == 1.0
    assert h(1.0) == pytest.approx(1 - math.exp(-1), rel=1e-15)
    assert 0.0 < h(1e3) < 1.1e-3
    assert h(-1.0) == pytest.approx(math.e - 1, rel=1e-15)
    for x in (9.99e-5, 1.0001e-4, -9.99e-5, -1.0001e-4, 1e-8):
        assert h(x) == pytest.approx(-math.expm1(-x) / x, rel=1e-14)


def test_rates_example(cs):
    coeffs = assemble(cs, 4, None)
    cfg = ProtocolConfig(cs, -math.inf, 30.0, "par", ratio=10.0, kappa=1.0)
    r = decay_rates(cfg, coeffs)
    assert r.Gamma_x == pytest.approx(29 / 2 / 30, rel=1e-12)
    assert r.gamma_y == pytest.approx(2 / 300 * 24, rel=1e-12)
    assert r.Gamma_X == pytest.approx(r.Gamma_y - r.Gamma_x / 2)
    assert r.Gamma_P == pytest.approx(r.Gamma_z - r.Gamma_x / 2)


def test_rates_scale_with_kappa_squared(cs):
    coeffs = assemble(cs, 4, -900.0)
    for ratio in (None, 5.0):
        cfg = ProtocolConfig(cs, -900.0, 100.0, "orth", ratio=ratio, kappa=0.7)
        r1 = decay_rates(cfg, coeffs)
        r2 = decay_rates(cfg.with_kappa(1.4), coeffs)
        for name in ("Gamma_x", "Gamma_y", "Gamma_z"):
            assert getattr(r2, name) == pytest.approx(4 * getattr(r1, name), rel=1e-14)
        n1, n2 = atomic_noise(cfg, coeffs), atomic_noise(cfg.with_kappa(1.4), coeffs)
        assert n2.F_X2 == pytest.approx(4 * n1.F_X2, rel=1e-14)
        if ratio is not None:
            assert r2.gamma_y == pytest.approx(4 * r1.gamma_y, rel=1e-14)
        else:
            # the closure makes the light loss independent of kappa
            assert r2.gamma_y == pytest.approx(r1.gamma_y, rel=1e-14)
        zero = decay_rates(cfg.with_kappa(0.0), coeffs)
        assert zero.Gamma_x == zero.Gamma_y == zero.Gamma_z == 0.0


def test_closure_matches_explicit_ratio(cs):
    coeffs = assemble(cs, 4, -700.0)
    cfg = ProtocolConfig(cs, -700.0, 200.0, "par", kappa=1.1)
    r = photon_ratio(cfg, coeffs.a1)
    assert closure_linewidth_MHz(cs) == pytest.approx(4 * 5.234)
    explicit = decay_rates(ProtocolConfig(cs, -700.0, 200.0, "par", ratio=r, kappa=1.1), coeffs)
    closed = decay_rates(cfg, coeffs)
    assert closed.gamma_x == pytest.approx(explicit.gamma_x, rel=1e-12)
    assert closed.gamma_y == pytest.approx(explicit.gamma_y, rel=1e-12)


def test_orientation_swaps_light_axes(cs):
    coeffs = assemble(cs, 4, -700.0)
    par = decay_rates(ProtocolConfig(cs, -700.0, 50.0, "par", ratio=3.0), coeffs)
    orth = decay_rates(ProtocolConfig(cs, -700.0, 50.0, "orth", ratio=3.0), coeffs)
    assert par.gamma_x == pytest.approx(orth.gamma_y)
    assert par.gamma_y == pytest.approx(orth.gamma_x)


def test_zero_decay_ideal_memory():
    res = propagate_memory(DecayRates.zero(), AtomicNoise.zero(), 1.0)
    assert res.kappa_L == res.kappa_A == 1.0
    assert res.nu == 1.0
    assert abs(res.fidelity - IDEAL_FIDELITY) <= 1e-12
    assert res.output_means(X_L=0.3, P_L=-1.7) == (-1.7, -0.3)
    assert res.var_X == 1.0 and res.var_P == 0.5


def test_means_transfer_with_decay():
    rates = DecayRates(**BASE_RATES)
    res = propagate_memory(rates, AtomicNoise(**BASE_NOISE), 1.1)
    assert res.mean_map[1, 0] == pytest.approx(-1.0, abs=1e-15)
    assert res.nu == pytest.approx(math.exp(rates.gamma_y / 2))
    assert res.mean_map[0, 1] == res.kappa_A


def test_variance_formulas():
    rates, noise = DecayRates(**BASE_RATES), AtomicNoise(**BASE_NOISE)
    k = 1.2
    res = propagate_memory(rates, noise, k)
    kL, kA = transfer_gains(rates, k)
    nu = math.exp(rates.gamma_y / 2)
    FXL = rates.gamma_y / 2 + k * k / 3 * noise.F_P2
    FXA = noise.F_X2 + k * k / 6 * rates.gamma_y
    var_X = math.exp(-2 * rates.Gamma_X) / 2 + kA ** 2 / 2 + FXA
    var_P = ((math.exp(-rates.Gamma_P) - nu * kL) ** 2 / 2 + nu ** 2 * math.exp(-rates.gamma_y) / 2
             + noise.F_P2 + nu ** 2 * FXL)
    assert res.var_X == pytest.approx(var_X, rel=1e-14)
    assert res.var_P == pytest.approx(var_P, rel=1e-14)
    assert res.fidelity == pytest.approx(1 / math.sqrt((0.5 + var_X) * (0.5 + var_P)), rel=1e-14)


def test_gains_shrink_with_decay():
    rates = DecayRates(**BASE_RATES)
    kL, kA = transfer_gains(rates, 1.0)
    assert kL < 1.0 and kA < 1.0
    assert transfer_gains(DecayRates.zero(), 0.8) == (0.8, 0.8)


def _solved_fidelity(rates, noise):
    # kappa with kappa_A = 1 when every rate scales as kappa^2
    def excess(k):
        return transfer_gains(rates.scaled(k * k), k)[1] - 1.0
    ks = np.linspace(1e-3, 5.0, 500)
    vals = [excess(k) for k in ks]
    i = next(n for n in range(len(ks) - 1) if vals[n] < 0.0 < vals[n + 1])
    k = brentq(excess, ks[i], ks[i + 1], xtol=1e-15)
    return propagate_memory(rates.scaled(k * k), noise.scaled(k * k), k).fidelity


@pytest.mark.parametrize("name", ["gamma_x", "gamma_y", "Gamma_x", "Gamma_z", "F_X2", "F_P2"])
def test_fidelity_monotone_in_rate(name):
    fs = []
    for s in np.linspace(0.0, 0.15, 13):
        b, n = dict(BASE_RATES), dict(BASE_NOISE)
        (b if name in b else n)[name] = s
        fs.append(_solved_fidelity(DecayRates(**b), AtomicNoise(**n)))
    assert np.all(np.diff(fs) <= 1e-15)


def test_gamma_y_direction_follows_first_order_formula():
    # Gamma_X damps the input atomic noise; both exact and approximate fidelity rise with it
    lo, hi = dict(BASE_RATES), dict(BASE_RATES)
    hi["Gamma_y"] += 0.02
    noise = AtomicNoise(**BASE_NOISE)
    exact = _solved_fidelity(DecayRates(**hi), noise) - _solved_fidelity(DecayRates(**lo), noise)
    approx = fidelity_approx(DecayRates(**hi), noise) - fidelity_approx(DecayRates(**lo), noise)
    assert exact > 0 and approx > 0


def _residual(scale):
    rates = DecayRates(0.05, 0.08, 0.06, 0.07, 0.05).scaled(scale)
    noise = AtomicNoise(0.04, 0.05).scaled(scale)
    kA_target = 1.0

    def excess(k):
        return transfer_gains(rates, k)[1] - kA_target
    k = brentq(excess, 0.5, 2.0, xtol=1e-15)
    exact = propagate_memory(rates, noise, k).fidelity
    return abs(exact - fidelity_approx(rates, noise))


def test_first_order_fidelity_scaling():
    r1, r2, r3 = _residual(1.0), _residual(0.5), _residual(0.25)
    assert r1 / r2 >= 3.5
    assert r2 / r3 >= 3.5


def test_deficit_coefficients(cs):
    coeffs = assemble(cs, 4, -1e9)
    par = deficit_coefficients(coeffs, "par")
    orth = deficit_coefficients(coeffs, "orth")
    assert par.c_A == pytest.approx(11 / 2, rel=1e-6)
    assert orth.c_A == pytest.approx(41 / 12, rel=1e-6)
    assert par.c_L == pytest.approx(11 / 12 * 24, rel=1e-6)


def test_simulate_memory_end_to_end(cs):
    res = simulate_memory(ProtocolConfig(cs, -800.0, 300.0, "orth", ratio=20.0, kappa=1.05))
    assert 0.0 < res.fidelity < IDEAL_FIDELITY
    assert res.var_X > 0 and res.var_P > 0
    assert res.ratio == 20.0


@pytest.mark.parametrize("kwargs", [dict(d=0.0), dict(d=math.inf), dict(ratio=-1.0), dict(kappa=-0.1),
                                    dict(orientation="diag")])
def test_config_validation(cs, kwargs):
    base = dict(atom=cs, detuning=-500.0, d=10.0, orientation="par", ratio=None, kappa=1.0)
    base.update(kwargs)
    with pytest.raises(DomainError):
        ProtocolConfig(**base)


# -- mean-field rotation --------------------------------------------------------

def test_meanfield_conserves_norms(cs):
    coeffs = tensor_coeffs(cs, 4, -700.0)
    S0 = np.array([1.0, 0.2, -0.1])
    j0 = np.array([3.9, 0.3, 0.4])
    S, j = mean_field_rotation(j0, S0, coeffs, 5.0, steps=10_000)
    assert abs(np.linalg.norm(S) - np.linalg.norm(S0)) <= 1e-10
    assert abs(np.linalg.norm(j) - np.linalg.norm(j0)) <= 1e-10
    assert not np.allclose(S, S0)


def test_meanfield_pure_faraday(cs):
    coeffs = asymptotic_coeffs(cs, 4)
    S, j = mean_field_rotation([0.0, 0.0, 4.0], [1.0, 0.0, 0.0], coeffs, 10.0, steps=100)
    angle = coeffs.a1 * 4.0 * 10.0
    assert S == pytest.approx([math.cos(angle), math.sin(angle), 0.0], abs=1e-12)
    assert j == pytest.approx([0.0, 0.0, 4.0], abs=1e-15)


def test_meanfield_small_angle(cs):
    coeffs = tensor_coeffs(cs, 4, -700.0)
    errs = []
    for s in (1e-2, 5e-3, 2.5e-3):
        S, _ = mean_field_rotation([0.0, 0.0, 4.0], [1.0, 0.0, 0.0], coeffs, s, steps=50)
        assert S[2] == 0.0
        errs.append(abs(S[1] - coeffs.a1 * 1.0 * 4.0 * s))
    assert errs[0] / errs[1] >= 3.5 and errs[1] / errs[2] >= 3.5


def test_meanfield_zero_strength(cs):
    coeffs = tensor_coeffs(cs, 4, -700.0)
    S, j = mean_field_rotation([1.0, 2.0, 3.0], [0.5, 0.5, 0.5], coeffs, 0.0)
    assert list(S) == [0.5, 0.5, 0.5] and list(j) == [1.0, 2.0, 3.0]


def test_meanfield_rejects_bad_input(cs):
    coeffs = tensor_coeffs(cs, 4, -700.0)
    with pytest.raises(DomainError):
        mean_field_rotation([np.nan, 0, 0], [1, 0, 0], coeffs, 1.0)
    with pytest.raises(DomainError):
        mean_field_rotation([1, 0], [1, 0, 0], coeffs, 1.0)
    with pytest.raises(DomainError):
        mean_field_rotation([1, 0, 0], [1, 0, 0], coeffs, math.inf)
    with pytest.raises(DomainError):
        mean_field_rotation([1, 0, 0], [1, 0, 0], coeffs, 1.0, steps=0)
