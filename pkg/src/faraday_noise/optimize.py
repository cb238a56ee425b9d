"""Unit-gain constraint and fidelity optimization over detuning."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .dynamics import ProtocolConfig, simulate_memory
from .errors import InfeasibleError, PoleError
from .scatter import Orientation, assemble

__all__ = [
    "OptimumPoint",
    "solve_kappa",
    "solve_memory",
    "golden_section_max",
    "optimize_fidelity",
    "DETUNING_BOUNDS_MHZ",
]

DETUNING_BOUNDS_MHZ = (1e2, 1e7)
KAPPA_TOL = 1e-10
_KAPPA_GRID = 200
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimumPoint:
    d: float
    detuning: float
    ratio: float
    kappa: float
    fidelity: float
    result: object = None


def _coeffs(atom, F, detuning):
    return assemble(atom, F, None if math.isinf(detuning) else detuning)


def solve_memory(atom, d, detuning, orientation="par", ratio=None, F=None,
                 kappa_max=10.0, coeffs=None):
    """Memory result at the kappa that makes kappa_A = 1.

    The first upward crossing of kappa_A = 1 is bracketed on a uniform grid
    over (0, kappa_max] and refined by bisection.

    Raises
    ------
    InfeasibleError
        If kappa_A stays below 1 on the whole bracket.
    PoleError
        If ``detuning`` sits on a resonance.
    """
    base = ProtocolConfig(atom, detuning, d, orientation, ratio, 1.0, F)
    if coeffs is None:
        coeffs = _coeffs(atom, base.F, detuning)

    def run(kappa):
        return simulate_memory(base.with_kappa(kappa), coeffs)

    def excess(kappa):
        return run(kappa).kappa_A - 1.0

    grid = np.linspace(0.0, kappa_max, _KAPPA_GRID + 1)[1:]
    lo, flo = 0.0, -1.0
    for k in grid:
        fk = excess(k)
        if fk == 0.0:
            return run(k)
        if flo < 0.0 < fk:
            root = bisect(excess, lo, k, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            res = run(root)
            if abs(res.kappa_A - 1.0) >= KAPPA_TOL:
                raise InfeasibleError(f"bisection stalled at kappa_A - 1 = {res.kappa_A - 1.0:.3e}")
            return res
        lo, flo = k, fk
    raise InfeasibleError(
        f"no kappa in (0, {kappa_max}] reaches kappa_A = 1 at d = {d}, detuning = {detuning} MHz"
    )


def solve_kappa(atom, d, detuning, orientation="par", ratio=None, F=None, kappa_max=10.0):
    """kappa solving kappa_A(kappa) = 1 to within 1e-10."""
    return solve_memory(atom, d, detuning, orientation, ratio, F, kappa_max).kappa


def golden_section_max(f, a, b, xtol):
    """Maximize a unimodal ``f`` on [a, b]; returns ``(x, f(x))``."""
    c = b - _INV_PHI * (b - a)
    e = a + _INV_PHI * (b - a)
    fc, fe = f(c), f(e)
    while abs(b - a) > xtol:
        if fc >= fe:
            b, e, fe = e, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + _INV_PHI * (b - a)
            fe = f(e)
    return (c, fc) if fc >= fe else (e, fe)


def _physical(rates):
    # near resonance the canonical spin decay can turn negative (amplification);
    # such points lie outside the model and are skipped
    vals = (rates.gamma_x, rates.gamma_y, rates.Gamma_x, rates.Gamma_y, rates.Gamma_z,
            rates.Gamma_X, rates.Gamma_P)
    return all(v >= 0.0 for v in vals)


def optimize_fidelity(atom, d, orientation="par", F=None, ratio=None,
                      bounds=DETUNING_BOUNDS_MHZ, grid_points=32, red=False,
                      tol=1e-6, kappa_max=10.0):
    """Maximize fidelity over detuning at fixed optical depth.

    A log-spaced scan of ``grid_points`` detunings in ``bounds`` (|Delta| in
    MHz) picks the best cell, which golden-section search then refines in
    log|Delta|. Every candidate is evaluated at the kappa that satisfies
    kappa_A = 1. Candidates within ``tol`` of the best are resolved towards
    larger |Delta|. Detunings where any decay rate (including the canonical
    ones) comes out negative are treated as infeasible.

    Parameters
    ----------
    ratio : float, optional
        Fixed photon-to-atom ratio. By default it follows from the
        scattering closure (see :mod:`faraday_noise.dynamics`).
    red : bool
        Search red (positive) instead of blue (negative) detuning.

    Raises
    ------
    InfeasibleError
        If no detuning in the scan admits kappa_A = 1.
    """
    orientation = Orientation.parse(orientation)
    sign = 1.0 if red else -1.0
    lo, hi = math.log10(bounds[0]), math.log10(bounds[1])
    cache = {}

    def evaluate(logd):
        if logd not in cache:
            det = sign * 10.0 ** logd
            try:
                res = solve_memory(atom, d, det, orientation, ratio, F, kappa_max)
            except (InfeasibleError, PoleError):
                res = None
            if res is not None and not _physical(res.rates):
                res = None
            cache[logd] = res
        return cache[logd]

    def fid(logd):
        res = evaluate(logd)
        return -math.inf if res is None else res.fidelity

    xs = np.linspace(lo, hi, grid_points)
    fs = np.array([fid(x) for x in xs])
    if not np.any(np.isfinite(fs)):
        raise InfeasibleError(f"kappa_A = 1 is not reachable at d = {d} for any scanned detuning")
    fbest = fs.max()
    i = max(n for n in range(len(xs)) if fs[n] >= fbest - tol)
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    x_ref, f_ref = golden_section_max(fid, a, b, xtol=1e-4)
    candidates = [(xs[i], fs[i]), (x_ref, f_ref)]
    top = max(fv for _, fv in candidates)
    x_best = max(x for x, fv in candidates if fv >= top - tol)
    res = evaluate(x_best)
    return OptimumPoint(
        d=d,
        detuning=sign * 10.0 ** x_best,
        ratio=res.ratio,
        kappa=res.kappa,
        fidelity=res.fidelity,
        result=res,
    )
