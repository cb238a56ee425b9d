"""Irreducible tensor decomposition of the ground-state polarizability.

Within the pumped manifold F the polarizability (in units of -d0^2/Delta) is
``a0 + a1 T1 + a2 T2``; the coupling to another ground manifold F~ carries
``b1 T1 + b2 T2`` (no scalar part).
"""
import math
from dataclasses import dataclass

from .errors import DomainError, PoleError
from .wigner import HalfInt, sixj2

__all__ = [
    "POLE_GUARD_MHZ",
    "TensorCoeffs",
    "c_coeff",
    "a_coeff",
    "resonance_factors",
    "tensor_coeffs",
    "asymptotic_coeffs",
    "other_manifold",
]

POLE_GUARD_MHZ = 0.5


@dataclass(frozen=True)
class TensorCoeffs:
    """Tensor coefficients at one detuning (``detuning`` is ``-inf`` for the limit)."""

    a0: float
    a1: float
    a2: float
    b1: float
    b2: float
    detuning: float

    def as_tuple(self):
        return (self.a0, self.a1, self.a2, self.b1, self.b2)


def c_coeff(k, F):
    """Normalization c_k of the rank-k tensor built from spin operators.

    >>> c_coeff(1, 4) == 1 / math.sqrt(40)
    True
    """
    f = float(HalfInt.of(F))
    if k == 0:
        return 1.0
    if f < 0.5:
        raise DomainError(f"c_{k} needs F >= 1/2, got F = {f}")
    if k == 1:
        return 1.0 / math.sqrt(2.0 * f * (f + 1.0))
    if k == 2:
        if f < 1.0:
            raise DomainError(f"c_2 needs F >= 1, got F = {f}")
        return 3.0 / math.sqrt(10.0 * f * (f + 1.0) * (2.0 * f - 1.0) * (2.0 * f + 3.0))
    raise DomainError(f"tensor rank must be 0, 1 or 2, got {k}")


def _check_pole(levels, detuning):
    # zero detuning is the pole of the reference level
    if detuning is None or math.isinf(detuning):
        return
    if not math.isfinite(detuning):
        raise DomainError(f"detuning must be finite or infinite, got {detuning}")
    for fp, delta in levels:
        if abs(detuning - delta) <= POLE_GUARD_MHZ:
            raise PoleError(
                f"detuning {detuning} MHz is within {POLE_GUARD_MHZ} MHz of the F' = {fp} resonance",
                level=fp,
                detuning=detuning,
            )


def resonance_factors(atom, F, detuning):
    """Map F' -> 1/(1 - delta_F'/Delta) for levels coupled to ``F``.

    ``detuning=None`` or an infinite value gives the far-detuned limit (all 1).
    """
    levels = atom.coupled_levels(F)
    _check_pole(levels, detuning)
    if detuning is None or math.isinf(detuning):
        return {fp.twice_value: 1.0 for fp, _ in levels}
    return {fp.twice_value: 1.0 / (1.0 - delta / detuning) for fp, delta in levels}


def _phase(twice):
    # (-1)**(twice/2) for an integral twice/2
    return -1.0 if (twice // 2) % 2 else 1.0


def _a_from_factors(atom, tF, tFt, k, factors):
    tJ, tJp, tI = atom.J.twice_value, atom.Jp.twice_value, atom.I.twice_value
    tk = 2 * k
    total = 0.0
    for tfp, u in factors.items():
        w = (
            sixj2(tJp, tfp, tI, tF, tJ, 2)
            * sixj2(tJp, tfp, tI, tFt, tJ, 2)
            * sixj2(tF, tk, tFt, 2, tfp, 2)
        )
        if w:
            # (-1)^(F + F') is integral even when F and F' are not
            total += _phase(tF + tfp) * (tfp + 1) * u * w
    return -(2 * k + 1) * c_coeff(k, HalfInt(tF)) * math.sqrt((tF + 1) / 3.0) * total


def a_coeff(atom, F, Ft, k, detuning):
    """Coefficient of the rank-k tensor coupling manifold F to manifold F~.

    Parameters
    ----------
    atom : AtomSpec
    F, Ft : half-integer
        Ground manifolds; ``F`` is the one the tensor is normalized to.
    k : int
        Tensor rank 0, 1 or 2.
    detuning : float or None
        Delta in MHz; ``None``/``-inf`` gives the far-detuned limit.

    Raises
    ------
    PoleError
        If ``detuning`` is within :data:`POLE_GUARD_MHZ` of a resonance.
    """
    tF, tFt = HalfInt.of(F).twice_value, HalfInt.of(Ft).twice_value
    grounds = {g.twice_value for g in atom.ground_manifolds}
    if tF not in grounds or tFt not in grounds:
        raise DomainError(f"F = {F} and F~ = {Ft} must both be ground manifolds of {atom.name}")
    factors = resonance_factors(atom, HalfInt(tF), detuning)
    return _a_from_factors(atom, tF, tFt, k, factors)


def other_manifold(atom, F):
    """The partner manifold F~ used for the b coefficients (F-1 if it exists)."""
    tF = HalfInt.of(F).twice_value
    grounds = [g.twice_value for g in atom.ground_manifolds]
    for cand in (tF - 2, tF + 2):
        if cand in grounds:
            return HalfInt(cand)
    return None


def tensor_coeffs(atom, F=None, detuning=None):
    """All five named coefficients for manifold ``F`` (defaults to ``atom.F``)."""
    F = atom.F if F is None else HalfInt.of(F)
    tF = F.twice_value
    factors = resonance_factors(atom, F, detuning)
    a = [_a_from_factors(atom, tF, tF, k, factors) if (k < 2 or tF >= 2) else 0.0 for k in range(3)]
    Ft = other_manifold(atom, F)
    if Ft is None:
        b = [0.0, 0.0]
    else:
        b = [_a_from_factors(atom, tF, Ft.twice_value, k, factors) if (k < 2 or tF >= 2) else 0.0
             for k in (1, 2)]
    det = -math.inf if detuning is None else float(detuning)
    return TensorCoeffs(a[0], a[1], a[2], b[0], b[1], det)


def asymptotic_coeffs(atom, F=None):
    """Far-detuned limit: every resonance factor replaced by 1."""
    return tensor_coeffs(atom, F, None)
