"""Spontaneous-emission decay and noise coefficients.

The spin starts in the stretched state |F, F> along the lab x axis, which is
the quantization axis of the spherical basis. Lab axes map onto spherical
components as

    x_lab -> q0,    y_lab -> (e_-1 - e_+1)/sqrt2,    z_lab -> i(e_+1 + e_-1)/sqrt2

for both light polarization and spin operators. ``par`` means light
polarized along the spin (x); ``orth`` means light polarized along y.

Every expectation value needed here is bilinear in the tensor coefficients,
``sum_{c,c'} a_c a_c' W[c, c']``, where the weights ``W`` come from chains of
Clebsch-Gordan coefficients acting on |F, F> and do not depend on detuning.
They are computed once per manifold and cached.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError, FaradayError
from .polarizability import TensorCoeffs, _a_from_factors, c_coeff, resonance_factors
from .wigner import HalfInt, cg2

__all__ = [
    "Orientation",
    "SphericalMatrix",
    "ScatteringCoeffs",
    "CommutatorCheck",
    "alpha2_spherical",
    "alpha2_cartesian",
    "zeta2",
    "xi_j",
    "xi_decay",
    "assemble",
    "closed_form_cs",
    "closed_form_cs_tensor",
    "noise_commutator",
    "AXES",
]

AXES = ("x", "y", "z")
SPHERICAL = (-1, 0, 1)
IMAG_TOL = 1e-12

_R2 = 1.0 / math.sqrt(2.0)
# lab unit vectors in the spherical basis, keyed by spherical index
_LAB = {
    "x": {0: 1.0},
    "y": {-1: _R2, 1: -_R2},
    "z": {1: 1j * _R2, -1: 1j * _R2},
}


class Orientation(str, Enum):
    PAR = "par"
    ORTH = "orth"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "par": cls.PAR, "parallel": cls.PAR, "∥": cls.PAR, "x": cls.PAR,
            "orth": cls.ORTH, "orthogonal": cls.ORTH, "perp": cls.ORTH, "⊥": cls.ORTH, "y": cls.ORTH,
        }
        try:
            return aliases[key]
        except KeyError:
            raise DomainError(
                f"orientation must be 'par' or 'orth', got {value!r}; mixed geometries are not supported"
            ) from None

    @property
    def light_axis(self):
        return "x" if self is Orientation.PAR else "y"


class SphericalMatrix:
    """3x3 complex matrix indexed by spherical components p, q in {-1, 0, 1}."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        arr = np.asarray(entries, dtype=complex)
        if arr.shape != (3, 3):
            raise ValueError(f"expected a 3x3 array, got shape {arr.shape}")
        self.entries = arr

    def __getitem__(self, pq):
        p, q = pq
        return self.entries[p + 1, q + 1]

    def project(self, u, v):
        """Contract with lab vectors ``u`` (left) and ``v`` (right) given as {index: weight}."""
        return sum(wu * wv * self[p, q] for p, wu in u.items() for q, wv in v.items())

    def cartesian(self, a, b):
        return self.project(_LAB[a], _LAB[b])

    def is_hermitian(self, tol=0.0):
        return bool(np.all(np.abs(self.entries - self.entries.conj().T) <= tol))

    def __repr__(self):
        return f"SphericalMatrix({self.entries!r})"


# -- sublevel contraction engine ---------------------------------------------

def _channels(tF, grounds):
    """(F~, k) pairs of tensor couplings out of manifold F."""
    chans = []
    for tFt in grounds:
        for k in (0, 1, 2):
            if k == 2 and tF < 2:
                continue
            if tFt != tF and k == 0:
                continue
            if abs(tF - tFt) <= 2 * k <= tF + tFt:
                chans.append((tFt, k))
    return tuple(chans)


class _Engine:
    """Sparse application of alpha and spin operators to sublevel kets."""

    def __init__(self, tF, grounds):
        self.tF = tF
        self.channels = _channels(tF, grounds)
        self._cinv = [1.0 / c_coeff(k, HalfInt(tF)) for _, k in self.channels]
        self._rows = {}
        self._spin = math.sqrt(tF / 2 * (tF / 2 + 1))

    def _alpha_row(self, ci, p, q, state):
        key = ("a", ci, p, q, state)
        row = self._rows.get(key)
        if row is not None:
            return row
        tFt, k = self.channels[ci]
        tF = self.tF
        tG, tn = state
        row = []
        # polarization part of the rank-k tensor, F -> F~ block
        if tG == tF:
            tl = 2 * (q - p)
            cpol = cg2(2, 2 * p, 2 * k, tl, 2, 2 * q)
            if cpol:
                tn2 = tn + tl
                c = cg2(tF, tn, 2 * k, tl, tFt, tn2)
                if c:
                    row.append(((tFt, tn2), cpol * c * self._cinv[ci]))
        # Hermitian partner block F~ -> F
        if tG == tFt and tFt != tF:
            tl = 2 * (p - q)
            cpol = cg2(2, 2 * q, 2 * k, tl, 2, 2 * p)
            if cpol:
                tm = tn - tl
                c = cg2(tF, tm, 2 * k, tl, tFt, tn)
                if c:
                    row.append(((tF, tm), cpol * c * self._cinv[ci]))
        row = tuple(row)
        self._rows[key] = row
        return row

    def _spin_row(self, mu, state):
        key = ("j", mu, state)
        row = self._rows.get(key)
        if row is not None:
            return row
        tG, tn = state
        row = ()
        if tG == self.tF:
            tn2 = tn + 2 * mu
            c = cg2(self.tF, tn, 2, 2 * mu, self.tF, tn2)
            if c:
                row = (((tG, tn2), self._spin * c),)
        self._rows[key] = row
        return row

    def _apply(self, vec, rowfn, *args):
        out = {}
        for state, amp in vec.items():
            for target, m in rowfn(*args, state):
                out[target] = out.get(target, 0.0) + amp * m
        return out

    def word_weights(self, word):
        """Weights W[p, q, c1, c2] = <F F| word |F F> with unit channel amplitudes.

        ``word`` is a tuple of tokens read left to right: ``"a"`` for the
        polarizability (exactly two) and spherical indices for spin
        components. The left ``a`` carries polarization indices (p, r), the
        right one (r, q), summed over r.
        """
        nch = len(self.channels)
        W = np.zeros((3, 3, nch, nch))
        ia = [i for i, t in enumerate(word) if t == "a"]
        if len(ia) != 2:
            raise ValueError("word must contain exactly two alpha tokens")
        left, right = ia
        stretched = (self.tF, self.tF)
        for q in SPHERICAL:
            for r in SPHERICAL:
                for c2 in range(nch):
                    vec = {stretched: 1.0}
                    # apply tokens right to left up to and including the right alpha
                    for tok in word[:right:-1]:
                        vec = self._apply(vec, self._spin_row, tok)
                    vec = self._apply(vec, self._alpha_row, c2, r, q)
                    for tok in word[right - 1:left:-1]:
                        vec = self._apply(vec, self._spin_row, tok)
                    if not vec:
                        continue
                    for p in SPHERICAL:
                        for c1 in range(nch):
                            out = self._apply(vec, self._alpha_row, c1, p, r)
                            for tok in word[left - 1::-1] if left > 0 else ():
                                out = self._apply(out, self._spin_row, tok)
                            val = out.get(stretched, 0.0)
                            if val:
                                W[p + 1, q + 1, c1, c2] += val
        return W


@lru_cache(maxsize=None)
def _engine(tF, grounds):
    return _Engine(tF, grounds)


@lru_cache(maxsize=None)
def _weights(tF, grounds, word):
    W = _engine(tF, grounds).word_weights(word)
    W.setflags(write=False)
    return W


def _zeta_words(mu, nu):
    # zeta_mu zeta_nu = -[a j_mu a j_nu - a j_mu j_nu a - j_mu a a j_nu + j_mu a j_nu a]
    return ((("a", mu, "a", nu), -1.0), (("a", mu, nu, "a"), 1.0),
            ((mu, "a", "a", nu), 1.0), ((mu, "a", nu, "a"), -1.0))


def _xi_words(mu, nu):
    # xi_mu j_nu with xi_mu = a a j_mu + j_mu a a - 2 a j_mu a
    return ((("a", "a", mu, nu), 1.0), ((mu, "a", "a", nu), 1.0), (("a", mu, "a", nu), -2.0))


# -- detuning-dependent pieces -------------------------------------------------

def _manifold(atom, F):
    F = atom.F if F is None else HalfInt.of(F)
    tF = F.twice_value
    grounds = tuple(g.twice_value for g in atom.ground_manifolds)
    if tF not in grounds:
        raise DomainError(f"F = {F} is not a ground manifold of {atom.name}")
    if tF < 2:
        raise DomainError("scattering coefficients need F >= 1")
    return tF, grounds


def _channel_amplitudes(atom, tF, grounds, detuning):
    """Tensor coefficients a_k^{F F~} ordered like the engine channels."""
    factors = resonance_factors(atom, HalfInt(tF), detuning)
    eng = _engine(tF, grounds)
    return np.array([_a_from_factors(atom, tF, tFt, k, factors) for tFt, k in eng.channels])


def _contract(tF, grounds, terms, amps):
    M = np.zeros((3, 3))
    for word, coef in terms:
        M += coef * np.einsum("pqij,i,j->pq", _weights(tF, grounds, word), amps, amps)
    return M


def _real(value, what):
    value = complex(value)
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
        raise FaradayError(f"{what} has imaginary residue {value.imag:.3e}")
    return value.real


def alpha2_spherical(atom, F=None, detuning=None):
    """Light-attenuation matrix <alpha^2>_pq in the stretched state."""
    tF, grounds = _manifold(atom, F)
    amps = _channel_amplitudes(atom, tF, grounds, detuning)
    return SphericalMatrix(_contract(tF, grounds, ((("a", "a"), 1.0),), amps))


def alpha2_cartesian(atom, F=None, detuning=None):
    """Return ``(xx, yy, xy)`` lab projections of <alpha^2>."""
    M = alpha2_spherical(atom, F, detuning)
    return tuple(_real(M.cartesian(a, b), f"<alpha^2>_{a}{b}") for a, b in (("x", "x"), ("y", "y"), ("x", "y")))


def zeta2(atom, F, detuning, mu, nu):
    """Spin-noise matrix <zeta_mu zeta_nu>_pq for spherical spin indices mu, nu."""
    tF, grounds = _manifold(atom, F)
    amps = _channel_amplitudes(atom, tF, grounds, detuning)
    return SphericalMatrix(_contract(tF, grounds, _zeta_words(mu, nu), amps))


def xi_j(atom, F, detuning, mu, nu):
    """Spin-decay contraction <xi_mu j_nu>_pq for spherical indices mu, nu."""
    tF, grounds = _manifold(atom, F)
    amps = _channel_amplitudes(atom, tF, grounds, detuning)
    return SphericalMatrix(_contract(tF, grounds, _xi_words(mu, nu), amps))


def _spin_cartesian(tF, grounds, amps, words_of, a, b, light):
    """Lab-frame <O_a O_b> for spin axes a, b and light polarization ``light``."""
    total = 0j
    for mu, wa in _LAB[a].items():
        for nu, wb in _LAB[b].items():
            M = SphericalMatrix(_contract(tF, grounds, words_of(mu, nu), amps))
            total += wa * wb * M.cartesian(light, light)
    return total


def _jj(tF, axis):
    f = tF / 2
    return f * f if axis == "x" else f / 2


def _orientation_values(tF, grounds, amps):
    xi, z2 = {}, {}
    for ori in Orientation:
        for ax in AXES:
            light = ori.light_axis
            val = _spin_cartesian(tF, grounds, amps, _xi_words, ax, ax, light)
            xi[(ax, ori.value)] = _real(val, f"<xi_{ax} j_{ax}>") / _jj(tF, ax)
            val = _spin_cartesian(tF, grounds, amps, _zeta_words, ax, ax, light)
            z2[(ax, ori.value)] = _real(val, f"<zeta_{ax}^2>")
    return xi, z2


def xi_decay(atom, F=None, detuning=None):
    """Decay contractions Xi_i = <xi_i j_i>/<j_i^2> keyed by (axis, orientation)."""
    tF, grounds = _manifold(atom, F)
    amps = _channel_amplitudes(atom, tF, grounds, detuning)
    return _orientation_values(tF, grounds, amps)[0]


@dataclass(frozen=True)
class ScatteringCoeffs:
    """Normalized light decay (A), spin decay (B) and spin noise (C) coefficients.

    A, B and C are the raw expectation values divided by ``F * a1**2``.
    ``B`` and ``C`` map ``(axis, orientation)`` with axis in x/y/z and
    orientation ``"par"`` or ``"orth"``.
    """

    detuning: float
    F: float
    a1: float
    A_x: float
    A_y: float
    B: dict = field(repr=False)
    C: dict = field(repr=False)
    alpha2_xx: float = 0.0
    alpha2_yy: float = 0.0
    alpha2_xy: float = 0.0
    xi: dict = field(default_factory=dict, repr=False)
    zeta2: dict = field(default_factory=dict, repr=False)

    def A(self, axis):
        return {"x": self.A_x, "y": self.A_y}[axis]

    def B_(self, axis, orientation):
        return self.B[(axis, Orientation.parse(orientation).value)]

    def C_(self, axis, orientation):
        return self.C[(axis, Orientation.parse(orientation).value)]

    def as_row(self):
        """Flat mapping in a fixed column order."""
        row = {"A_x": self.A_x, "A_y": self.A_y}
        for ori in ("par", "orth"):
            for ax in AXES:
                row[f"B_{ax}_{ori}"] = self.B[(ax, ori)]
        for ori in ("par", "orth"):
            for ax in AXES:
                row[f"C_{ax}_{ori}"] = self.C[(ax, ori)]
        row.update(alpha2_xx=self.alpha2_xx, alpha2_yy=self.alpha2_yy, alpha2_xy=self.alpha2_xy)
        return row


def assemble(atom, F=None, detuning=None):
    """All normalized coefficients for ``atom`` pumped into ``F`` at ``detuning``.

    ``detuning=None`` gives the far-detuned limit.
    """
    tF, grounds = _manifold(atom, F)
    amps = _channel_amplitudes(atom, tF, grounds, detuning)
    eng = _engine(tF, grounds)
    a1 = amps[eng.channels.index((tF, 1))]
    if a1 == 0.0:
        raise DomainError("a1 vanishes; coefficients are normalized by a1^2")
    f = tF / 2
    norm = f * a1 * a1
    M = SphericalMatrix(_contract(tF, grounds, ((("a", "a"), 1.0),), amps))
    xx = _real(M.cartesian("x", "x"), "<alpha^2>_xx")
    yy = _real(M.cartesian("y", "y"), "<alpha^2>_yy")
    xy = _real(M.cartesian("x", "y"), "<alpha^2>_xy")
    xi, z2 = _orientation_values(tF, grounds, amps)
    return ScatteringCoeffs(
        detuning=-math.inf if detuning is None else float(detuning),
        F=f,
        a1=float(a1),
        A_x=xx / norm,
        A_y=yy / norm,
        B={key: v / norm for key, v in xi.items()},
        C={key: v / norm for key, v in z2.items()},
        alpha2_xx=xx,
        alpha2_yy=yy,
        alpha2_xy=xy,
        xi=xi,
        zeta2=z2,
    )


class CommutatorCheck(NamedTuple):
    """Two routes to the commutator of the y/z spin noise, per unit kappa^2/d.

    ``from_decay`` is (B_y + B_z - B_x)/F; ``from_noise`` is
    2 Im<[zeta_y, zeta_z]>/(F^3 a1^2). ``anticommutator`` is
    |<{zeta_y, zeta_z}>|/(F a1^2).
    """

    from_decay: float
    from_noise: float
    anticommutator: float


def noise_commutator(atom, F=None, detuning=None, orientation="par"):
    ori = Orientation.parse(orientation)
    tF, grounds = _manifold(atom, F)
    amps = _channel_amplitudes(atom, tF, grounds, detuning)
    coeffs = assemble(atom, HalfInt(tF), detuning)
    f = tF / 2
    light = ori.light_axis
    yz = _spin_cartesian(tF, grounds, amps, _zeta_words, "y", "z", light)
    zy = _spin_cartesian(tF, grounds, amps, _zeta_words, "z", "y", light)
    comm = yz - zy
    if abs(comm.real) > IMAG_TOL * max(1.0, abs(comm.imag)):
        raise FaradayError(f"<[zeta_y, zeta_z]> has real residue {comm.real:.3e}")
    a1sq = coeffs.a1 ** 2
    b = coeffs.B
    v = ori.value
    return CommutatorCheck(
        from_decay=(b[("y", v)] + b[("z", v)] - b[("x", v)]) / f,
        from_noise=2.0 * comm.imag / (f ** 3 * a1sq),
        anticommutator=abs(yz + zy) / (f * a1sq),
    )


# -- cesium D2, F = 4 closed forms ---------------------------------------------

def closed_form_cs_tensor(detuning, d45, d35):
    """Closed-form Cs (F = 4) tensor coefficients.

    ``d45`` and ``d35`` are the splittings of F' = 4 and F' = 3 below F' = 5.
    """
    if detuning is None or math.isinf(detuning):
        u4 = u3 = 1.0
        det = -math.inf
    else:
        u4 = 1.0 / (1.0 - d45 / detuning)
        u3 = 1.0 / (1.0 - d35 / detuning)
        det = float(detuning)
    a0 = 7.0 / 144.0 * (44.0 / 21.0 + u4 + u3 / 3.0)
    a1 = 7.0 / 5760.0 * (176.0 / 7.0 - 3.0 * u4 - 5.0 * u3)
    a2 = 1.0 / 5760.0 * (16.0 - 21.0 * u4 + 5.0 * u3)
    b1 = (5.0 * u4 + 3.0 * u3) / (128.0 * math.sqrt(5.0))
    b2 = 3.0 * (u4 - u3) / (128.0 * math.sqrt(77.0))
    return TensorCoeffs(a0, a1, a2, b1, b2, det)


def closed_form_cs(detuning, coeffs):
    """Cs (F = 4) coefficients from explicit polynomials in a0, a1, a2, b1, b2."""
    a0, a1, a2, b1, b2 = coeffs.as_tuple()
    if a1 == 0.0:
        raise DomainError("a1 vanishes; coefficients are normalized by a1^2")
    r = math.sqrt(77.0 / 5.0)
    s = a1 * a1
    A_x = (a0**2 + 4*s + 56*a1*a2 - 112/3*a0*a2 + 4900/9*a2**2
           + 140/9*(b1**2 + 77/5*b2**2 + 2*r*b1*b2)) / (4*s)
    A_y = (a0**2 + 18*s - 28*a1*a2 + 56/3*a0*a2 + 2170/9*a2**2
           + 70/9*(b1**2 + 539/15*b2**2 - 2*r*b1*b2)) / (4*s)
    Bxp = (s + 14*a2*a1 + 49*a2**2 + 140/9*(b1**2 + 77/5*b2**2 + 2*r*b1*b2)) / (2*s)
    Byp = (s - 98*a2*a1 + 273*a2**2
           + 245/9*(b1**2 + 55/3*b2**2 + 2*math.sqrt(55/7)*b1*b2)) / (4*s)
    Bxo = (s - 14*a2*a1 + 105*a2**2 + 140/9*(b1**2 + 539/15*b2**2 - 2*r*b1*b2)) / (4*s)
    Byo = (s + 56*a2*a1 - 35*a2**2 + 175/18*(b1**2 + 693/25*b2**2 - 2/5*r*b1*b2)) / (2*s)
    Cxp = (s + 14*a2*a1 + 49*a2**2 + 560/9*(b1**2 + 77/5*b2**2 + 2*r*b1*b2)) / s
    Cyp = (4*s + 308*a2**2 + 35/6*(b1**2 + 1001/45*b2**2 + 2/3*r*b1*b2)) / s
    Cxo = (s - 14*a2*a1 + 161*a2**2 + 560/9*(b1**2 + 539/15*b2**2 - 2*r*b1*b2)) / (2*s)
    Cyo = (9*s - 14*a2*a1 + 63*a2**2 + 175/18*(b1**2 + 693/25*b2**2 - 2/5*r*b1*b2)) / (2*s)
    Czo = (s + 14*a2*a1 + 651*a2**2 + 175/18*(b1**2 + 693/25*b2**2 - 2/5*r*b1*b2)) / (2*s)
    B = {("x", "par"): Bxp, ("y", "par"): Byp, ("z", "par"): Byp,
         ("x", "orth"): Bxo, ("y", "orth"): Byo, ("z", "orth"): Bxo}
    C = {("x", "par"): Cxp, ("y", "par"): Cyp, ("z", "par"): Cyp,
         ("x", "orth"): Cxo, ("y", "orth"): Cyo, ("z", "orth"): Czo}
    norm = 4.0 * s
    det = -math.inf if detuning is None else float(detuning)
    return ScatteringCoeffs(
        detuning=det, F=4.0, a1=a1, A_x=A_x, A_y=A_y, B=B, C=C,
        alpha2_xx=A_x * norm, alpha2_yy=A_y * norm, alpha2_xy=0.0,
        xi={k: v * norm for k, v in B.items()},
        zeta2={k: v * norm for k, v in C.items()},
    )
