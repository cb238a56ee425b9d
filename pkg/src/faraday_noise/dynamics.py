"""Gaussian direct-mapping quantum memory with decay and noise.

Light and atomic quadratures are linear functions of their inputs plus
independent Langevin noise, so one pass is fully described by a gain matrix
on ``(X_L, P_L, X_A, P_A)`` and the output noise variances. Coherent inputs
have variance 1/2 in every quadrature.

Rates are integrated over the pulse and dimensionless:

* light decay      ``gamma_mu = 2 (kappa^2/d) A_mu / r``
* spin decay       ``Gamma_i = (kappa^2/d) B_i``
* atomic noise     ``<F_X^2> = (2/F)(kappa^2/d) C_y``, ``<F_P^2> = (2/F)(kappa^2/d) C_z``

where ``r = N_p/N_a``. When ``r`` is not given it follows from the
scattering closure ``r = 8 Delta^2 kappa^2 / (d^2 gamma^2 F a1^2)``, with
``gamma = (2J'+1) gamma_rad``, which makes the light loss independent of
``kappa``: ``gamma_mu = (d/4)(gamma/Delta)^2 <alpha^2>_mu``.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import DomainError, FaradayError
from .scatter import Orientation, assemble
from .wigner import HalfInt

__all__ = [
    "ProtocolConfig",
    "DecayRates",
    "AtomicNoise",
    "MemoryResult",
    "DeficitCoefficients",
    "closure_linewidth_MHz",
    "photon_ratio",
    "decay_rates",
    "atomic_noise",
    "h",
    "transfer_gains",
    "propagate_memory",
    "simulate_memory",
    "fidelity_approx",
    "deficit_coefficients",
    "mean_field_rotation",
    "IDEAL_FIDELITY",
]

IDEAL_FIDELITY = math.sqrt(2.0 / 3.0)


@dataclass(frozen=True)
class ProtocolConfig:
    """One memory configuration.

    ``ratio=None`` selects the scattering closure for r (see module doc).
    """

    atom: object
    detuning: float
    d: float
    orientation: Orientation = Orientation.PAR
    ratio: float = None
    kappa: float = 1.0
    F: HalfInt = None

    def __post_init__(self):
        object.__setattr__(self, "orientation", Orientation.parse(self.orientation))
        object.__setattr__(self, "F", self.atom.F if self.F is None else HalfInt.of(self.F))
        if not (self.d > 0 and math.isfinite(self.d)):
            raise DomainError(f"optical depth must be positive and finite, got {self.d}")
        if self.ratio is not None and not (self.ratio > 0 and math.isfinite(self.ratio)):
            raise DomainError(f"photon ratio must be positive and finite, got {self.ratio}")
        if not (self.kappa >= 0 and math.isfinite(self.kappa)):
            raise DomainError(f"kappa must be non-negative and finite, got {self.kappa}")

    def with_kappa(self, kappa):
        return replace(self, kappa=kappa)


@dataclass(frozen=True)
class DecayRates:
    gamma_x: float
    gamma_y: float
    Gamma_x: float
    Gamma_y: float
    Gamma_z: float

    @property
    def Gamma_X(self):
        return self.Gamma_y - self.Gamma_x / 2.0

    @property
    def Gamma_P(self):
        return self.Gamma_z - self.Gamma_x / 2.0

    def scaled(self, factor):
        return DecayRates(*(factor * v for v in (self.gamma_x, self.gamma_y, self.Gamma_x,
                                                  self.Gamma_y, self.Gamma_z)))

    @classmethod
    def zero(cls):
        return cls(0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class AtomicNoise:
    """Langevin noise powers of the atomic quadratures, <F_X^2> and <F_P^2>."""

    F_X2: float
    F_P2: float

    def scaled(self, factor):
        return AtomicNoise(factor * self.F_X2, factor * self.F_P2)

    @classmethod
    def zero(cls):
        return cls(0.0, 0.0)


@dataclass(frozen=True)
class MemoryResult:
    """Outcome of one memory pass.

    ``mean_map`` is 2x4: rows (X_A^out, P_A'^out), columns the input means
    (X_L, P_L, X_A, P_A). ``noise`` holds the four channel variances
    ``F_XL``, ``F_PL``, ``F_XA``, ``F_PA``.
    """

    kappa: float
    kappa_L: float
    kappa_A: float
    nu: float
    rates: DecayRates
    atomic: AtomicNoise
    noise: dict
    mean_map: np.ndarray = field(repr=False)
    covariance: np.ndarray = field(repr=False)
    var_X: float = 0.0
    var_P: float = 0.0
    fidelity: float = 0.0
    ratio: float = None

    def output_means(self, X_L=0.0, P_L=0.0, X_A=0.0, P_A=0.0):
        return tuple(self.mean_map @ np.array([X_L, P_L, X_A, P_A], dtype=float))


def closure_linewidth_MHz(atom):
    """Linewidth entering the scattering closure, (2J'+1) gamma_rad."""
    return (atom.Jp.twice_value + 1) * atom.gamma_rad_MHz


def photon_ratio(config, a1):
    """r = N_p/N_a: the configured value, or the scattering closure."""
    if config.ratio is not None:
        return config.ratio
    if not math.isfinite(config.detuning):
        return math.inf
    g = closure_linewidth_MHz(config.atom)
    f = float(config.F)
    return 8.0 * config.detuning ** 2 * config.kappa ** 2 / (config.d ** 2 * g ** 2 * f * a1 * a1)


def _light_axes(orientation):
    # (strong field, quantum field) polarization axes
    return ("x", "y") if orientation is Orientation.PAR else ("y", "x")


def decay_rates(config, coeffs):
    """Integrated decay rates for ``config`` from normalized coefficients."""
    k2d = config.kappa ** 2 / config.d
    strong, quantum = _light_axes(config.orientation)
    ori = config.orientation.value
    if config.ratio is None:
        if not math.isfinite(config.detuning):
            gx = gy = 0.0
        else:
            pref = config.d / 4.0 * (closure_linewidth_MHz(config.atom) / config.detuning) ** 2
            norm = float(config.F) * coeffs.a1 ** 2
            gx = pref * coeffs.A(strong) * norm
            gy = pref * coeffs.A(quantum) * norm
    else:
        gx = 2.0 * k2d * coeffs.A(strong) / config.ratio
        gy = 2.0 * k2d * coeffs.A(quantum) / config.ratio
    return DecayRates(
        gamma_x=gx,
        gamma_y=gy,
        Gamma_x=k2d * coeffs.B[("x", ori)],
        Gamma_y=k2d * coeffs.B[("y", ori)],
        Gamma_z=k2d * coeffs.B[("z", ori)],
    )


def atomic_noise(config, coeffs):
    k2d = config.kappa ** 2 / config.d
    ori = config.orientation.value
    f = float(config.F)
    return AtomicNoise(2.0 / f * k2d * coeffs.C[("y", ori)], 2.0 / f * k2d * coeffs.C[("z", ori)])


def h(x):
    """(1 - exp(-x))/x, continuous through x = 0."""
    x = float(x)
    if abs(x) < 1e-4:
        return 1.0 - x / 2.0 + x * x / 6.0 - x ** 3 / 24.0
    return -math.expm1(-x) / x


def transfer_gains(rates, kappa):
    """Return ``(kappa_L, kappa_A)`` for the decay-corrected interaction."""
    kL = (kappa * h((rates.Gamma_x + 2.0 * rates.Gamma_P) / 2.0)
          * h((rates.gamma_x - rates.gamma_y) / 2.0) * math.exp(-rates.gamma_y / 2.0))
    kA = (kappa * h((rates.Gamma_x - 2.0 * rates.Gamma_X) / 2.0)
          * h((rates.gamma_x + rates.gamma_y) / 2.0) * math.exp(-rates.Gamma_X))
    return kL, kA


def propagate_memory(rates, atomic, kappa, gains=None, nu=None, ratio=None):
    """Propagate coherent-state means and variances through one memory pass.

    Parameters
    ----------
    rates : DecayRates
    atomic : AtomicNoise
        Noise powers of the atomic Langevin forces.
    kappa : float
        Coupling constant.
    gains : (float, float), optional
        ``(kappa_L, kappa_A)``; computed from ``rates`` when omitted.
    nu : float, optional
        Feedback gain, ``exp(gamma_y/2)`` by default so the P mean is restored.

    Returns
    -------
    MemoryResult
    """
    kL, kA = transfer_gains(rates, kappa) if gains is None else gains
    if nu is None:
        nu = math.exp(rates.gamma_y / 2.0)
    noise = {
        "F_XL": rates.gamma_y / 2.0 + kappa ** 2 / 3.0 * atomic.F_P2,
        "F_PL": rates.gamma_y / 2.0,
        "F_XA": atomic.F_X2 + kappa ** 2 / 6.0 * rates.gamma_y,
        "F_PA": atomic.F_P2,
    }
    eX = math.exp(-rates.Gamma_X)
    eP = math.exp(-rates.Gamma_P)
    M = np.array([
        [0.0, kA, eX, 0.0],
        [-nu * math.exp(-rates.gamma_y / 2.0), 0.0, 0.0, eP - nu * kL],
    ])
    added = np.diag([noise["F_XA"], noise["F_PA"] + nu ** 2 * noise["F_XL"]])
    cov = 0.5 * M @ M.T + added
    var_X, var_P = float(cov[0, 0]), float(cov[1, 1])
    if var_X < 0 or var_P < 0 or not (math.isfinite(var_X) and math.isfinite(var_P)):
        raise FaradayError(f"invalid output variances ({var_X}, {var_P}); inconsistent inputs")
    fid = 1.0 / math.sqrt((0.5 + var_X) * (0.5 + var_P))
    return MemoryResult(
        kappa=kappa, kappa_L=kL, kappa_A=kA, nu=nu, rates=rates, atomic=atomic, noise=noise,
        mean_map=M, covariance=cov, var_X=var_X, var_P=var_P, fidelity=fid, ratio=ratio,
    )


def simulate_memory(config, coeffs=None):
    """Rates, noise and propagation for ``config`` at its own kappa."""
    if coeffs is None:
        det = None if math.isinf(config.detuning) else config.detuning
        coeffs = assemble(config.atom, config.F, det)
    rates = decay_rates(config, coeffs)
    noise = atomic_noise(config, coeffs)
    return propagate_memory(rates, noise, config.kappa, ratio=photon_ratio(config, coeffs.a1))


def fidelity_approx(rates, atomic):
    """First-order fidelity for small decay and noise."""
    return IDEAL_FIDELITY * (
        1.0 - 11.0 / 36.0 * rates.gamma_y
        - (atomic.F_X2 + 2.0 * atomic.F_P2 - rates.Gamma_X) / 3.0
    )


@dataclass(frozen=True)
class DeficitCoefficients:
    """Fidelity deficit coefficients.

    ``c_A`` multiplies 1/d for the atomic part at kappa = 1;
    ``c_L = (11/12) A`` of the quantum-field polarization.
    """

    c_L: float
    c_A: float


def deficit_coefficients(coeffs, orientation):
    ori = Orientation.parse(orientation)
    v = ori.value
    f = coeffs.F
    _, quantum = _light_axes(ori)
    c_A = (2.0 / f * (coeffs.C[("y", v)] + 2.0 * coeffs.C[("z", v)])
           - (coeffs.B[("y", v)] - coeffs.B[("x", v)] / 2.0)) / 3.0
    return DeficitCoefficients(c_L=11.0 / 12.0 * coeffs.A(quantum), c_A=c_A)


# -- mean-field Faraday rotation ----------------------------------------------

def _rotate(vec, omega, dt):
    angle = omega * dt
    if not np.any(angle):
        return vec
    return Rotation.from_rotvec(angle).apply(vec)


def mean_field_rotation(spin_means, stokes_in, coeffs, rotation_strength, steps=1000):
    """Integrate the coupled mean-field rotations of Stokes and spin vectors.

    Operator products are factorized into products of means. Each step
    rotates the Stokes vector about ``gamma = (-a2 (jx^2 - jy^2),
    -2 a2 jx jy, a1 jz)`` and the spin vector about the axis generating its
    (norm-preserving) velocity, so both lengths are conserved exactly up to
    rounding.

    Parameters
    ----------
    spin_means, stokes_in : array_like, shape (3,)
    coeffs : TensorCoeffs
        Only ``a1`` and ``a2`` enter.
    rotation_strength : float
        Coupling times interaction length (or time).
    steps : int

    Returns
    -------
    stokes_out, spin_out : ndarray, shape (3,)
    """
    j = np.asarray(spin_means, dtype=float).copy()
    S = np.asarray(stokes_in, dtype=float).copy()
    if j.shape != (3,) or S.shape != (3,):
        raise DomainError("spin and Stokes vectors must have three components")
    if not (np.all(np.isfinite(j)) and np.all(np.isfinite(S)) and math.isfinite(rotation_strength)):
        raise DomainError("mean-field inputs must be finite")
    if int(steps) < 1:
        raise DomainError("steps must be >= 1")
    steps = int(steps)
    a1, a2 = coeffs.a1, coeffs.a2
    dt = rotation_strength / steps
    if dt == 0.0:
        return S, j
    S0 = float(np.linalg.norm(S))
    for _ in range(steps):
        jx, jy, jz = j
        gamma = np.array([-a2 * (jx * jx - jy * jy), -2.0 * a2 * jx * jy, a1 * jz])
        S_new = _rotate(S, gamma, dt)
        Sx, Sy, Sz = S
        v = np.array([
            a2 * 2 * jy * jz * Sx - a2 * 2 * jx * jz * Sy - a1 * jy * Sz - a2 * 2 * jy * jz * S0,
            a2 * 2 * jx * jz * Sx + a2 * 2 * jy * jz * Sy + a1 * jx * Sz + a2 * 2 * jx * jz * S0,
            -2 * a2 * 2 * jx * jy * Sx + 2 * a2 * (jx * jx - jy * jy) * Sy,
        ])
        jn2 = float(j @ j)
        if jn2 > 0.0:
            j = _rotate(j, np.cross(j, v) / jn2, dt)
        S = S_new
    return S, j
