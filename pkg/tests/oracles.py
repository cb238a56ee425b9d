"""Independent reference computations for the test-suite.

``BruteForceAtom`` builds the ground-state polarizability as explicit
matrices in the uncoupled |J mJ>|I mI> basis: dipole matrix elements come from
sympy Clebsch-Gordan coefficients and hyperfine projectors from diagonalizing
F^2. No 6j symbols, no reduced sums and nothing from the package under test.
"""
from fractions import Fraction

import numpy as np
from sympy import Rational
from sympy.physics.wigner import clebsch_gordan as sympy_cg


def _rat(x):
    x = Fraction(x)
    return Rational(x.numerator, x.denominator)


def _mrange(j):
    j = Fraction(j)
    return [-j + k for k in range(int(2 * j) + 1)]


def _spin_matrices(j):
    ms = _mrange(j)
    n = len(ms)
    jz = np.diag([float(m) for m in ms]).astype(complex)
    jp = np.zeros((n, n), complex)
    for a, m in enumerate(ms[:-1]):
        jp[a + 1, a] = np.sqrt(float(j * (j + 1) - m * (m + 1)))
    return [(jp + jp.conj().T) / 2, (jp - jp.conj().T) / 2j, jz]


def _total(j1, j2):
    A, B = _spin_matrices(j1), _spin_matrices(j2)
    n1, n2 = A[0].shape[0], B[0].shape[0]
    return [np.kron(a, np.eye(n2)) + np.kron(np.eye(n1), b) for a, b in zip(A, B)]


def _projector(ops, f):
    F2 = sum(o @ o for o in ops)
    w, v = np.linalg.eigh(F2)
    sel = np.abs(w - float(f * (f + 1))) < 1e-8
    V = v[:, sel]
    return V @ V.conj().T


class BruteForceAtom:
    """Explicit-matrix polarizability of an alkali-like line.

    Parameters
    ----------
    I, J, Jp : Fraction-like
    splittings : dict
        F' -> splitting in MHz below the reference level.
    """

    # lab axis -> quantization-frame Cartesian index (x_lab is the quantization axis)
    LAB = (2, 0, 1)

    def __init__(self, I, J, Jp, splittings):
        self.I, self.J, self.Jp = Fraction(I), Fraction(J), Fraction(Jp)
        self.splittings = {Fraction(k): float(v) for k, v in splittings.items()}
        gb = [(mj, mi) for mj in _mrange(self.J) for mi in _mrange(self.I)]
        eb = [(mj, mi) for mj in _mrange(self.Jp) for mi in _mrange(self.I)]
        self.ng = len(gb)
        dq = {}
        for q in (-1, 0, 1):
            M = np.zeros((len(eb), len(gb)))
            for a, (mp, mi) in enumerate(eb):
                for b, (m, mi2) in enumerate(gb):
                    if mi == mi2:
                        M[a, b] = float(sympy_cg(_rat(self.J), 1, _rat(self.Jp), _rat(m), q, _rat(mp)))
            dq[q] = M
        e = {1: -np.array([1, 1j, 0]) / np.sqrt(2), 0: np.array([0, 0, 1.0]), -1: np.array([1, -1j, 0]) / np.sqrt(2)}
        self.dplus = [sum(dq[q] * np.conj(e[q][i]) for q in dq) for i in range(3)]
        self.Fg = _total(self.J, self.I)
        self.Fe = _total(self.Jp, self.I)

    def alpha(self, detuning):
        """alpha_ij (quantization frame) as a (3, 3, ng, ng) array; ``None`` = far detuned."""
        Pg = sum(_projector(self.Fg, f) for f in self._ground())
        al = np.zeros((3, 3, self.ng, self.ng), complex)
        norm = float(2 * self.Jp + 1)
        for fp, dl in self.splittings.items():
            Pe = _projector(self.Fe, fp)
            w = 1.0 if detuning is None else 1.0 / (1.0 - dl / detuning)
            for i in range(3):
                for j in range(3):
                    al[i, j] += w * Pg @ self.dplus[i].conj().T @ Pe @ self.dplus[j] @ Pg / norm
        return al

    def _ground(self):
        lo = abs(self.I - self.J)
        return [lo + k for k in range(int(self.I + self.J - lo) + 1)]

    def coefficients(self, F, detuning):
        """Normalized A, B, C (and raw pieces) in the stretched state of ``F``."""
        F = Fraction(F)
        al_q = self.alpha(detuning)
        L = self.LAB
        al = np.array([[al_q[L[i], L[j]] for j in range(3)] for i in range(3)])
        PF = _projector(self.Fg, F)
        w, v = np.linalg.eigh(self.Fg[2] + 100 * sum(o @ o for o in self.Fg))
        psi = v[:, np.argmin(np.abs(w - (float(F) + 100 * float(F * (F + 1)))))]
        jq = [PF @ o @ PF for o in self.Fg]
        jl = [jq[L[i]] for i in range(3)]

        def ev(O):
            return psi.conj() @ O @ psi

        def mm(A, B):
            return np.array([[sum(A[i, k] @ B[k, j] for k in range(3)) for j in range(3)] for i in range(3)])

        # vector part from the antisymmetric y-z (lab) block, <j_x> = F
        anti = (al[1, 2] - al[2, 1]) / 2
        a1 = (ev(anti) / (1j * ev(jl[0]))).real
        al2 = mm(al, al)
        f = float(F)
        norm = f * a1 * a1
        out = {
            "a1": a1,
            "alpha2_xx": ev(al2[0, 0]),
            "alpha2_yy": ev(al2[1, 1]),
            "alpha2_xy": ev(al2[0, 1]),
        }
        out["A_x"] = out["alpha2_xx"].real / norm
        out["A_y"] = out["alpha2_yy"].real / norm
        B, C = {}, {}
        zetas = {}
        for i, ax in enumerate("xyz"):
            ji = jl[i]
            alj = np.array([[al[a, b] @ ji for b in range(3)] for a in range(3)])
            jal = np.array([[ji @ al[a, b] for b in range(3)] for a in range(3)])
            zetas[ax] = 1j * (alj - jal)
            xi = np.array([[al2[a, b] @ ji + ji @ al2[a, b] - 2 * sum(al[a, k] @ ji @ al[k, b] for k in range(3))
                            for b in range(3)] for a in range(3)])
            z2 = mm(zetas[ax], zetas[ax])
            for ori, p in (("par", 0), ("orth", 1)):
                B[(ax, ori)] = (ev(xi[p, p] @ ji) / ev(ji @ ji)).real / norm
                C[(ax, ori)] = ev(z2[p, p]).real / norm
        out["B"], out["C"] = B, C
        comm = {}
        for ori, p in (("par", 0), ("orth", 1)):
            yz = mm(zetas["y"], zetas["z"])[p, p]
            zy = mm(zetas["z"], zetas["y"])[p, p]
            comm[ori] = (ev(yz - zy), ev(yz + zy))
        out["commutator"] = comm
        return out


# Test lines: (I, J, J', {F': splitting in MHz}). Splittings are round numbers
# of realistic size; only the structure matters for the cross-checks.
LINES = {
    "cs-d2": ("7/2", "1/2", "3/2", {5: 0.0, 4: 251.0916, 3: 452.3787, 2: 603.6034}),
    "rb87-d2": ("3/2", "1/2", "3/2", {3: 0.0, 2: 266.65, 1: 423.6, 0: 495.8}),
    "rb87-d1": ("3/2", "1/2", "1/2", {2: 0.0, 1: 814.5}),
    "k40-d2": ("4", "1/2", "3/2", {"11/2": 0.0, "9/2": 55.0, "7/2": 101.0, "5/2": 133.0}),
}


def line_spec(name, F):
    """AtomSpec for one of :data:`LINES` pumped into ``F``."""
    from faraday_noise.atom import AtomSpec
    I, J, Jp, lv = LINES[name]
    return AtomSpec(name, I, J, Jp, F, tuple((str(Fraction(k)), v) for k, v in lv.items()), 6.0, 780.0)


def line_brute(name):
    I, J, Jp, lv = LINES[name]
    return BruteForceAtom(I, J, Jp, lv)
