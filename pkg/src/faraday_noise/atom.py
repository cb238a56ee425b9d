"""Atom specifications: angular momenta, hyperfine manifolds and constants.

Config files are INI-like::

    [atom]
    name = cs-d2
    I = 7/2
    J = 1/2
    Jp = 3/2
    F = 4
    gamma_rad_MHz = 5.234
    lambda_nm = 852.34727582

    [excited]
    5 = 0.0
    4 = 251.0916

Each ``[excited]`` line maps an excited hyperfine level F' to its splitting
in MHz below the reference level (splitting 0) from which the detuning is
measured. Detunings are negative on the blue side.
"""
import configparser
import math
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import AtomConfigError, InvalidQuantumNumber
from .wigner import HalfInt

__all__ = [
    "AtomSpec",
    "load_atom",
    "load_atom_file",
    "serialize",
    "builtin_cesium_d2",
    "resolve_atom",
    "BUILTIN_ATOMS",
]

_ATOM_KEYS = ("name", "I", "J", "Jp", "F", "gamma_rad_MHz", "lambda_nm")


def _hyperfine_range(ta, tb):
    """Twice-values of all F in a (x) b."""
    return tuple(range(abs(ta - tb), ta + tb + 1, 2))


@dataclass(frozen=True)
class AtomSpec:
    """Immutable description of one alkali line.

    Attributes
    ----------
    name : str
    I, J, Jp : HalfInt
        Nuclear spin, ground and excited electronic angular momentum.
    F : HalfInt
        Ground hyperfine manifold the ensemble is pumped into.
    excited : tuple of (HalfInt, float)
        ``(F', delta_F')`` pairs sorted by F'. ``delta`` is in MHz.
    gamma_rad_MHz : float
        Natural linewidth Gamma/2pi of the excited state.
    lambda_nm : float
        Transition wavelength.
    """

    name: str
    I: HalfInt
    J: HalfInt
    Jp: HalfInt
    F: HalfInt
    excited: tuple
    gamma_rad_MHz: float
    lambda_nm: float

    def __post_init__(self):
        for field in ("I", "J", "Jp", "F"):
            value = getattr(self, field)
            if not isinstance(value, HalfInt):
                object.__setattr__(self, field, _halfint(value, field))
        levels = []
        for item in self.excited:
            try:
                fp, delta = item
            except (TypeError, ValueError):
                raise AtomConfigError(f"excited level entry {item!r} is not a (F', splitting) pair") from None
            levels.append((_halfint(fp, "excited F'"), float(delta)))
        levels.sort(key=lambda lv: lv[0].twice_value)
        object.__setattr__(self, "excited", tuple(levels))
        object.__setattr__(self, "gamma_rad_MHz", float(self.gamma_rad_MHz))
        object.__setattr__(self, "lambda_nm", float(self.lambda_nm))
        self._validate()

    def _validate(self):
        tI, tJ, tJp, tF = (x.twice_value for x in (self.I, self.J, self.Jp, self.F))
        if not self.name or not str(self.name).strip():
            raise AtomConfigError("name must be non-empty")
        for label, tv in (("I", tI), ("J", tJ), ("Jp", tJp), ("F", tF)):
            if tv < 0:
                raise AtomConfigError(f"{label} must be non-negative")
        if tJ == 0 and tJp == 0:
            raise AtomConfigError("J = 0 -> J' = 0 is not a dipole transition")
        if abs(tJ - tJp) > 2 or (tJ - tJp) % 2:
            raise AtomConfigError(f"J = {self.J} -> J' = {self.Jp} is not dipole allowed")
        if tF not in _hyperfine_range(tI, tJ):
            raise AtomConfigError(
                f"F = {self.F} violates |I - J| <= F <= I + J for I = {self.I}, J = {self.J}"
            )
        seen = [fp.twice_value for fp, _ in self.excited]
        if len(set(seen)) != len(seen):
            raise AtomConfigError("duplicate F' entry in excited levels")
        grounds = _hyperfine_range(tI, tJ)
        wanted = {
            tfp for tfp in _hyperfine_range(tI, tJp)
            if any(abs(tfp - tg) <= 2 for tg in grounds)
        }
        if set(seen) != wanted:
            missing = sorted(wanted - set(seen))
            extra = sorted(set(seen) - wanted)
            parts = []
            if missing:
                parts.append("missing F' " + ", ".join(str(HalfInt(t)) for t in missing))
            if extra:
                parts.append("unexpected F' " + ", ".join(str(HalfInt(t)) for t in extra))
            raise AtomConfigError("excited levels must be exactly the dipole-coupled F': " + "; ".join(parts))
        deltas = [d for _, d in self.excited]
        if not all(math.isfinite(d) for d in deltas):
            raise AtomConfigError("splittings must be finite")
        if sum(1 for d in deltas if d == 0.0) != 1:
            raise AtomConfigError("exactly one excited level must be the reference (splitting 0)")
        if len(set(deltas)) != len(deltas):
            raise AtomConfigError("splittings must be mutually distinct")
        if not (math.isfinite(self.gamma_rad_MHz) and self.gamma_rad_MHz > 0):
            raise AtomConfigError("gamma_rad_MHz must be positive and finite")
        if not (math.isfinite(self.lambda_nm) and self.lambda_nm > 0):
            raise AtomConfigError("lambda_nm must be positive and finite")

    # -- derived structure ----------------------------------------------------

    @property
    def ground_manifolds(self):
        """All ground hyperfine F values."""
        return tuple(HalfInt(t) for t in _hyperfine_range(self.I.twice_value, self.J.twice_value))

    @property
    def reference_level(self):
        return next(fp for fp, d in self.excited if d == 0.0)

    def splitting(self, Fp):
        tfp = HalfInt.of(Fp).twice_value
        for fp, d in self.excited:
            if fp.twice_value == tfp:
                return d
        raise KeyError(f"no excited level F' = {Fp}")

    def coupled_levels(self, F):
        """Excited levels dipole-coupled to ground manifold ``F``."""
        tF = HalfInt.of(F).twice_value
        return tuple((fp, d) for fp, d in self.excited if abs(fp.twice_value - tF) <= 2)

    @property
    def cross_section_m2(self):
        """Resonant cross section 3 lambda^2 / 2 pi."""
        lam = self.lambda_nm * 1e-9
        return 3.0 * lam * lam / (2.0 * math.pi)


def _halfint(value, label):
    try:
        return HalfInt.of(value)
    except InvalidQuantumNumber as exc:
        raise AtomConfigError(f"{label}: {exc}") from None


def _number(text, label):
    try:
        value = float(text)
    except ValueError:
        raise AtomConfigError(f"{label}: cannot parse {text!r} as a number") from None
    return value


def load_atom(config_text):
    """Parse and validate an atom config.

    Raises
    ------
    AtomConfigError
        On malformed text, unknown or missing keys, or any violated invariant.
    """
    parser = configparser.ConfigParser(
        interpolation=None, strict=True, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",)
    )
    parser.optionxform = str
    try:
        parser.read_string(config_text)
    except configparser.DuplicateOptionError as exc:
        if exc.section == "excited":
            raise AtomConfigError(f"duplicate F' entry {exc.option!r}") from None
        raise AtomConfigError(f"duplicate key {exc.option!r} in [{exc.section}]") from None
    except configparser.Error as exc:
        raise AtomConfigError(f"parse error: {exc}") from None
    sections = set(parser.sections())
    if sections != {"atom", "excited"}:
        raise AtomConfigError(f"expected sections [atom] and [excited], got {sorted(sections)}")
    atom = parser["atom"]
    unknown = set(atom) - set(_ATOM_KEYS)
    if unknown:
        raise AtomConfigError(f"unknown key(s) in [atom]: {', '.join(sorted(unknown))}")
    missing = [k for k in _ATOM_KEYS if k not in atom]
    if missing:
        raise AtomConfigError(f"missing key(s) in [atom]: {', '.join(missing)}")
    levels = []
    seen = set()
    for key, value in parser["excited"].items():
        fp = _halfint(key, "excited level")
        if fp.twice_value in seen:
            raise AtomConfigError(f"duplicate F' entry {key!r}")
        seen.add(fp.twice_value)
        levels.append((fp, _number(value, f"splitting of F' = {key}")))
    return AtomSpec(
        name=atom["name"].strip(),
        I=_halfint(atom["I"], "I"),
        J=_halfint(atom["J"], "J"),
        Jp=_halfint(atom["Jp"], "Jp"),
        F=_halfint(atom["F"], "F"),
        excited=tuple(levels),
        gamma_rad_MHz=_number(atom["gamma_rad_MHz"], "gamma_rad_MHz"),
        lambda_nm=_number(atom["lambda_nm"], "lambda_nm"),
    )


def load_atom_file(path):
    return load_atom(Path(path).read_text(encoding="utf-8"))


def serialize(spec):
    """Render ``spec`` in the config format; ``load_atom`` inverts it exactly."""
    lines = [
        "[atom]",
        f"name = {spec.name}",
        f"I = {spec.I}",
        f"J = {spec.J}",
        f"Jp = {spec.Jp}",
        f"F = {spec.F}",
        f"gamma_rad_MHz = {spec.gamma_rad_MHz!r}",
        f"lambda_nm = {spec.lambda_nm!r}",
        "",
        "[excited]",
    ]
    lines += [f"{fp} = {delta!r}" for fp, delta in reversed(spec.excited)]
    return "\n".join(lines) + "\n"


def builtin_cesium_d2():
    """Cesium D2 line pumped into F = 4, detuning referenced to F' = 5."""
    text = resources.files("faraday_noise").joinpath("data/cs_d2.ini").read_text(encoding="utf-8")
    return load_atom(text)


BUILTIN_ATOMS = {"cs-d2": builtin_cesium_d2, "cs": builtin_cesium_d2, "cesium": builtin_cesium_d2}


def resolve_atom(source):
    """Resolve a builtin name, a config path, or a name under ``$FARADAY_ATOM_DIR``."""
    key = str(source).strip()
    if key.lower() in BUILTIN_ATOMS:
        return BUILTIN_ATOMS[key.lower()]()
    path = Path(key)
    if path.is_file():
        return load_atom_file(path)
    search = os.environ.get("FARADAY_ATOM_DIR")
    if search:
        for directory in search.split(os.pathsep):
            for candidate in (Path(directory) / key, Path(directory) / f"{key}.ini"):
                if candidate.is_file():
                    return load_atom_file(candidate)
    raise AtomConfigError(f"unknown atom {source!r}: not a builtin, a file, or in FARADAY_ATOM_DIR")
