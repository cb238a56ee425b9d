"""Command-line front end emitting CSV tables and scalar reports.

Exit codes: 0 success, 2 usage error, 3 infeasible physics, 4 pole in grid.
"""
import argparse
import csv
import io
import math
import sys

import numpy as np

from . import __version__
from .atom import resolve_atom
from .dynamics import (AtomicNoise, DecayRates, ProtocolConfig, mean_field_rotation,
                       propagate_memory, simulate_memory)
from .errors import AtomConfigError, DomainError, InfeasibleError, InvalidQuantumNumber, PoleError
from .optimize import optimize_fidelity, solve_memory
from .polarizability import asymptotic_coeffs, tensor_coeffs
from .scatter import AXES, Orientation, assemble, closed_form_cs, closed_form_cs_tensor
from .wigner import HalfInt

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_POLE = 0, 2, 3, 4

COEFF_COLUMNS = ["a0", "a1", "a2", "b1", "b2"]
SCATTER_COLUMNS = (
    ["A_x", "A_y"]
    + [f"B_{ax}_{o}" for o in ("par", "orth") for ax in AXES]
    + [f"C_{ax}_{o}" for o in ("par", "orth") for ax in ("y", "z")]
)


class UsageError(Exception):
    pass


def fmt(x):
    """Fixed 12-significant-digit rendering."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def parse_grid(text):
    """``start:stop:n:log|lin`` -> ndarray of n values."""
    parts = text.split(":")
    if len(parts) != 4:
        raise UsageError(f"grid must be start:stop:n:log|lin, got {text!r}")
    try:
        start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None
    mode = parts[3].strip().lower()
    if n < 1:
        raise UsageError("grid must contain at least one point")
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise UsageError("grid bounds must be finite")
    if mode == "log":
        if start <= 0 or stop <= 0:
            raise UsageError("log grid bounds must be positive")
        return np.array([start]) if n == 1 else np.logspace(math.log10(start), math.log10(stop), n)
    if mode == "lin":
        return np.array([start]) if n == 1 else np.linspace(start, stop, n)
    raise UsageError(f"grid spacing must be 'log' or 'lin', got {mode!r}")


def parse_vector(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None
    if len(vals) != 3:
        raise UsageError(f"expected three comma-separated numbers, got {text!r}")
    return vals


def _config_lines(args, atom, extra=()):
    lines = [
        f"faraday-noise {__version__} {args.command}",
        f"atom={atom.name} I={atom.I} J={atom.J} Jp={atom.Jp} gamma_rad_MHz={atom.gamma_rad_MHz!r} "
        f"lambda_nm={atom.lambda_nm!r}",
        "excited=" + ",".join(f"{fp}:{d!r}" for fp, d in atom.excited),
        f"F={args.F if args.F is not None else atom.F}",
    ]
    lines += [f"{k}={v}" for k, v in extra]
    return ["# " + line for line in lines]


class _Output:
    def __init__(self, path):
        self.path = path
        self.buf = io.StringIO()

    def comments(self, lines):
        for line in lines:
            self.buf.write(line + "\n")

    def table(self, header, rows):
        w = csv.writer(self.buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)

    def line(self, text):
        self.buf.write(text + "\n")

    def flush(self):
        text = self.buf.getvalue()
        if self.path in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)


def _manifold(args, atom):
    if args.F is None:
        return atom.F
    try:
        F = HalfInt.of(args.F)
    except InvalidQuantumNumber as exc:
        raise UsageError(str(exc)) from None
    if F not in atom.ground_manifolds:
        raise UsageError(f"F = {F} is not a ground manifold of {atom.name}")
    return F


def cmd_coeffs(args):
    atom = resolve_atom(args.atom)
    F = _manifold(args, atom)
    grid = parse_grid(args.grid)
    out = _Output(args.out)
    out.comments(_config_lines(args, atom, [("grid", args.grid), ("columns", "detuning is -Delta in MHz")]))
    rows, poles = [], 0
    for x in grid:
        try:
            c = tensor_coeffs(atom, F, -float(x))
            rows.append([fmt(x)] + [fmt(v) for v in c.as_tuple()] + ["ok"])
        except PoleError:
            poles += 1
            rows.append([fmt(x)] + ["nan"] * 5 + ["pole"])
    out.table(["detuning_MHz_neg"] + COEFF_COLUMNS + ["status"], rows)
    out.flush()
    if poles:
        print(f"error: {poles} grid point(s) on a resonance pole", file=sys.stderr)
        return EXIT_POLE
    return EXIT_OK


def _is_cs_f4(atom, F):
    return (atom.I.twice_value, atom.J.twice_value, atom.Jp.twice_value, F.twice_value) == (7, 1, 3, 8)


def cmd_scatter(args):
    atom = resolve_atom(args.atom)
    F = _manifold(args, atom)
    grid = parse_grid(args.grid)
    if args.oracle and not _is_cs_f4(atom, F):
        raise UsageError("--oracle needs the cesium D2 line with F = 4")
    header = ["detuning_MHz_neg"] + SCATTER_COLUMNS
    if args.oracle:
        header += ["cf_" + c for c in SCATTER_COLUMNS]
    header.append("status")
    out = _Output(args.out)
    out.comments(_config_lines(args, atom, [("grid", args.grid), ("oracle", bool(args.oracle))]))
    rows, poles, worst = [], 0, 0.0
    for x in grid:
        det = -float(x)
        try:
            c = assemble(atom, F, det).as_row()
        except PoleError:
            poles += 1
            rows.append([fmt(x)] + ["nan"] * (len(header) - 2) + ["pole"])
            continue
        row = [fmt(x)] + [fmt(c[k]) for k in SCATTER_COLUMNS]
        if args.oracle:
            o = closed_form_cs(det, closed_form_cs_tensor(det, atom.splitting(4), atom.splitting(3))).as_row()
            row += [fmt(o[k]) for k in SCATTER_COLUMNS]
            worst = max([worst] + [abs(c[k] - o[k]) / abs(o[k]) for k in SCATTER_COLUMNS])
        rows.append(row + ["ok"])
    out.table(header, rows)
    out.flush()
    if args.oracle:
        print(f"max relative deviation from closed forms: {worst:.3e}", file=sys.stderr)
    if poles:
        print(f"error: {poles} grid point(s) on a resonance pole", file=sys.stderr)
        return EXIT_POLE
    return EXIT_OK


def _memory_report(res, extra=()):
    r = res.rates
    items = list(extra) + [
        ("kappa", res.kappa), ("kappa_L", res.kappa_L), ("kappa_A", res.kappa_A), ("nu", res.nu),
        ("ratio", res.ratio),
        ("gamma_x", r.gamma_x), ("gamma_y", r.gamma_y),
        ("Gamma_x", r.Gamma_x), ("Gamma_y", r.Gamma_y), ("Gamma_z", r.Gamma_z),
        ("Gamma_X", r.Gamma_X), ("Gamma_P", r.Gamma_P),
        ("F_X2", res.atomic.F_X2), ("F_P2", res.atomic.F_P2),
    ]
    items += [(k, v) for k, v in res.noise.items()]
    items += [("var_X", res.var_X), ("var_P", res.var_P), ("fidelity", res.fidelity)]
    return [f"{k} = {fmt(v)}" for k, v in items]


def _memory_row(d, det, res):
    return [fmt(d), fmt(-det), fmt(res.ratio), fmt(res.kappa), fmt(res.kappa_L),
            fmt(res.kappa_A), fmt(res.var_X), fmt(res.var_P), fmt(res.fidelity), "ok"]


MEMORY_HEADER = ["d", "detuning_MHz_neg", "ratio", "kappa", "kappa_L", "kappa_A",
                 "var_X", "var_P", "fidelity", "status"]


def cmd_memory(args):
    out = _Output(args.out)
    if args.zero_decay:
        res = propagate_memory(DecayRates.zero(), AtomicNoise.zero(), 1.0)
        out.comments([f"# faraday-noise {__version__} memory", "# zero-decay=True kappa=1 nu=1"])
        for line in _memory_report(res):
            out.line(line)
        out.flush()
        return EXIT_OK
    atom = resolve_atom(args.atom)
    F = _manifold(args, atom)
    ori = Orientation.parse(args.orientation)
    if args.d is not None and not args.d > 0:
        raise UsageError("--d must be positive")
    if args.ratio is not None and not args.ratio > 0:
        raise UsageError("--ratio must be positive")
    det_arg = args.detuning
    cfg = [("orientation", ori.value), ("d", args.d), ("detuning_MHz", det_arg),
           ("ratio", "closure" if args.ratio is None else args.ratio),
           ("kappa", "solve" if args.kappa is None else args.kappa),
           ("optimize", bool(args.optimize)), ("sweep", args.sweep), ("grid", args.grid)]
    out.comments(_config_lines(args, atom, cfg))

    def one(d, det):
        if args.optimize:
            opt = optimize_fidelity(atom, d, ori, F=F, ratio=args.ratio, red=args.red)
            return opt.detuning, opt.result
        if det is None:
            raise UsageError("--detuning is required unless --optimize is given")
        if args.kappa is not None:
            return det, simulate_memory(ProtocolConfig(atom, det, d, ori, args.ratio, args.kappa, F))
        return det, solve_memory(atom, d, det, ori, args.ratio, F)

    if args.sweep is None:
        if args.d is None:
            raise UsageError("--d is required")
        det, res = one(args.d, det_arg)
        for line in _memory_report(res, [("d", args.d), ("detuning_MHz", det)]):
            out.line(line)
        out.flush()
        return EXIT_OK

    if args.grid is None:
        raise UsageError("--sweep needs --grid")
    grid = parse_grid(args.grid)
    rows, infeasible, poles = [], 0, 0
    for x in grid:
        if args.sweep == "d":
            d, det = float(x), det_arg
        else:
            if args.d is None:
                raise UsageError("--sweep detuning needs --d")
            d, det = args.d, -float(x)
        try:
            det_used, res = one(d, det)
            rows.append(_memory_row(d, det_used, res))
        except InfeasibleError:
            infeasible += 1
            rows.append([fmt(d), fmt(-det) if det is not None else "nan"] + ["nan"] * 7 + ["infeasible"])
        except PoleError:
            poles += 1
            rows.append([fmt(d), fmt(-det)] + ["nan"] * 7 + ["pole"])
    out.table(MEMORY_HEADER, rows)
    out.flush()
    if poles:
        print(f"error: {poles} grid point(s) on a resonance pole", file=sys.stderr)
        return EXIT_POLE
    if infeasible:
        print(f"error: kappa_A = 1 unreachable at {infeasible} grid point(s)", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_meanfield(args):
    atom = resolve_atom(args.atom)
    F = _manifold(args, atom)
    coeffs = asymptotic_coeffs(atom, F) if args.detuning is None else tensor_coeffs(atom, F, args.detuning)
    spin, stokes = parse_vector(args.spin), parse_vector(args.stokes)
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    S, j = mean_field_rotation(spin, stokes, coeffs, args.strength, args.steps)
    out = _Output(args.out)
    out.comments(_config_lines(args, atom, [("spin", args.spin), ("stokes", args.stokes),
                                            ("strength", args.strength), ("steps", args.steps),
                                            ("detuning_MHz", coeffs.detuning)]))
    out.table(["quantity", "x", "y", "z"], [["stokes_out"] + [fmt(v) for v in S],
                                           ["spin_out"] + [fmt(v) for v in j]])
    out.flush()
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--atom", default="cs-d2",
                        help="builtin name, config path, or name in $FARADAY_ATOM_DIR (default cs-d2)")
    common.add_argument("--F", default=None, help="pumped ground manifold (default from atom)")
    common.add_argument("--out", default=None, help="output path (default stdout)")

    p = argparse.ArgumentParser(prog="faraday-noise", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", parents=[common], help="tensor coefficients over a detuning grid")
    c.add_argument("--grid", default="100:100000:50:log", help="grid on -Delta in MHz, start:stop:n:log|lin")
    c.set_defaults(func=cmd_coeffs)

    s = sub.add_parser("scatter", parents=[common], help="A, B, C coefficients over a detuning grid")
    s.add_argument("--grid", default="100:100000:50:log", help="grid on -Delta in MHz, start:stop:n:log|lin")
    s.add_argument("--oracle", action="store_true", help="add closed-form cesium columns")
    s.set_defaults(func=cmd_scatter)

    m = sub.add_parser("memory", parents=[common], help="memory fidelity report or sweep")
    m.add_argument("--d", type=float, default=None, help="optical depth")
    m.add_argument("--detuning", type=float, default=None, help="Delta in MHz, negative for blue detuning")
    m.add_argument("--orientation", default="par", choices=["par", "orth"])
    m.add_argument("--ratio", type=float, default=None, help="photons per atom (default: scattering closure)")
    m.add_argument("--kappa", type=float, default=None, help="fixed kappa instead of solving kappa_A = 1")
    m.add_argument("--optimize", action="store_true", help="optimize fidelity over detuning")
    m.add_argument("--red", action="store_true", help="search red detuning when optimizing")
    m.add_argument("--zero-decay", dest="zero_decay", action="store_true", help="ideal memory without decay")
    m.add_argument("--sweep", choices=["d", "detuning"], default=None)
    m.add_argument("--grid", default=None, help="sweep grid start:stop:n:log|lin")
    m.set_defaults(func=cmd_memory)

    f = sub.add_parser("meanfield", parents=[common], help="mean-field Faraday rotation")
    f.add_argument("--spin", default="4,0,0", help="mean spin vector jx,jy,jz")
    f.add_argument("--stokes", default="1,0,0", help="Stokes vector Sx,Sy,Sz")
    f.add_argument("--strength", type=float, default=0.01, help="coupling times length")
    f.add_argument("--steps", type=int, default=1000)
    f.add_argument("--detuning", type=float, default=None, help="Delta in MHz (default: far detuned)")
    f.set_defaults(func=cmd_meanfield)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"faraday-noise: error: {exc}\n")
    except (AtomConfigError, InvalidQuantumNumber) as exc:
        parser.exit(EXIT_USAGE, f"faraday-noise: error: {exc}\n")
    except InfeasibleError as exc:
        parser.exit(EXIT_INFEASIBLE, f"faraday-noise: infeasible: {exc}\n")
    except PoleError as exc:
        parser.exit(EXIT_POLE, f"faraday-noise: pole: {exc}\n")
    except DomainError as exc:
        parser.exit(EXIT_USAGE, f"faraday-noise: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
