"""Exact Racah sums on twice-value integer arguments.

Every symbol is evaluated as ``sign * sqrt(p/q)`` with integer arithmetic and
only converted to ``float`` on return. This is the reference backend; the
compiled kernel in ``_kernels.pyx`` mirrors the same formulas in double
precision.
"""
from fractions import Fraction
from math import factorial, isqrt, sqrt


def _delta_sq(ta, tb, tc):
    # triangle coefficient squared, arguments doubled
    return Fraction(
        factorial((ta + tb - tc) // 2)
        * factorial((ta - tb + tc) // 2)
        * factorial((-ta + tb + tc) // 2),
        factorial((ta + tb + tc) // 2 + 1),
    )


def _triangle(ta, tb, tc):
    return (
        ta >= 0 and tb >= 0 and tc >= 0
        and abs(ta - tb) <= tc <= ta + tb
        and (ta + tb + tc) % 2 == 0
    )


def _pair_ok(tj, tm):
    return abs(tm) <= tj and (tj - tm) % 2 == 0


def _to_float(sign, square):
    if sign == 0 or square == 0:
        return 0.0
    num, den = square.numerator, square.denominator
    # sqrt(num/den) rounded once when both are perfect squares
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return sign * (rn / rd)
    return sign * sqrt(num / den)


def threej_exact(tj1, tj2, tj3, tm1, tm2, tm3):
    """Return ``(sign, square)`` with ``3j = sign * sqrt(square)``."""
    if tm1 + tm2 + tm3 != 0:
        return 0, Fraction(0)
    if not (_pair_ok(tj1, tm1) and _pair_ok(tj2, tm2) and _pair_ok(tj3, tm3)):
        return 0, Fraction(0)
    if not _triangle(tj1, tj2, tj3):
        return 0, Fraction(0)
    pref = _delta_sq(tj1, tj2, tj3) * (
        factorial((tj1 + tm1) // 2) * factorial((tj1 - tm1) // 2)
        * factorial((tj2 + tm2) // 2) * factorial((tj2 - tm2) // 2)
        * factorial((tj3 + tm3) // 2) * factorial((tj3 - tm3) // 2)
    )
    k1 = (tj3 - tj2 + tm1) // 2
    k2 = (tj3 - tj1 - tm2) // 2
    n1 = (tj1 + tj2 - tj3) // 2
    n2 = (tj1 - tm1) // 2
    n3 = (tj2 + tm2) // 2
    tmin = max(0, -k1, -k2)
    tmax = min(n1, n2, n3)
    total = Fraction(0)
    for t in range(tmin, tmax + 1):
        den = (
            factorial(t) * factorial(k1 + t) * factorial(k2 + t)
            * factorial(n1 - t) * factorial(n2 - t) * factorial(n3 - t)
        )
        total += Fraction((-1) ** t, den)
    if total == 0:
        return 0, Fraction(0)
    sign = 1 if total > 0 else -1
    if ((tj1 - tj2 - tm3) // 2) % 2:
        sign = -sign
    return sign, pref * total * total


def sixj_exact(ta, tb, tc, td, te, tf):
    """Return ``(sign, square)`` for ``{a b c; d e f}``."""
    triads = ((ta, tb, tc), (ta, te, tf), (td, tb, tf), (td, te, tc))
    if not all(_triangle(*t) for t in triads):
        return 0, Fraction(0)
    pref = Fraction(1)
    for t in triads:
        pref *= _delta_sq(*t)
    s = [sum(t) // 2 for t in triads]
    p = [(ta + tb + td + te) // 2, (ta + tc + td + tf) // 2, (tb + tc + te + tf) // 2]
    total = 0
    for t in range(max(s), min(p) + 1):
        num = (-1) ** t * factorial(t + 1)
        den = 1
        for x in s:
            den *= factorial(t - x)
        for x in p:
            den *= factorial(x - t)
        total += Fraction(num, den)
    if total == 0:
        return 0, Fraction(0)
    sign = 1 if total > 0 else -1
    return sign, pref * total * total


def threej(tj1, tj2, tj3, tm1, tm2, tm3):
    return _to_float(*threej_exact(tj1, tj2, tj3, tm1, tm2, tm3))


def sixj(ta, tb, tc, td, te, tf):
    return _to_float(*sixj_exact(ta, tb, tc, td, te, tf))


def cg_exact(tj1, tm1, tj2, tm2, tJ, tM):
    """Clebsch-Gordan coefficient as ``(sign, square)``."""
    sign, sq = threej_exact(tj1, tj2, tJ, tm1, tm2, -tM)
    if sign == 0:
        return 0, Fraction(0)
    if ((tj1 - tj2 + tM) // 2) % 2:
        sign = -sign
    return sign, sq * (tJ + 1)


def cg(tj1, tm1, tj2, tm2, tJ, tM):
    return _to_float(*cg_exact(tj1, tm1, tj2, tm2, tJ, tM))
