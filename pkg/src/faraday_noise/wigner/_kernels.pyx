# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Double-precision Racah sums on twice-value integer arguments.

Small arguments use a table of factorials as doubles; once any factorial
argument exceeds ``DIRECT_MAX`` the sum is evaluated in log space, scaled by
its largest term.
"""
from libc.math cimport exp, log, sqrt, lgamma
from math import factorial

cdef enum:
    NMAX = 512
    DIRECT_MAX = 30

cdef double _fact[NMAX]
cdef double _lfact[NMAX]

cdef int _n
for _n in range(NMAX):
    if _n <= 170:
        _fact[_n] = float(factorial(_n))
        _lfact[_n] = log(_fact[_n])
    else:
        _fact[_n] = 0.0
        _lfact[_n] = lgamma(_n + 1.0)


cdef inline bint _triangle(int ta, int tb, int tc) noexcept nogil:
    if ta < 0 or tb < 0 or tc < 0:
        return False
    if tc < abs(ta - tb) or tc > ta + tb:
        return False
    return (ta + tb + tc) % 2 == 0


cdef inline bint _pair_ok(int tj, int tm) noexcept nogil:
    return abs(tm) <= tj and (tj - tm) % 2 == 0


cdef inline int _parity(int n) noexcept nogil:
    # (-1)**n for possibly negative n
    return -1 if n % 2 != 0 else 1


cpdef double threej(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3):
    cdef int k1, k2, n1, n2, n3, t, tmin, tmax, big, i
    cdef int fa[6]
    cdef double pref, total, term, lpref, lmax, lt
    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if not (_pair_ok(tj1, tm1) and _pair_ok(tj2, tm2) and _pair_ok(tj3, tm3)):
        return 0.0
    if not _triangle(tj1, tj2, tj3):
        return 0.0
    k1 = (tj3 - tj2 + tm1) // 2
    k2 = (tj3 - tj1 - tm2) // 2
    n1 = (tj1 + tj2 - tj3) // 2
    n2 = (tj1 - tm1) // 2
    n3 = (tj2 + tm2) // 2
    tmin = max(0, max(-k1, -k2))
    tmax = min(n1, min(n2, n3))
    fa[0] = (tj1 + tm1) // 2
    fa[1] = (tj1 - tm1) // 2
    fa[2] = (tj2 + tm2) // 2
    fa[3] = (tj2 - tm2) // 2
    fa[4] = (tj3 + tm3) // 2
    fa[5] = (tj3 - tm3) // 2
    big = (tj1 + tj2 + tj3) // 2 + 1
    if big <= DIRECT_MAX:
        pref = (_fact[n1] * _fact[(tj1 - tj2 + tj3) // 2] * _fact[(tj2 + tj3 - tj1) // 2]
                / _fact[big])
        for i in range(6):
            pref *= _fact[fa[i]]
        total = 0.0
        for t in range(tmin, tmax + 1):
            term = 1.0 / (_fact[t] * _fact[k1 + t] * _fact[k2 + t]
                          * _fact[n1 - t] * _fact[n2 - t] * _fact[n3 - t])
            total += -term if t % 2 else term
        return _parity((tj1 - tj2 - tm3) // 2) * sqrt(pref) * total
    lpref = (_lfact[n1] + _lfact[(tj1 - tj2 + tj3) // 2] + _lfact[(tj2 + tj3 - tj1) // 2]
             - _lfact[big])
    for i in range(6):
        lpref += _lfact[fa[i]]
    lmax = -1e300
    for t in range(tmin, tmax + 1):
        lt = -(_lfact[t] + _lfact[k1 + t] + _lfact[k2 + t]
               + _lfact[n1 - t] + _lfact[n2 - t] + _lfact[n3 - t])
        if lt > lmax:
            lmax = lt
    total = 0.0
    for t in range(tmin, tmax + 1):
        lt = -(_lfact[t] + _lfact[k1 + t] + _lfact[k2 + t]
               + _lfact[n1 - t] + _lfact[n2 - t] + _lfact[n3 - t])
        term = exp(lt - lmax)
        total += -term if t % 2 else term
    return _parity((tj1 - tj2 - tm3) // 2) * exp(0.5 * lpref + lmax) * total


cdef inline double _ldelta(int ta, int tb, int tc) noexcept nogil:
    return (_lfact[(ta + tb - tc) // 2] + _lfact[(ta - tb + tc) // 2]
            + _lfact[(tb + tc - ta) // 2] - _lfact[(ta + tb + tc) // 2 + 1])


cdef inline double _delta(int ta, int tb, int tc) noexcept nogil:
    return (_fact[(ta + tb - tc) // 2] * _fact[(ta - tb + tc) // 2]
            * _fact[(tb + tc - ta) // 2] / _fact[(ta + tb + tc) // 2 + 1])


cpdef double sixj(int ta, int tb, int tc, int td, int te, int tf):
    cdef int s[4]
    cdef int p[3]
    cdef int t, i, tmin, tmax
    cdef double pref, total, term, lpref, lmax, lt
    if not (_triangle(ta, tb, tc) and _triangle(ta, te, tf)
            and _triangle(td, tb, tf) and _triangle(td, te, tc)):
        return 0.0
    s[0] = (ta + tb + tc) // 2
    s[1] = (ta + te + tf) // 2
    s[2] = (td + tb + tf) // 2
    s[3] = (td + te + tc) // 2
    p[0] = (ta + tb + td + te) // 2
    p[1] = (ta + tc + td + tf) // 2
    p[2] = (tb + tc + te + tf) // 2
    tmin = max(max(s[0], s[1]), max(s[2], s[3]))
    tmax = min(p[0], min(p[1], p[2]))
    if tmax + 1 <= DIRECT_MAX:
        pref = (_delta(ta, tb, tc) * _delta(ta, te, tf)
                * _delta(td, tb, tf) * _delta(td, te, tc))
        total = 0.0
        for t in range(tmin, tmax + 1):
            term = _fact[t + 1]
            for i in range(4):
                term /= _fact[t - s[i]]
            for i in range(3):
                term /= _fact[p[i] - t]
            total += -term if t % 2 else term
        return sqrt(pref) * total
    lpref = (_ldelta(ta, tb, tc) + _ldelta(ta, te, tf)
             + _ldelta(td, tb, tf) + _ldelta(td, te, tc))
    lmax = -1e300
    for t in range(tmin, tmax + 1):
        lt = _lfact[t + 1]
        for i in range(4):
            lt -= _lfact[t - s[i]]
        for i in range(3):
            lt -= _lfact[p[i] - t]
        if lt > lmax:
            lmax = lt
    total = 0.0
    for t in range(tmin, tmax + 1):
        lt = _lfact[t + 1]
        for i in range(4):
            lt -= _lfact[t - s[i]]
        for i in range(3):
            lt -= _lfact[p[i] - t]
        term = exp(lt - lmax)
        total += -term if t % 2 else term
    return exp(0.5 * lpref + lmax) * total


cpdef double cg(int tj1, int tm1, int tj2, int tm2, int tJ, int tM):
    cdef double w = threej(tj1, tj2, tJ, tm1, tm2, -tM)
    if w == 0.0:
        return 0.0
    return _parity((tj1 - tj2 + tM) // 2) * sqrt(tJ + 1.0) * w
