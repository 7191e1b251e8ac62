# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernel: bit-identical twin of `_kernel_py`.

See `_kernel_py` for the algorithm notes. Constraints enforced here:

- transcendentals are called through CPython's `math` module rather than
  libm directly, because CPython ships its own `lgamma`; mixing the two
  sources would break bit parity with the fallback;
- all loop arithmetic is plain double +,-,*,/ with the same association as
  the Python twin, and the extension is compiled with -ffp-contract=off so
  the compiler cannot fuse multiply-adds.
"""

from math import exp, lgamma, log

ctypedef unsigned long long u64

cdef u64 _GAMMA = 0x9E3779B97F4A7C15ULL
cdef u64 _MIX1 = 0xBF58476D1CE4E5B9ULL
cdef u64 _MIX2 = 0x94D049BB133111EBULL
cdef double _INV_2_53 = 1.0 / 9007199254740992.0

BACKEND_NAME = "compiled"


cdef inline u64 _mix64(u64 z):
    z = (z ^ (z >> 30)) * _MIX1
    z = (z ^ (z >> 27)) * _MIX2
    return z ^ (z >> 31)


cdef long long _quantile_low_p(double u, long long n, double p):
    cdef double q = 1.0 - p
    cdef double nd = <double> n
    cdef long long m = <long long> ((nd + 1.0) * p)
    if m > n:
        m = n
    cdef double md = <double> m
    cdef double logf = (
        lgamma(nd + 1.0)
        - lgamma(md + 1.0)
        - lgamma(nd - md + 1.0)
        + md * log(p)
        + (nd - md) * log(q)
    )
    cdef double f = exp(logf)

    cdef double c = f
    cdef double t = f
    cdef long long k = m
    cdef double kd, cn
    while k > 0:
        kd = <double> k
        t = t * ((kd * q) / ((nd - kd + 1.0) * p))
        if t == 0.0:
            break
        c = c + t
        k -= 1

    if c >= u:
        t = f
        k = m
        while k > 0:
            if t == 0.0:
                break
            cn = c - t
            if cn < u:
                break
            c = cn
            kd = <double> k
            t = t * ((kd * q) / ((nd - kd + 1.0) * p))
            k -= 1
        return k

    t = f
    k = m
    while k < n:
        kd = <double> k
        t = t * (((nd - kd) * p) / ((kd + 1.0) * q))
        c = c + t
        k += 1
        if c >= u:
            return k
        if t == 0.0:
            return n
    return n


cpdef long long binomial_quantile(double u, long long n, double p):
    """Smallest k with P(Binomial(n, p) <= k) >= u."""
    if n <= 0:
        return 0
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    if p > 0.5:
        return n - _quantile_low_p(1.0 - u, n, 1.0 - p)
    return _quantile_low_p(u, n, p)


cdef inline double _cond(double p, double tail):
    cdef double r
    if tail <= 0.0:
        return 0.0
    r = p / tail
    if r > 1.0:
        r = 1.0
    return r


cpdef tuple sample_cells(u64 state, long long n,
                         double p00, double p01, double p11,
                         double p02, double p12):
    """One multinomial draw over the five outcome cells of one arm."""
    cdef double t4 = p12
    cdef double t3 = p02 + t4
    cdef double t2 = p11 + t3
    cdef double t1 = p01 + t2
    cdef double t0 = p00 + t1
    cdef long long rem = n
    cdef double u
    cdef long long c00, c01, c11, c02

    state = state + _GAMMA
    u = <double> (_mix64(state) >> 11) * _INV_2_53
    c00 = binomial_quantile(u, rem, _cond(p00, t0))
    rem -= c00

    state = state + _GAMMA
    u = <double> (_mix64(state) >> 11) * _INV_2_53
    c01 = binomial_quantile(u, rem, _cond(p01, t1))
    rem -= c01

    state = state + _GAMMA
    u = <double> (_mix64(state) >> 11) * _INV_2_53
    c11 = binomial_quantile(u, rem, _cond(p11, t2))
    rem -= c11

    state = state + _GAMMA
    u = <double> (_mix64(state) >> 11) * _INV_2_53
    c02 = binomial_quantile(u, rem, _cond(p02, t3))
    rem -= c02

    return (c00, c01, c11, c02, rem)
