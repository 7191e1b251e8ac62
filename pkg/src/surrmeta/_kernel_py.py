"""Pure-Python sampling kernel.

Reference implementation of the hot inner loop: binomial sampling by exact
CDF inversion and the five-cell multinomial cascade built on it. The compiled
twin in `_kernel.pyx` mirrors this file statement by statement; both must
produce bit-identical results for any input, which constrains the code here:

- only IEEE-exact double ops (+, -, *, /) inside the accumulation loops;
- transcendentals (`exp`, `log`, `lgamma`) via the `math` module in BOTH
  twins, so a single libm-level implementation serves each call;
- one uniform variate consumed per binomial draw, taken from a splitmix64
  stream advanced inside the kernel.

Inversion walks the CDF outward from the distribution mode, so the initial
probability mass never underflows even for n in the millions; the walk costs
O(sqrt(n p (1-p))) steps, which is what makes this loop worth compiling.
"""

from math import exp, lgamma, log

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / 9007199254740992.0

BACKEND_NAME = "python"


def _mix64(z):
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def binomial_quantile(u, n, p):
    """Smallest k with P(Binomial(n, p) <= k) >= u.

    Applied to a uniform u this is an exact binomial draw. For p > 1/2 the
    complement count is inverted at 1 - u, keeping the walk on the short side.
    """
    if n <= 0:
        return 0
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    if p > 0.5:
        return n - _quantile_low_p(1.0 - u, n, 1.0 - p)
    return _quantile_low_p(u, n, p)


def _quantile_low_p(u, n, p):
    # Requires 0 < p <= 1/2 and n >= 1. The pmf at the mode is ~1/sqrt(n p q)
    # and cannot underflow, unlike the textbook inversion started at k = 0.
    q = 1.0 - p
    nd = float(n)
    m = int((nd + 1.0) * p)
    if m > n:
        m = n
    md = float(m)
    logf = (
        lgamma(nd + 1.0)
        - lgamma(md + 1.0)
        - lgamma(nd - md + 1.0)
        + md * log(p)
        + (nd - md) * log(q)
    )
    f = exp(logf)

    # Accumulate cdf(m) by descending terms until they vanish.
    c = f
    t = f
    k = m
    while k > 0:
        kd = float(k)
        t = t * ((kd * q) / ((nd - kd + 1.0) * p))
        if t == 0.0:
            break
        c = c + t
        k -= 1

    if c >= u:
        # Descend from the mode to the smallest k with cdf(k) >= u.
        t = f
        k = m
        while k > 0:
            if t == 0.0:
                break
            cn = c - t
            if cn < u:
                break
            c = cn
            kd = float(k)
            t = t * ((kd * q) / ((nd - kd + 1.0) * p))
            k -= 1
        return k

    # Ascend above the mode until the cdf reaches u.
    t = f
    k = m
    while k < n:
        kd = float(k)
        t = t * (((nd - kd) * p) / ((kd + 1.0) * q))
        c = c + t
        k += 1
        if c >= u:
            return k
        if t == 0.0:
            return n
    return n


def _cond(p, tail):
    # Conditional cell probability given the not-yet-assigned tail mass.
    if tail <= 0.0:
        return 0.0
    r = p / tail
    if r > 1.0:
        r = 1.0
    return r


def sample_cells(state, n, p00, p01, p11, p02, p12):
    """One multinomial draw over the five outcome cells of one arm.

    Realized as conditional binomial draws in declared cell order
    (p00, p01, p11, p02), with the final cell taking the remainder; this is
    distribution-exact and pins the draw to the stream regardless of any
    library's multinomial internals. Consumes exactly four stream steps.
    """
    state &= _MASK64
    t4 = p12
    t3 = p02 + t4
    t2 = p11 + t3
    t1 = p01 + t2
    t0 = p00 + t1
    rem = n

    state = (state + _GAMMA) & _MASK64
    u = (_mix64(state) >> 11) * _INV_2_53
    c00 = binomial_quantile(u, rem, _cond(p00, t0))
    rem -= c00

    state = (state + _GAMMA) & _MASK64
    u = (_mix64(state) >> 11) * _INV_2_53
    c01 = binomial_quantile(u, rem, _cond(p01, t1))
    rem -= c01

    state = (state + _GAMMA) & _MASK64
    u = (_mix64(state) >> 11) * _INV_2_53
    c11 = binomial_quantile(u, rem, _cond(p11, t2))
    rem -= c11

    state = (state + _GAMMA) & _MASK64
    u = (_mix64(state) >> 11) * _INV_2_53
    c02 = binomial_quantile(u, rem, _cond(p02, t3))
    rem -= c02

    return (c00, c01, c11, c02, rem)
