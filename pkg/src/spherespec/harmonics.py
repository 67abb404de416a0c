"""Harmonic dimensions, Legendre polynomials on S^m and Gauss-Gegenbauer rules.

All dimension arithmetic is done with Python integers.  Every floating point
routine takes an explicit ``precision`` in bits and evaluates under
``mpmath.workprec``; returned ``mpf`` values carry that precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import mpmath
import numpy as np
from mpmath import mp, mpf
from scipy.special import roots_jacobi

from .errors import ConvergenceError, DomainError

DEFAULT_PRECISION = 512


def _check_m(m):
    if int(m) != m or m < 2:
        raise DomainError(f"sphere dimension m must be an integer >= 2, got {m!r}")


def delta(m):
    """Case constant of the decay rate: 2 on S^2, 1 on higher spheres."""
    _check_m(m)
    return 2 if m == 2 else 1


def dim_harmonic(n, m):
    """Dimension of the space of degree-``n`` spherical harmonics on S^m.

    d_n^m = (2n+m-1) (n+m-2)! / (n! (m-1)!), which gives d_0^m = 1 and
    d_n^2 = 2n+1.
    """
    _check_m(m)
    if n < 0:
        return 0
    # (n+m-2)!/(n!(m-1)!) = C(n+m-2, m-2)/(m-1); the quotient is exact
    q, rem = divmod((2 * n + m - 1) * comb(n + m - 2, m - 2), m - 1)
    assert rem == 0
    return q


def cum_dim(n, m):
    """Number of eigenvalues in levels 0..n, i.e. d_n^{m+1} = sum_k d_k^m.

    This is the flat (1-based) index of the last entry of block n.  Returns 0
    for ``n < 0``.
    """
    return dim_harmonic(n, m + 1)


def level_of_index(j, m):
    """Level whose block contains the 1-based flat index ``j``."""
    if j < 1:
        raise DomainError(f"flat index must be >= 1, got {j}")
    lo, hi = 0, 1
    while cum_dim(hi, m) < j:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if cum_dim(mid, m) >= j:
            hi = mid
        else:
            lo = mid + 1
    return lo


def sphere_volume(m, precision=DEFAULT_PRECISION):
    """Surface area omega_m = 2 pi^{(m+1)/2} / Gamma((m+1)/2) of S^m."""
    with mp.workprec(precision):
        h = mpf(m + 1) / 2
        return 2 * mp.pi ** h / mp.gamma(h)


def volume_ratio(m, precision=DEFAULT_PRECISION):
    """omega_{m-1} / omega_m, the Funk-Hecke normalisation constant."""
    with mp.workprec(precision):
        return mp.gamma(mpf(m + 1) / 2) / (mp.sqrt(mp.pi) * mp.gamma(mpf(m) / 2))


def legendre_all(N, m, t, precision=DEFAULT_PRECISION):
    """Values P_0^m(t), ..., P_N^m(t) from the three-term recurrence."""
    with mp.workprec(precision):
        t = mpf(t)
        out = [mpf(1)]
        if N >= 1:
            out.append(t)
        for n in range(1, N):
            nxt = ((2 * n + m - 1) * t * out[n] - n * out[n - 1]) / (n + m - 1)
            out.append(nxt)
        return out


def legendre_eval(n, m, t, precision=DEFAULT_PRECISION):
    """Legendre polynomial of degree ``n`` for S^m, normalised so P(1) = 1.

    Uses (n+m-1) P_{n+1} = (2n+m-1) t P_n - n P_{n-1} with P_0 = 1, P_1 = t.
    For m = 2 this is the classical Legendre polynomial.
    """
    _check_m(m)
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    with mp.workprec(precision):
        t = mpf(t)
        if abs(t) > 1:
            raise DomainError(f"legendre_eval needs |t| <= 1, got t={mpmath.nstr(t, 10)}")
        return legendre_all(n, m, t, precision)[n]


def _p_and_dp(n, m, t):
    """P_n^m(t) and its derivative; the caller sets the working precision."""
    p_prev, p = mpf(1), t
    for k in range(1, n):
        p_prev, p = p, ((2 * k + m - 1) * t * p - k * p_prev) / (k + m - 1)
    if n == 0:
        return mpf(1), mpf(0)
    # (1 - t^2) P_n' = n (P_{n-1} - t P_n)
    return p, n * (p_prev - t * p) / (1 - t * t)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for the weight (1 - t^2)^{(m-2)/2} on (-1, 1)."""

    nodes: tuple
    weights: tuple
    m: int
    order: int
    precision: int

    def integrate(self, f):
        """Apply the rule to a callable of one ``mpf`` argument."""
        with mp.workprec(self.precision):
            return mp.fsum(w * f(t) for t, w in zip(self.nodes, self.weights))

    def weight_integral(self):
        """Exact integral of the weight function, B(1/2, m/2)."""
        with mp.workprec(self.precision):
            return mp.beta(mpf(1) / 2, mpf(self.m) / 2)


def _refine_root(n, m, guess, lo, hi, index, tol):
    x = guess
    for _ in range(60):
        p, dp = _p_and_dp(n, m, x)
        if dp == 0:
            break
        step = p / dp
        x = x - step
        if not lo < x < hi:
            break
        if abs(step) <= tol:
            return x
    return _bisect_root(n, m, lo, hi, index, tol)


def _bisect_root(n, m, lo, hi, index, tol):
    f_lo = _p_and_dp(n, m, lo)[0]
    f_hi = _p_and_dp(n, m, hi)[0]
    if f_lo * f_hi > 0:
        raise ConvergenceError(f"quadrature node {index}: no sign change in bracket")
    for _ in range(4 * mp.prec):
        mid = (lo + hi) / 2
        f_mid = _p_and_dp(n, m, mid)[0]
        if f_mid == 0 or hi - lo <= tol:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    raise ConvergenceError(f"quadrature node {index}: bisection did not converge")


@lru_cache(maxsize=64)
def quadrature_rule(m, order, precision=DEFAULT_PRECISION):
    """Gauss-Jacobi rule with alpha = beta = (m-2)/2 and ``order`` nodes.

    Nodes are seeded from a binary64 rule and polished by Newton iteration on
    the recurrence (bisection fallback) to 2^-(precision-10).  Weights come
    from the Christoffel function of the normalised Legendre family.  The rule
    integrates polynomials of degree <= 2*order - 1 exactly.
    """
    _check_m(m)
    if order < 1:
        raise DomainError(f"quadrature order must be >= 1, got {order}")
    a = (m - 2) / 2
    seeds = np.sort(roots_jacobi(order, a, a)[0])
    mids = [-1.0] + [0.5 * (seeds[i] + seeds[i + 1]) for i in range(order - 1)] + [1.0]
    with mp.workprec(precision + 16):
        tol = mpf(2) ** -(precision - 10)
        nodes = []
        for i, s in enumerate(seeds):
            lo, hi = mpf(mids[i]), mpf(mids[i + 1])
            nodes.append(_refine_root(order, m, mpf(s), lo, hi, i, tol))
        ratio = volume_ratio(m, precision + 16)
        dims = [dim_harmonic(j, m) for j in range(order)]
        weights = []
        for x in nodes:
            vals = legendre_all(order - 1, m, x, precision + 16)
            weights.append(1 / (ratio * mp.fsum(d * v * v for d, v in zip(dims, vals))))
    with mp.workprec(precision):
        nodes = tuple(+x for x in nodes)
        weights = tuple(+w for w in weights)
    for i in range(order - 1):
        if not nodes[i] < nodes[i + 1]:
            raise ConvergenceError(f"quadrature node {i + 1}: nodes not strictly increasing")
    return QuadratureRule(nodes, weights, m, order, precision)
