"""Zonal kernel catalogue and condensed Legendre expansions.

A zonal kernel K(x, y) = f(x . y) on S^m is stored in condensed form
K = sum_n c_n P_n^m(x . y).  The integral operator normalised by the surface
area then has eigenvalue c_n / d_n^m with multiplicity d_n^m at level n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable

import mpmath
from mpmath import mp, mpf

from .errors import DomainError
from .harmonics import (
    DEFAULT_PRECISION,
    _check_m,
    dim_harmonic,
    legendre_all,
    quadrature_rule,
    volume_ratio,
)

PROVENANCES = ("closed-form", "projected", "converted", "explicit")


# --------------------------------------------------------------------------
# Kernel specifications


class KernelSpec:
    """Base class of the kernel families.  Subclasses are frozen dataclasses."""

    name = "kernel"

    def validate(self):
        pass

    def profile(self, m):
        """Callable t -> f(t) on ``mpf`` arguments, or None without a pointwise form."""
        return None

    def describe(self):
        return self.name


def _show(value):
    return mpmath.nstr(value, 15) if isinstance(value, mpf) else repr(value)


def _positive(name, value, family):
    if not value > 0:
        raise DomainError(f"{family}: parameter {name} must be > 0, got {_show(value)}")


@dataclass(frozen=True)
class Gaussian(KernelSpec):
    """e^{2/r} exp(-|x-y|^2 / r) = exp(2 x.y / r), power series b_n = 2^n/(n! r^n)."""

    r: float
    name = "gaussian"

    def validate(self):
        _positive("r", self.r, self.name)

    def power_coefficient(self, n):
        return mpf(2) ** n / (mp.factorial(n) * mpf(self.r) ** n)

    def profile(self, m):
        def f(t):
            r = mpf(self.r)
            return mp.exp(2 / r) * mp.exp(-(2 - 2 * t) / r)

        return f

    def describe(self):
        return f"gaussian(r={self.r})"


@dataclass(frozen=True)
class Multiquadric(KernelSpec):
    sigma: float
    delta: float
    name = "multiquadric"

    def validate(self):
        _positive("sigma", self.sigma, self.name)
        if not 0 < self.delta < 1:
            raise DomainError(f"multiquadric: parameter delta must lie in (0, 1), got {_show(self.delta)}")

    def coefficient(self, n, m):
        s, d = mpf(self.sigma), mpf(self.delta)
        return s * s * (1 - d) ** (m - 1) * math.comb(m + n - 2, n) * d ** n

    def profile(self, m):
        def f(t):
            s, d = mpf(self.sigma), mpf(self.delta)
            return s * s * (1 - d) ** (m - 1) / (1 + d * d - 2 * d * t) ** (mpf(m - 1) / 2)

        return f

    def describe(self):
        return f"multiquadric(sigma={self.sigma},delta={self.delta})"


@dataclass(frozen=True)
class Moller(KernelSpec):
    alpha: float
    beta: float
    tau: float
    sigma: float
    name = "moller"

    def validate(self):
        for key in ("alpha", "beta", "tau", "sigma"):
            _positive(key, getattr(self, key), self.name)

    def coefficient(self, n, m):
        s = mpf(self.sigma)
        return s * s / (1 + mpf(self.beta) * mp.exp((n / mpf(self.alpha)) ** mpf(self.tau)))

    def describe(self):
        return f"moller(alpha={self.alpha},beta={self.beta},tau={self.tau},sigma={self.sigma})"


@dataclass(frozen=True)
class Optimality(KernelSpec):
    """1 + sum_{n>=1} d_n^m / n^{2n+m-1} P_n^m, the extremal example."""

    name = "optimality"

    def coefficient(self, n, m):
        if n == 0:
            return mpf(1)
        return mpf(dim_harmonic(n, m)) / mpf(n) ** (2 * n + m - 1)


@dataclass(frozen=True)
class DotProduct(KernelSpec):
    """K = sum_n b_n (x . y)^n.

    ``b`` is either a finite sequence of coefficients or a callable n -> b_n.
    """

    b: object
    label: str = "dotproduct"
    name = "dotproduct"

    def validate(self):
        if not callable(self.b) and len(self.b) == 0:
            raise DomainError("dotproduct: empty coefficient list")

    @property
    def finite(self):
        return not callable(self.b)

    def power_coefficient(self, n):
        if callable(self.b):
            return mpf(self.b(n))
        return mpf(self.b[n]) if n < len(self.b) else mpf(0)

    def profile(self, m):
        if callable(self.b):
            return None
        return lambda t: mp.polyval([mpf(x) for x in reversed(self.b)], t)

    def describe(self):
        return self.label


@dataclass(frozen=True)
class ExplicitCoefficients(KernelSpec):
    coeffs: tuple
    name = "explicit"

    def validate(self):
        if len(self.coeffs) == 0:
            raise DomainError("explicit: empty coefficient list")

    def describe(self):
        return "explicit(" + ",".join(str(c) for c in self.coeffs) + ")"


@dataclass(frozen=True)
class PointwiseZonal(KernelSpec):
    f: Callable
    label: str = "zonal"
    name = "zonal"

    def profile(self, m):
        return lambda t: mpf(self.f(t))

    def describe(self):
        return self.label


def zonal_profile(spec, m):
    """Callable t -> f(t) on ``mpf`` for kernels with a pointwise form."""
    f = spec.profile(m)
    if f is None:
        raise DomainError(f"kernel {spec.describe()} has no pointwise form")
    return f


# --------------------------------------------------------------------------
# Expansions


@dataclass(frozen=True)
class LegendreExpansion:
    """Condensed coefficients c_0..c_N of K(x, y) = sum c_n P_n^m(x . y).

    ``base`` holds rounded values; ``scales`` holds exact rational per-level
    multipliers applied by spectral operators, so that compositions such as
    J^r D^r cancel exactly.  ``complete`` marks an expansion that is the whole
    kernel (all coefficients beyond N are zero) rather than a truncation.
    """

    m: int
    base: tuple
    precision: int = DEFAULT_PRECISION
    provenance: str = "closed-form"
    scales: tuple = None
    complete: bool = False

    def __post_init__(self):
        _check_m(self.m)
        if len(self.base) == 0:
            raise DomainError("expansion needs at least one coefficient")
        if self.provenance not in PROVENANCES:
            raise DomainError(f"unknown provenance {self.provenance!r}")
        if self.scales is not None and len(self.scales) != len(self.base):
            raise DomainError("scales and coefficients differ in length")
        with mp.workprec(self.precision):
            for c in self.base:
                if not mp.isfinite(c):
                    raise DomainError("expansion coefficients must be finite")

    @property
    def truncation_level(self):
        return len(self.base) - 1

    @cached_property
    def coeffs(self):
        """Materialised coefficients base_n * scale_n."""
        if self.scales is None:
            return self.base
        with mp.workprec(self.precision):
            out = []
            for c, s in zip(self.base, self.scales):
                if s == 1:
                    out.append(c)
                elif s == 0:
                    out.append(mpf(0))
                else:
                    out.append(c * s.numerator / s.denominator)
            return tuple(out)

    def scale_of(self, n):
        return Fraction(1) if self.scales is None else self.scales[n]

    def rescaled(self, multipliers):
        """New expansion with the exact rational multipliers applied per level."""
        scales = tuple(self.scale_of(n) * Fraction(mu) for n, mu in enumerate(multipliers))
        return LegendreExpansion(self.m, self.base, self.precision, self.provenance,
                                 scales, self.complete)

    def evaluate(self, t):
        """Truncated sum sum_{n<=N} c_n P_n^m(t)."""
        with mp.workprec(self.precision):
            vals = legendre_all(self.truncation_level, self.m, t, self.precision)
            return mp.fsum(c * p for c, p in zip(self.coeffs, vals))

    def truncated(self, N):
        if N > self.truncation_level:
            raise DomainError(f"cannot truncate level {self.truncation_level} expansion to {N}")
        scales = None if self.scales is None else self.scales[:N + 1]
        complete = self.complete and all(c == 0 for c in self.coeffs[N + 1:])
        return LegendreExpansion(self.m, self.base[:N + 1], self.precision,
                                 self.provenance, scales, complete)


def _make(m, coeffs, precision, provenance, complete=False):
    with mp.workprec(precision):
        base = tuple(+mpf(c) for c in coeffs)
    return LegendreExpansion(m, base, precision, provenance, None, complete)


def catalog_coefficients(spec, m, N, precision=DEFAULT_PRECISION):
    """Closed-form condensed coefficients for the catalogue families.

    Supports Multiquadric, Moller, Optimality and ExplicitCoefficients.  For
    an explicit list, ``N`` may be ``None`` to keep every given coefficient.
    """
    _check_m(m)
    spec.validate()
    if isinstance(spec, ExplicitCoefficients):
        coeffs = list(spec.coeffs)
        if N is None:
            return _make(m, coeffs, precision, "explicit", complete=True)
        if N + 1 >= len(coeffs):
            coeffs += [0] * (N + 1 - len(coeffs))
            return _make(m, coeffs, precision, "explicit", complete=True)
        return _make(m, coeffs[:N + 1], precision, "explicit", complete=False)
    if N is None or N < 0:
        raise DomainError(f"level count N must be >= 0, got {N!r}")
    if isinstance(spec, (Multiquadric, Moller, Optimality)):
        with mp.workprec(precision + 10):
            coeffs = [spec.coefficient(n, m) for n in range(N + 1)]
        return _make(m, coeffs, precision, "closed-form")
    raise DomainError(f"no closed-form coefficients for kernel {spec.describe()}")


def project_zonal(spec, m, N, precision=DEFAULT_PRECISION, rule_order=None):
    """Project a pointwise zonal kernel onto P_0^m..P_N^m by Gauss quadrature.

    c_n = d_n^m (omega_{m-1}/omega_m) sum_i w_i f(t_i) P_n^m(t_i).
    """
    _check_m(m)
    spec.validate()
    if rule_order is None:
        rule_order = 2 * N + 32
    if rule_order <= N:
        raise DomainError(f"rule_order={rule_order} must exceed N={N} (aliasing)")
    f = zonal_profile(spec, m)
    work = precision + 20
    rule = quadrature_rule(m, rule_order, work)
    with mp.workprec(work):
        ratio = volume_ratio(m, work)
        acc = [[] for _ in range(N + 1)]
        for t, w in zip(rule.nodes, rule.weights):
            wf = w * f(t)
            for n, p in enumerate(legendre_all(N, m, t, work)):
                acc[n].append(wf * p)
        coeffs = [dim_harmonic(n, m) * ratio * mp.fsum(acc[n]) for n in range(N + 1)]
    return _make(m, coeffs, precision, "projected")


def _times_t(vec, m):
    """Coefficients of t * sum_n v_n P_n^m in the same basis (one level longer)."""
    out = [mpf(0)] * (len(vec) + 1)
    for n, v in enumerate(vec):
        if v == 0:
            continue
        den = 2 * n + m - 1
        out[n + 1] += v * (n + m - 1) / den
        if n > 0:
            out[n - 1] += v * n / den
    return out


def power_to_condensed(b, m, precision=DEFAULT_PRECISION, levels=None):
    """Condensed coefficients of the polynomial sum_k b_k t^k.

    Exact change of basis by Horner's scheme, using
    t P_n = [(n+m-1) P_{n+1} + n P_{n-1}] / (2n+m-1).  With ``levels`` the
    result is truncated to P_0..P_levels.
    """
    _check_m(m)
    if len(b) == 0:
        raise DomainError("empty power coefficient list")
    with mp.workprec(precision + 20):
        vec = [mpf(b[-1])]
        for bk in reversed(b[:-1]):
            vec = _times_t(vec, m)
            vec[0] += mpf(bk)
    N = len(b) - 1 if levels is None else levels
    vec = vec[:N + 1] + [mpf(0)] * max(0, N + 1 - len(vec))
    return _make(m, vec, precision, "converted", complete=levels is None or levels >= len(b) - 1)


def _leading_coefficient(n, m):
    lead = mpf(1)
    for k in range(n):
        lead = lead * (2 * k + m - 1) / (k + m - 1)
    return lead


def dot_product_coefficients(spec, m, N, precision=DEFAULT_PRECISION, max_terms=None):
    """Condensed coefficients of a power-series kernel, truncated at level N.

    The series is extended until a geometric bound on the omitted terms is
    below 2^-(precision+8) relative to the smallest retained coefficient's
    leading contribution.
    """
    spec.validate()
    if N < 0:
        raise DomainError(f"level count N must be >= 0, got {N}")
    if isinstance(spec, DotProduct) and spec.finite:
        return power_to_condensed(list(spec.b), m, precision, levels=N)
    if max_terms is None:
        max_terms = 20 * (N + precision) + 100
    with mp.workprec(precision + 20):
        b = [spec.power_coefficient(k) for k in range(N + 1)]
        floor = max(abs(b[N]), max(abs(x) for x in b) * mpf(2) ** -precision)
        floor = floor / _leading_coefficient(N, m) * mpf(2) ** -(precision + 8)
        k = N + 1
        while True:
            bk = spec.power_coefficient(k)
            b.append(bk)
            ratio = abs(bk / b[k - 1]) if b[k - 1] != 0 else mpf(0)
            # geometric bound on everything from b_k onwards
            if ratio < 1 and abs(bk) / (1 - ratio) < floor:
                break
            k += 1
            if k > max_terms:
                raise DomainError(
                    f"{spec.describe()}: power series did not decay within {max_terms} terms")
    return power_to_condensed(b, m, precision, levels=N)


def expand(spec, m, N, precision=DEFAULT_PRECISION, rule_order=None):
    """Route a kernel to its natural coefficient path."""
    if isinstance(spec, (Multiquadric, Moller, Optimality, ExplicitCoefficients)):
        return catalog_coefficients(spec, m, N, precision)
    if isinstance(spec, (Gaussian, DotProduct)):
        return dot_product_coefficients(spec, m, N, precision)
    if isinstance(spec, PointwiseZonal):
        return project_zonal(spec, m, N, precision, rule_order)
    raise DomainError(f"unsupported kernel {spec!r}")


# --------------------------------------------------------------------------
# Diagnostics


@dataclass(frozen=True)
class RatioTest:
    last_ratio: float
    extrapolated: float
    below_one: bool


def ratio_test(spec, n_max=60, margin=1e-6):
    """Estimate lim b_{n+1}/b_n for a power-series kernel.

    Reports the last ratio and a first-order Richardson extrapolation in 1/n.
    """
    if n_max < 3:
        raise DomainError("ratio_test needs n_max >= 3")
    with mp.workprec(128):
        b = [spec.power_coefficient(n) for n in range(n_max + 1)]
        for n, bn in enumerate(b):
            if not bn > 0:
                raise DomainError(f"power coefficient b_{n} = {mpmath.nstr(bn, 8)} is not positive")
        rho = [b[n + 1] / b[n] for n in range(n_max)]
        last = rho[-1]
        n = n_max - 1
        extra = n * rho[n] - (n - 1) * rho[n - 1]
        extra = max(extra, mpf(0))
    return RatioTest(float(last), float(extra), bool(extra < 1 - margin))


@dataclass(frozen=True)
class SchoenbergResult:
    positive_definite: bool
    first_violation: int | None


def schoenberg_check(expansion):
    """All condensed coefficients nonnegative, up to 2^-(precision-20) max|c|."""
    with mp.workprec(expansion.precision):
        cs = expansion.coeffs
        tol = mpf(2) ** -(expansion.precision - 20) * max(abs(c) for c in cs)
        for n, c in enumerate(cs):
            if c < -tol:
                return SchoenbergResult(False, n)
    return SchoenbergResult(True, None)


def tail_sum(expansion, start):
    """sum_{n>=start} |c_n| over the stored coefficients."""
    with mp.workprec(expansion.precision):
        return mp.fsum(abs(c) for c in expansion.coeffs[start:])


CATALOG = {
    "gaussian": {"params": {"r": "> 0"}, "form": "power series b_n = 2^n/(n! r^n); pointwise exp(2t/r)"},
    "multiquadric": {"params": {"sigma": "> 0", "delta": "in (0, 1)"},
                     "form": "c_n = sigma^2 (1-delta)^(m-1) C(m+n-2, n) delta^n"},
    "moller": {"params": {"alpha": "> 0", "beta": "> 0", "tau": "> 0", "sigma": "> 0"},
               "form": "c_n = sigma^2 / (1 + beta exp((n/alpha)^tau))"},
    "optimality": {"params": {}, "form": "c_0 = 1, c_n = d_n^m / n^(2n+m-1)"},
    "dotproduct": {"params": {"q": "in (0, 1) (geometric b_n = scale q^n)", "scale": "> 0",
                              "positional": "finite list b_0, b_1, ..."},
                   "form": "sum_n b_n t^n"},
    "explicit": {"params": {"positional": "c_0, c_1, ..."}, "form": "sum_n c_n P_n^m(t)"},
    "zonal-table": {"params": {"path": "file of (t, f(t)) pairs"},
                    "form": "pointwise profile, cubic-spline interpolated and projected"},
}
