"""Numerical checks of super-exponential eigenvalue decay.

Everything that involves powers like n^{n^{1/m}/(delta m)} is evaluated in
the log domain at the caller's precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .errors import DomainError, ParseError
from .harmonics import DEFAULT_PRECISION, _check_m, cum_dim, delta, dim_harmonic, level_of_index
from .kernels import schoenberg_check
from .spectra import s1_of_derivative


def decay_bound(n, m, precision=DEFAULT_PRECISION):
    """n^{-n^{1/m}/(delta m)} for a flat index n >= 1."""
    if n < 1:
        raise DomainError(f"flat index must be >= 1, got {n}")
    _check_m(m)
    with mp.workprec(precision + 10):
        res = mp.exp(-mp.root(n, m) / (delta(m) * m) * mp.log(n))
    with mp.workprec(precision):
        return +res


def exact_j_product(n, m):
    """prod_{i=1}^n m / (i (i+m-1)) as an exact fraction."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    out = Fraction(1)
    for i in range(1, n + 1):
        out *= Fraction(m, i * (i + m - 1))
    return out


def j_product_closed_form(n, m):
    """m^n (m-1)! / (n! (n+m-1)!)."""
    return Fraction(m ** n * math.factorial(m - 1),
                    math.factorial(n) * math.factorial(n + m - 1))


def stirling_envelope(n, m, precision=DEFAULT_PRECISION):
    """e^{2n} m^n / n^{2n+m}, the shape of the product after Stirling."""
    with mp.workprec(precision):
        return mp.exp(2 * n) * mpf(m) ** n / mpf(n) ** (2 * n + m)


def _to_mpf(q):
    return mpf(q.numerator) / q.denominator


@dataclass(frozen=True)
class DecayReport:
    m: int
    delta: int
    indices: tuple
    flat_indices: tuple
    lhs: tuple
    rhs: tuple
    ratios: tuple
    verdicts: tuple
    bound_envelope: tuple
    s1_levels: tuple
    edge_levels: tuple
    stirling_constant: mpf
    stirling_rhs: tuple

    @property
    def all_hold(self):
        return all(self.verdicts)


def verify_lemma42(spectrum, expansion, n_max):
    """Check s_{d_n^{m+1}}(K) <= prod_{i<=n} s_{d_i^m}(J) * s_1(K_{0,n}) for n <= n_max.

    The left side is read from the sorted spectrum, the product is exact, and
    s_1 is the true maximum over the stored levels.  The Stirling-form
    constant c is reported as the smallest value making
    prod <= c e^{2n} m^n / n^{2n+m} on the checked range.
    """
    m = expansion.m
    if spectrum.m != m:
        raise DomainError("spectrum and expansion have different m")
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    if n_max > expansion.truncation_level and not expansion.complete:
        raise DomainError(
            f"n_max={n_max} beyond truncation level {expansion.truncation_level}")
    if not schoenberg_check(expansion).positive_definite:
        raise DomainError("verify_lemma42 needs an L2-PD expansion")
    prec = expansion.precision
    idx, flat, lhs, rhs, ratios, verdicts, env, levels, edges, st_rhs = ([] for _ in range(10))
    c_stirling = mpf(0)
    with mp.workprec(prec):
        slack = 1 + mpf(2) ** -(prec - 8)
        for n in range(1, n_max + 1):
            j = cum_dim(n, m)
            left = spectrum.sorted_value(j)
            prod = exact_j_product(n, m)
            s1 = s1_of_derivative(expansion, n)
            right = _to_mpf(prod) * s1.value
            if right == 0:
                ratio = mpf(0) if left == 0 else mp.inf
            else:
                ratio = left / right
            envelope = stirling_envelope(n, m, prec)
            c_stirling = max(c_stirling, _to_mpf(prod) / envelope)
            idx.append(n)
            flat.append(j)
            lhs.append(left)
            rhs.append(right)
            ratios.append(ratio)
            verdicts.append(bool(left <= right * slack))
            env.append(decay_bound(j, m, prec))
            levels.append(s1.level_attained)
            edges.append(s1.at_truncation_edge)
        for n in idx:
            st_rhs.append(c_stirling * stirling_envelope(n, m, prec) * rhs[n - 1]
                          / _to_mpf(exact_j_product(n, m)) if rhs[n - 1] != 0 else mpf(0))
    return DecayReport(m, delta(m), tuple(idx), tuple(flat), tuple(lhs), tuple(rhs),
                       tuple(ratios), tuple(verdicts), tuple(env), tuple(levels),
                       tuple(edges), c_stirling, tuple(st_rhs))


# --------------------------------------------------------------------------
# Series engine


@dataclass(frozen=True)
class ExponentSpec:
    """The extra exponent alpha_j added to j^{1/m}/(delta m).

    kind is one of ``zero``, ``power`` (alpha_j = j^p, p < 1/m),
    ``root`` (alpha_j = kappa j^{1/m}) or ``table`` (explicit alpha_1, alpha_2, ...).
    """

    kind: str
    param: float = 0.0
    table: tuple = ()
    note: str = ""

    def validate(self, m):
        if self.kind == "power" and not self.param < 1 / m:
            raise DomainError(f"power exponent p={self.param} must be < 1/m = {1 / m:.6g}")
        if self.kind not in ("zero", "power", "root", "table"):
            raise DomainError(f"unknown exponent kind {self.kind!r}")

    def alpha(self, j, m):
        if self.kind == "zero":
            return mpf(0)
        if self.kind == "power":
            return mpf(j) ** mpf(self.param)
        if self.kind == "root":
            return mpf(self.param) * mp.root(j, m)
        if j > len(self.table):
            raise DomainError(f"exponent table has {len(self.table)} entries, index {j} requested")
        return mpf(self.table[j - 1])

    def describe(self):
        if self.kind == "zero":
            return "zero"
        if self.kind == "table":
            return f"table[{len(self.table)}]"
        text = f"{self.kind}:{self.param!r}"
        return f"{text} ({self.note})" if self.note else text


@dataclass(frozen=True)
class DivergenceParameters:
    m: int
    ell: float
    n_ell: int
    kappa: float
    limit_brute_force: float
    limit_stated: float
    limit_printed_formula: float


def dimension_limit_constant(m, n=10 ** 6):
    """lim d_n^{m+1} / n^m from the implemented dimensions.

    Richardson extrapolation of the exact ratios at n and 2n (error O(1/n^2)).
    """
    r1 = Fraction(cum_dim(n, m), n ** m)
    r2 = Fraction(cum_dim(2 * n, m), (2 * n) ** m)
    return float(2 * r2 - r1)


def divergence_parameters(m, ell=0.9, search_max=2000):
    """A valid (ell, n_ell) pair and kappa = (2 delta m - ell)/(ell delta m).

    ell must satisfy ell (n-1)^m < d_{n-1}^{m+1} and ell n^{m-1} < d_n^m for
    all n >= n_ell; both ratios have finite limits, so ell has to sit below
    them.  If the requested ell is too large it is replaced by 0.9 times the
    smaller limit.
    """
    _check_m(m)
    lim_cum = dimension_limit_constant(m)
    lim_dim = 2 / math.factorial(m - 1)
    bound = min(1.0, lim_cum, lim_dim)
    if not 0 < ell < bound:
        ell = 0.9 * bound
    ell_q = Fraction(ell)
    bad = 0
    for n in range(1, search_max + 1):
        ok = (ell_q * (n - 1) ** m < cum_dim(n - 1, m)
              and ell_q * n ** (m - 1) < dim_harmonic(n, m))
        if not ok:
            bad = n
    d = delta(m)
    kappa = (2 * d * m - ell) / (ell * d * m)
    return DivergenceParameters(m, ell, bad + 1, kappa, lim_cum, 2 / math.factorial(m),
                                2 / math.factorial(m + 1))


def _number(text, token, offset):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"expected a number, got {token!r}", text, offset) from None


def exponent_from_string(text, m):
    """Parse ``zero``, ``power:p``, ``root:kappa``, ``root:auto-divergent[=ell]`` or ``file:path``."""
    text = text.strip()
    if text == "zero":
        return ExponentSpec("zero")
    kind, _, arg = text.partition(":")
    at = len(kind) + 1
    if kind == "power":
        return ExponentSpec("power", _number(text, arg, at))
    if kind == "root":
        if arg.startswith("auto-divergent"):
            _, eq, ell = arg.partition("=")
            if arg != "auto-divergent" and not eq:
                raise ParseError("expected 'auto-divergent' or 'auto-divergent=ell'", text, at)
            ell = _number(text, ell, at + len("auto-divergent=")) if eq else 0.9
            params = divergence_parameters(m, ell)
            return ExponentSpec("root", params.kappa,
                                note=f"ell={params.ell!r}, n_ell={params.n_ell}")
        return ExponentSpec("root", _number(text, arg, at))
    if kind == "file":
        try:
            with open(arg) as fh:
                raw = fh.read()
        except OSError as exc:
            raise DomainError(f"cannot read exponent table {arg!r}: {exc.strerror}") from None
        try:
            vals = tuple(float(tok) for tok in raw.replace(",", " ").split())
        except ValueError:
            raise DomainError(f"exponent table {arg!r} holds a non-numeric entry") from None
        return ExponentSpec("table", table=vals, note=arg)
    raise ParseError("expected zero, power:p, root:kappa, root:auto-divergent or file:path",
                     text, 0)


@dataclass(frozen=True)
class SeriesEvaluation:
    exponent: str
    checkpoints: tuple
    partial_sums: tuple
    term_values: tuple
    verdict: str
    tail_estimate: mpf | None
    tail_ratio: mpf | None
    geometric_ratio: mpf | None
    first_term_above_one: int | None
    terms: tuple = field(repr=False, default=())


def _series_terms(spectrum, exponent, K, precision):
    m, d = spectrum.m, delta(spectrum.m)
    terms = []
    with mp.workprec(precision + 20):
        for j in range(1, K + 1):
            s = spectrum.sorted_value(j)
            if s == 0:
                terms.append(mpf(0))
                continue
            expo = mp.root(j, m) / (d * m) + exponent.alpha(j, m)
            terms.append(mp.exp(expo * mp.log(j) + mp.log(s)))
    return terms


def series_eval(spectrum, exponent, checkpoints, precision=None, window=5):
    """Partial sums of sum_j j^{j^{1/m}/(delta m) + alpha_j} s_j with a verdict.

    Blocks of equal eigenvalues are aggregated before the monotonicity and
    ratio tests, since terms rise inside a block.  Rules, applied in order:

    * diverging: some term beyond index 10 exceeds 1, or the block containing
      the last checkpoint sums to more than the block at the previous one;
    * converging: the last ``window`` block sums up to the last checkpoint
      are non-increasing with largest ratio q < 1, and the rest of the current
      block plus the geometric tail G q/(1-q) is at most 10^{-dps/2} times
      the partial sum;
    * otherwise inconclusive.
    """
    if precision is None:
        precision = spectrum.precision
    m = spectrum.m
    exponent.validate(m)
    checkpoints = sorted(set(int(c) for c in checkpoints))
    if not checkpoints or checkpoints[0] < 1:
        raise DomainError("checkpoints must be positive flat indices")
    for b in spectrum.blocks:
        if b.value < 0:
            raise DomainError("series_eval needs a nonnegative spectrum; pass |lambda| upstream")
    K = checkpoints[-1]
    if K > spectrum.size and not spectrum.complete:
        raise DomainError(f"checkpoint {K} exceeds truncated spectrum of size {spectrum.size}")
    # extend to the end of the block holding K so the tail of that block is exact
    K_full = spectrum.sorted_group_bounds(K)[1] if K <= spectrum.size else K
    terms = _series_terms(spectrum, exponent, K_full, precision)

    with mp.workprec(precision + 20):
        partial, acc = [], mpf(0)
        cps = set(checkpoints)
        for j in range(1, K + 1):
            acc += terms[j - 1]
            if j in cps:
                partial.append(acc)
        S = acc
        first_big = next((j for j in range(11, K + 1) if terms[j - 1] > 1), None)

        # block sums of sorted groups up to and including the one holding K
        groups, j = [], 1
        while j <= K_full:
            if j <= spectrum.size:
                lo, hi = spectrum.sorted_group_bounds(j)
            else:
                lo, hi = j, K_full
            groups.append((lo, hi, mp.fsum(terms[lo - 1:hi])))
            j = hi + 1

        def group_of(k):
            return next(g for g in range(len(groups)) if groups[g][0] <= k <= groups[g][1])

        verdict, tail, tail_ratio, q = "inconclusive", None, None, None
        rising = False
        if len(checkpoints) >= 2:
            g_prev, g_last = group_of(checkpoints[-2]), group_of(K)
            rising = g_last != g_prev and groups[g_last][2] > groups[g_prev][2]

        g_last = group_of(K)
        win = [g[2] for g in groups[max(0, g_last - window + 1):g_last + 1]]
        if first_big is not None or rising:
            verdict = "diverging"
        elif len(win) >= 2 or all(w == 0 for w in win):
            ratios = []
            for a, b in zip(win, win[1:]):
                if a == 0:
                    ratios.append(mpf(0) if b == 0 else mp.inf)
                else:
                    ratios.append(b / a)
            q = max(ratios) if ratios else mpf(0)
            monotone = all(b <= a for a, b in zip(win, win[1:]))
            if monotone and q < 1:
                rest = mp.fsum(terms[K:K_full])
                tail = rest + win[-1] * q / (1 - q)
                tail_ratio = tail / S if S != 0 else mpf(0)
                threshold = mpf(10) ** -(mpmath.libmp.prec_to_dps(precision) / 2)
                if tail <= threshold * S:
                    verdict = "converging"

    with mp.workprec(precision):
        rnd = lambda x: None if x is None else +x  # noqa: E731
        return SeriesEvaluation(
            exponent.describe(), tuple(checkpoints), tuple(+p for p in partial),
            tuple(+terms[c - 1] for c in checkpoints), verdict, rnd(tail), rnd(tail_ratio),
            rnd(q), first_big, tuple(+t for t in terms[:K]))


@dataclass(frozen=True)
class EnvelopeCheck:
    indices: tuple
    values: tuple
    monotone_from: int | None
    monotone: bool


def decay_envelope_check(spectrum, n_values, precision=None):
    """s_j j^{j^{1/m}/(delta m)} at the requested flat indices.

    ``monotone_from`` is the first sampled index after which the samples are
    strictly decreasing to the end; ``monotone`` is true when such an index
    exists with at least two samples after it.
    """
    if precision is None:
        precision = spectrum.precision
    m = spectrum.m
    n_values = sorted(set(int(j) for j in n_values))
    vals = []
    with mp.workprec(precision):
        for j in n_values:
            s = spectrum.sorted_value(j)
            vals.append(s / decay_bound(j, m, precision) if s != 0 else mpf(0))
    start = len(vals) - 1
    while start > 0 and vals[start - 1] > vals[start]:
        start -= 1
    ok = len(vals) - start >= 3
    return EnvelopeCheck(tuple(n_values), tuple(vals), n_values[start] if ok else None, ok)


def block_end_indices(m, levels):
    """Flat indices d_n^{m+1} closing each block, n = 0..levels."""
    return [cum_dim(n, m) for n in range(levels + 1)]


# --------------------------------------------------------------------------
# Index bookkeeping


@dataclass(frozen=True)
class IndexInequality:
    m: int
    n0: int
    n_max: int
    violations: tuple


def index_inequality(m, n_max=10 ** 4):
    """Smallest n0 with d_n^{m+1} <= (delta n)^m for every n in [n0, n_max]."""
    d = delta(m)
    bad = [n for n in range(1, n_max + 1) if cum_dim(n, m) > (d * n) ** m]
    n0 = (max(bad) + 1) if bad else 1
    return IndexInequality(m, n0, n_max, tuple(bad))


def lemma45_violations(m, n_max=10 ** 4):
    """n where delta^m (n+1)^m - (delta n)^m > m delta^m 2^{m-1} n^{m-1}."""
    d = delta(m)
    return [n for n in range(1, n_max + 1)
            if d ** m * (n + 1) ** m - (d * n) ** m > m * d ** m * 2 ** (m - 1) * n ** (m - 1)]


@dataclass(frozen=True)
class ChainCheck:
    checkpoints: tuple
    partial_sums: tuple
    bounds: tuple
    holds: tuple
    n0: int


def remark_chain_check(spectrum, checkpoints, precision=None):
    """Compare partial sums (alpha = 0) with C + delta^{m-1} sum_{n0<=n<=L} delta^n / n^n.

    C is the exact contribution of levels below n0 (from the index
    inequality) and L is the level holding each checkpoint.
    """
    if precision is None:
        precision = spectrum.precision
    m = spectrum.m
    d = delta(m)
    n0 = index_inequality(m, max(100, level_of_index(max(checkpoints), m) + 1)).n0
    series = series_eval(spectrum, ExponentSpec("zero"), checkpoints, precision)
    with mp.workprec(precision + 20):
        head = cum_dim(n0 - 1, m)
        C = mp.fsum(series.terms[:head]) if head <= len(series.terms) else mp.fsum(series.terms)
        bounds = []
        for K in series.checkpoints:
            L = level_of_index(K, m)
            bounds.append(C + mpf(d) ** (m - 1) * mp.fsum(mpf(d) ** n / mpf(n) ** n
                                                          for n in range(n0, L + 1)))
        holds = tuple(bool(s <= b) for s, b in zip(series.partial_sums, bounds))
    return ChainCheck(series.checkpoints, series.partial_sums, tuple(bounds), holds, n0)
