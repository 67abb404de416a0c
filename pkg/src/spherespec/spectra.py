"""Block spectra of zonal integral operators and Laplace-Beltrami multipliers."""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from mpmath import mp, mpf

from .errors import DomainError
from .harmonics import cum_dim, dim_harmonic
from .kernels import schoenberg_check


@dataclass(frozen=True)
class Block:
    level: int
    value: mpf
    multiplicity: int


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue blocks (level, value, multiplicity) of a zonal operator.

    Two flat orderings are exposed: ``flat_block_order`` lists level after
    level, ``flat_sorted`` is non-increasing in absolute value with ties kept
    in level order.  Flat indices are 1-based throughout.
    """

    m: int
    blocks: tuple
    precision: int
    complete: bool = False

    @property
    def size(self):
        return sum(b.multiplicity for b in self.blocks)

    @cached_property
    def sorted_blocks(self):
        with mp.workprec(self.precision):
            return tuple(sorted(self.blocks, key=lambda b: -abs(b.value)))

    @cached_property
    def _sorted_ends(self):
        ends, acc = [], 0
        for b in self.sorted_blocks:
            acc += b.multiplicity
            ends.append(acc)
        return ends

    def sorted_block_at(self, j):
        """(position, block) of the sorted block holding flat index ``j``."""
        if j < 1:
            raise DomainError(f"flat index must be >= 1, got {j}")
        pos = bisect.bisect_left(self._sorted_ends, j)
        if pos == len(self.sorted_blocks):
            return pos, None
        return pos, self.sorted_blocks[pos]

    def sorted_value(self, j):
        """s_j: the j-th largest |eigenvalue| (1-based).

        Beyond the stored levels the value is 0 for a complete spectrum;
        for a truncated spectrum the request is rejected.
        """
        pos, block = self.sorted_block_at(j)
        if block is None:
            if self.complete:
                return mpf(0)
            raise DomainError(f"flat index {j} exceeds truncated spectrum of size {self.size}")
        with mp.workprec(self.precision):
            return abs(block.value)

    def sorted_group_bounds(self, j):
        """First and last flat index of the sorted block containing ``j``."""
        pos, block = self.sorted_block_at(j)
        if block is None:
            raise DomainError(f"flat index {j} beyond stored spectrum")
        end = self._sorted_ends[pos]
        return end - block.multiplicity + 1, end

    @cached_property
    def flat_block_order(self):
        """Tuples (index, level, value) in level order."""
        out, j = [], 0
        for b in self.blocks:
            for _ in range(b.multiplicity):
                j += 1
                out.append((j, b.level, b.value))
        return tuple(out)

    @cached_property
    def flat_sorted(self):
        """Tuples (index, level, value) non-increasing in |value|."""
        out, j = [], 0
        for b in self.sorted_blocks:
            for _ in range(b.multiplicity):
                j += 1
                out.append((j, b.level, b.value))
        return tuple(out)

    def block_index_range(self, level):
        """First and last flat index of ``level`` in block order."""
        return cum_dim(level - 1, self.m) + 1, cum_dim(level, self.m)


def eigenvalue_blocks(expansion):
    """Blocks (n, c_n / d_n^m, d_n^m) for n = 0..N."""
    m = expansion.m
    with mp.workprec(expansion.precision):
        blocks = tuple(Block(n, c / dim_harmonic(n, m), dim_harmonic(n, m))
                       for n, c in enumerate(expansion.coeffs))
    return Spectrum(m, blocks, expansion.precision, expansion.complete)


def derivative_multiplier(n, m):
    """Eigenvalue n(n+m-1)/m of the Laplace-Beltrami derivative on level n."""
    return Fraction(n * (n + m - 1), m)


def lb_derivative(expansion, r):
    """Coefficients of D_y^r K: c_n (n(n+m-1)/m)^r, the constant term removed."""
    if r < 1:
        raise DomainError(f"derivative order r must be >= 1, got {r}")
    m = expansion.m
    return expansion.rescaled([derivative_multiplier(n, m) ** r
                               for n in range(expansion.truncation_level + 1)])


def j_operator(expansion, r):
    """Apply J^r: level 0 kept, level n >= 1 scaled by (m/(n(n+m-1)))^r."""
    if r < 1:
        raise DomainError(f"power r must be >= 1, got {r}")
    m = expansion.m
    mult = [Fraction(1)] + [1 / derivative_multiplier(n, m) ** r
                            for n in range(1, expansion.truncation_level + 1)]
    return expansion.rescaled(mult)


def hs_norm(expansion):
    """Hilbert-Schmidt norm sqrt(sum_n c_n^2 / d_n^m)."""
    m = expansion.m
    with mp.workprec(expansion.precision + 10):
        total = mp.fsum(c * c / dim_harmonic(n, m) for n, c in enumerate(expansion.coeffs))
        res = mp.sqrt(total)
    with mp.workprec(expansion.precision):
        return +res


@dataclass(frozen=True)
class GrowthReport:
    r_max: int
    norms: tuple
    M_hat: mpf
    R_hat: mpf
    satisfied: bool
    R_exceeds_one: bool


def growth_rate(expansion, r_max):
    """Empirical constants M, R with ||K_{0,r}||_2 <= M R^r for r = 0..r_max.

    R is the largest consecutive norm ratio over r in [r_max/2, r_max] and M
    the smallest constant making the bound hold on the computed range.  For a
    truncated expansion this is a diagnostic only.
    """
    if r_max < 2:
        raise DomainError(f"r_max must be >= 2, got {r_max}")
    norms = [hs_norm(expansion)] + [hs_norm(lb_derivative(expansion, r))
                                    for r in range(1, r_max + 1)]
    with mp.workprec(expansion.precision):
        ratios = [norms[r + 1] / norms[r] for r in range(r_max // 2, r_max)
                  if norms[r] != 0]
        R_hat = max(ratios) if ratios else mpf(1)
        M_hat = max(nr / R_hat ** r for r, nr in enumerate(norms))
        slack = 1 + mpf(2) ** -(expansion.precision - 20)
        ok = mp.isfinite(R_hat) and all(nr <= M_hat * R_hat ** r * slack
                                        for r, nr in enumerate(norms))
        return GrowthReport(r_max, tuple(norms), M_hat, R_hat, bool(ok), bool(R_hat > 1))


@dataclass(frozen=True)
class S1Result:
    value: mpf
    level_attained: int | None
    matches_level1: bool
    at_truncation_edge: bool


def s1_of_derivative(expansion, r):
    """Largest singular value of the operator generated by D_y^r K.

    Computed as max over levels n >= 1 of (c_n/d_n^m) (n(n+m-1)/m)^r, and
    compared against the level-1 value.
    """
    if not schoenberg_check(expansion).positive_definite:
        raise DomainError("s1_of_derivative needs an L2-PD expansion (nonnegative coefficients)")
    m = expansion.m
    N = expansion.truncation_level
    with mp.workprec(expansion.precision + 10):
        best, level = mpf(0), None
        for n in range(1, N + 1):
            c = expansion.coeffs[n]
            if c == 0:
                continue
            mult = derivative_multiplier(n, m) ** r
            v = c / dim_harmonic(n, m) * mult.numerator / mult.denominator
            if v > best:
                best, level = v, n
    with mp.workprec(expansion.precision):
        best = +best
    edge = level == N and not expansion.complete
    return S1Result(best, level, level == 1, edge)
