"""Acceptance suite: ten end-to-end checks at their stated tolerances.

Each criterion is a plain function returning (passed, detail).  Under pytest
every one becomes a test and a PASS/FAIL line is printed in the terminal
summary; ``python3 tests/test_acceptance.py`` prints the same lines directly.
"""
import random
import time
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from spherespec.decay import (
    ExponentSpec,
    block_end_indices,
    decay_envelope_check,
    divergence_parameters,
    exponent_from_string,
    index_inequality,
    lemma45_violations,
    series_eval,
    verify_lemma42,
)
from spherespec.harmonics import cum_dim, delta, dim_harmonic
from spherespec.kernels import (
    Gaussian,
    LegendreExpansion,
    Multiquadric,
    Optimality,
    catalog_coefficients,
    dot_product_coefficients,
    expand,
    project_zonal,
)
from spherespec.oracle import build_grid, oracle_check
from spherespec.spectra import eigenvalue_blocks, j_operator, lb_derivative


def _fmt(x):
    return mp.nstr(x, 3) if isinstance(x, mpf) else f"{x:.3g}"


def _max_rel(a, b, prec):
    with mp.workprec(prec):
        return max(abs(x - y) / abs(y) for x, y in zip(a, b))


def criterion_1():
    t0 = time.perf_counter()
    ok = True
    for m in range(2, 7):
        acc = 0
        for n in range(1001):
            acc += dim_harmonic(n, m)
            ok &= dim_harmonic(n, m + 1) == acc == cum_dim(n, m)
            if m == 2:
                ok &= dim_harmonic(n, 2) == 2 * n + 1
    dt = time.perf_counter() - t0
    return ok and dt < 5, f"recurrence and d_n^2 = 2n+1 for m=2..6, n<=1000 in {dt:.2f} s (< 5 s)"


def criterion_2():
    t0 = time.perf_counter()
    spec = Multiquadric(1, mpf(1) / 2)
    closed = catalog_coefficients(spec, 2, 50, 256)
    proj = project_zonal(spec, 2, 50, 256, rule_order=128)
    err = _max_rel(proj.coeffs, closed.coeffs, 256)
    dt = time.perf_counter() - t0
    return err < mpf(10) ** -25 and dt < 30, f"max rel error {_fmt(err)} (< 1e-25) in {dt:.2f} s (< 30 s)"


def criterion_3():
    spec = Gaussian(1)
    power = dot_product_coefficients(spec, 2, 30, 256)
    proj = project_zonal(spec, 2, 30, 256)
    err = _max_rel(power.coeffs, proj.coeffs, 256)
    return err < mpf(10) ** -20, f"max rel error {_fmt(err)} between power and projection paths (< 1e-20)"


def criterion_4():
    prec = 512
    S = eigenvalue_blocks(catalog_coefficients(Optimality(), 2, 41, prec))
    worst = 0
    for n in range(1, 41):
        got = S.sorted_value((n + 1) ** 2)
        exact = Fraction(1, n ** (2 * n + 1))
        man, exp = got.man_exp
        diff = abs(Fraction(man) * Fraction(2) ** exp - exact) / exact
        worst = max(worst, diff * 2 ** prec)
    # the value is c_n / d_n with c_n rounded once: at most a few units in the last place
    return worst <= 4, f"s_(n+1)^2 vs n^(-2n-1), n=1..40: worst {float(worst):.2f} ulp at {prec} bits (<= 4)"


def criterion_5():
    t0 = time.perf_counter()
    parts, ok = [], True
    for name, spec in (("optimality", Optimality()), ("gaussian", Gaussian(1))):
        E = expand(spec, 2, 99, 512)
        rep = verify_lemma42(eigenvalue_blocks(E), E, 30)
        ok &= rep.all_hold and not any(rep.edge_levels)
        with mp.workprec(512):
            parts.append(f"{name} max lhs/rhs {_fmt(max(rep.ratios))}")
    dt = time.perf_counter() - t0
    return ok and dt < 60, f"n=1..30 at 512 bits: {', '.join(parts)} in {dt:.2f} s (< 60 s)"


def criterion_6():
    n0s, ok = {}, True
    for m in range(2, 7):
        rep = index_inequality(m, 10 ** 4)
        d = delta(m)
        ok &= all(cum_dim(n, m) <= (d * n) ** m for n in range(rep.n0, 10 ** 4 + 1))
        ok &= lemma45_violations(m, 10 ** 4) == []
        n0s[m] = rep.n0
    ok &= n0s[2] == 1
    return ok, "n0 per m: " + ", ".join(f"m={m}: {v}" for m, v in n0s.items()) + " (n <= 1e4)"


def criterion_7():
    S = eigenvalue_blocks(catalog_coefficients(Optimality(), 2, 99, 512))
    conv = series_eval(S, ExponentSpec("zero"), [100, 1000, 10000])
    ok_conv = conv.verdict == "converging" and conv.tail_ratio < mpf(10) ** -30
    params = divergence_parameters(2, 0.9)
    div = series_eval(S, exponent_from_string("root:auto-divergent=0.9", 2), [100, 1000, 10000])
    big = [K for K, t in zip(div.checkpoints, div.term_values) if t > 1]
    ok_div = div.verdict == "diverging" and bool(big)
    detail = (f"alpha=0: {conv.verdict}, tail/sum {_fmt(conv.tail_ratio)} (< 1e-30); "
              f"beta (ell=0.9, kappa={params.kappa:.5f}): {div.verdict}, "
              f"terms > 1 at checkpoints {big}, first at index {div.first_term_above_one}")
    return ok_conv and ok_div, detail


def criterion_8():
    parts, ok = [], True
    idx = block_end_indices(2, 99)[1:]
    for name, spec in (("optimality", Optimality()), ("gaussian", Gaussian(1))):
        S = eigenvalue_blocks(expand(spec, 2, 99, 512))
        ec = decay_envelope_check(S, idx)
        last = ec.values[-1]
        ok &= ec.monotone and idx[-1] == 10 ** 4 and last < mpf(10) ** -30
        parts.append(f"{name} decreasing from index {ec.monotone_from}, value at 1e4 {_fmt(last)}")
    return ok, "block-end samples: " + "; ".join(parts) + " (< 1e-30)"


def criterion_9():
    t0 = time.perf_counter()
    spec = Gaussian(1)
    E = expand(spec, 2, 30, 256)
    rep = oracle_check(spec, E, eigenvalue_blocks(E), build_grid(40, 80), 16)
    c = rep.comparison
    dt = time.perf_counter() - t0
    ok = (c.max_rel_error < 1e-8 and c.numeric_clusters == (1, 3, 5, 7)
          and rep.trace_rel_error < 1e-8 and rep.frobenius_rel_error < 1e-8 and dt < 120)
    return ok, (f"40x80 grid: top-16 max rel error {c.max_rel_error:.2e}, clusters {c.numeric_clusters}, "
                f"trace {rep.trace_rel_error:.1e}, Frobenius {rep.frobenius_rel_error:.1e} in {dt:.2f} s")


def criterion_10():
    rnd = random.Random(20240611)
    failures = 0
    for _ in range(1000):
        m, r, N, prec = rnd.randint(2, 7), rnd.randint(1, 8), rnd.randint(1, 40), rnd.choice([64, 128, 512])
        with mp.workprec(prec):
            cs = tuple(mpf(rnd.uniform(-1, 1)) * mpf(2) ** rnd.randint(-200, 200) for _ in range(N + 1))
        E = LegendreExpansion(m, cs, prec)
        F = j_operator(lb_derivative(E, r), r)
        G = lb_derivative(j_operator(E, r), r)
        failures += F.coeffs[1:] != E.coeffs[1:] or G.coeffs[1:] != E.coeffs[1:]
    return failures == 0, f"1000 random trials (m=2..7, r=1..8, N<=40): {failures} inexact"


CRITERIA = [
    (1, "dimension suite", criterion_1),
    (2, "projection round trip", criterion_2),
    (3, "dual-path Gaussian", criterion_3),
    (4, "optimality spectrum", criterion_4),
    (5, "decay chain, exact product", criterion_5),
    (6, "index inequality", criterion_6),
    (7, "series engine", criterion_7),
    (8, "decay envelope", criterion_8),
    (9, "Nystrom cross-check", criterion_9),
    (10, "inverse property", criterion_10),
]


def evaluate(number, title, fn):
    t0 = time.perf_counter()
    passed, detail = fn()
    line = f"[{'PASS' if passed else 'FAIL'}] AC{number:<2} {title}: {detail} [{time.perf_counter() - t0:.2f} s]"
    return passed, line


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"AC{n}" for n, _, _ in CRITERIA])
def test_acceptance(number, title, fn, request):
    passed, line = evaluate(number, title, fn)
    print(line)
    lines = request.config.__dict__.setdefault("acceptance_lines", {})
    lines[number] = line
    assert passed, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line, flush=True)
    raise SystemExit(0 if all(p for p, _ in results) else 1)
