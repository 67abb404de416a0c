import numpy as np
import pytest
from mpmath import mp, mpf

from spherespec.errors import DomainError, KernelParseError
from spherespec.grammar import parse_kernel, read_zonal_table
from spherespec.kernels import (
    DotProduct,
    ExplicitCoefficients,
    Gaussian,
    Moller,
    Multiquadric,
    Optimality,
    PointwiseZonal,
    expand,
)


def test_families():
    assert isinstance(parse_kernel("optimality"), Optimality)
    assert isinstance(parse_kernel("optimality()"), Optimality)
    g = parse_kernel("gaussian(r=2)")
    assert isinstance(g, Gaussian) and g.r == 2
    mq = parse_kernel(" multiquadric( sigma = 1 , delta=0.5 ) ")
    assert isinstance(mq, Multiquadric) and mq.delta == mpf("0.5")
    mo = parse_kernel("moller(alpha=2,beta=1e-1,tau=1/2)")
    assert isinstance(mo, Moller) and mo.sigma == 1
    with mp.workprec(256):
        assert mo.tau == mpf(1) / 2
    ex = parse_kernel("explicit(1, 0.5, -2)")
    assert isinstance(ex, ExplicitCoefficients) and len(ex.coeffs) == 3
    dp = parse_kernel("dotproduct(1,2,3)")
    assert isinstance(dp, DotProduct) and dp.finite
    geo = parse_kernel("dotproduct(q=0.5,scale=2)")
    assert not geo.finite and geo.power_coefficient(3) == mpf("0.25")


def test_decimal_parameters_keep_working_precision():
    spec = parse_kernel("multiquadric(sigma=1,delta=0.1)", 512)
    with mp.workprec(512):
        assert abs(spec.delta - mpf("0.1")) < mpf(2) ** -510


@pytest.mark.parametrize("text,position", [
    ("gausian(r=1)", 0),
    ("gaussian(r=1", 12),
    ("gaussian(r=)", 11),
    ("gaussian(s=1)", 9),
    ("gaussian()", 8),
    ("gaussian(r=1,r=2)", 13),
    ("gaussian(1)", 9),
    ("explicit()", 8),
    ("explicit(1;2)", 10),
    ("optimality extra", 11),
    ("dotproduct(q=0.5,1)", 17),
    ("(r=1)", 0),
])
def test_parse_errors_point_at_offender(text, position):
    with pytest.raises(KernelParseError) as info:
        parse_kernel(text)
    assert info.value.position == position
    lines = info.value.annotated().splitlines()
    assert lines[2].index("^") - 2 == position


@pytest.mark.parametrize("text", [
    "gaussian(r=0)", "multiquadric(sigma=1,delta=1.5)", "moller(alpha=1,beta=-1,tau=1)",
    "dotproduct(q=1.5)",
])
def test_invalid_values_are_domain_errors(text):
    with pytest.raises(DomainError):
        parse_kernel(text)


def test_zonal_table(tmp_path):
    t = np.linspace(-1, 1, 401)
    path = tmp_path / "table.txt"
    path.write_text("# t f\n" + "\n".join(f"{float(a)!r}, {float(np.exp(a))!r}" for a in t))
    spec = parse_kernel(f"zonal-table:{path}")
    assert isinstance(spec, PointwiseZonal)
    E = expand(spec, 2, 4, 64)
    ref = expand(parse_kernel("gaussian(r=2)"), 2, 4, 64)
    for a, b in zip(E.coeffs, ref.coeffs):
        assert abs(a - b) < 1e-8


@pytest.mark.parametrize("content,match", [
    ("0 1\n0.5 1\n", "at least 4"),
    ("-1 1\n0 1\n0.5 1\n0.9 1\n", "cover"),
    ("-1 1\n0 1\n-0.5 1\n1 1\n", "increasing"),
    ("-1 1 2\n", "two columns"),
    ("-1 a\n", "non-numeric"),
])
def test_zonal_table_errors(tmp_path, content, match):
    path = tmp_path / "bad.txt"
    path.write_text(content)
    with pytest.raises(DomainError, match=match):
        read_zonal_table(str(path))
    with pytest.raises(DomainError):
        read_zonal_table(str(tmp_path / "missing.txt"))
    with pytest.raises(KernelParseError):
        parse_kernel("zonal-table:")
