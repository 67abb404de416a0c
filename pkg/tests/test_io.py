import json

from hypothesis import given, strategies as st
from mpmath import mp, mpf

from spherespec.decay import ExponentSpec, series_eval
from spherespec.io import (
    decimal_string,
    dumps,
    expansion_from_dict,
    expansion_to_dict,
    parse_decimal,
    spectrum_from_dict,
    spectrum_to_dict,
    to_jsonable,
)
from spherespec.kernels import Gaussian, Optimality, expand
from spherespec.spectra import eigenvalue_blocks

import pytest
from spherespec.errors import DomainError


@given(st.integers(64, 1024), st.floats(allow_nan=False, allow_infinity=False),
       st.integers(-300, 300))
def test_decimal_round_trip(prec, x, e):
    with mp.workprec(prec):
        v = mpf(x) / 3 * mpf(10) ** e
    assert parse_decimal(decimal_string(v, prec), prec) == v


def test_expansion_round_trip_is_exact():
    E = expand(Gaussian(1), 2, 20, 512)
    data = json.loads(dumps(expansion_to_dict(E)))
    assert list(data) == ["m", "coeffs", "precision_bits", "provenance", "complete"]
    back = expansion_from_dict(data)
    assert back.coeffs == E.coeffs and back.precision == 512 and back.m == 2


def test_spectrum_round_trip_is_exact():
    S = eigenvalue_blocks(expand(Optimality(), 3, 15, 256))
    back = spectrum_from_dict(json.loads(dumps(spectrum_to_dict(S))))
    assert back.blocks == S.blocks


def test_report_serialisation_is_deterministic():
    S = eigenvalue_blocks(expand(Optimality(), 2, 12, 128))
    a = dumps(to_jsonable(series_eval(S, ExponentSpec("zero"), [20, 100]), 128))
    b = dumps(to_jsonable(series_eval(S, ExponentSpec("zero"), [20, 100]), 128))
    assert a == b and "terms" not in json.loads(a)


def test_malformed_documents():
    with pytest.raises(DomainError):
        expansion_from_dict({"m": 2})
    with pytest.raises(DomainError):
        expansion_from_dict({"m": 2, "coeffs": ["x"], "precision_bits": 64})
    with pytest.raises(DomainError):
        spectrum_from_dict({"m": 2, "precision_bits": 64, "blocks": [{"level": 0}]})
