"""Deterministic JSON and CSV encodings of expansions, spectra and reports.

Extended-precision numbers travel as decimal strings with enough digits to
round-trip at their precision.  Field order is fixed by construction, so the
same object always encodes to the same bytes.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import mp, mpf

from .errors import DomainError
from .kernels import PROVENANCES, LegendreExpansion
from .spectra import Block, Spectrum


def decimal_string(x, precision):
    """Shortest fixed-width decimal that reads back to ``x`` at ``precision`` bits."""
    with mp.workprec(precision):
        x = mpf(x)
        return mpmath.libmp.to_str(x._mpf_, mpmath.libmp.repr_dps(precision))


def parse_decimal(text, precision):
    if not isinstance(text, str):
        raise DomainError(f"expected a decimal string, got {text!r}")
    with mp.workprec(precision):
        try:
            return mpf(text)
        except ValueError:
            raise DomainError(f"malformed decimal string {text!r}") from None


def to_jsonable(obj, precision):
    """Plain JSON structure for library results; ``mpf`` becomes a decimal string."""
    if isinstance(obj, LegendreExpansion):
        return expansion_to_dict(obj)
    if isinstance(obj, Spectrum):
        return spectrum_to_dict(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {}
        for f in dataclasses.fields(obj):
            if f.repr:
                out[f.name] = to_jsonable(getattr(obj, f.name), precision)
        return out
    if isinstance(obj, mpf):
        return decimal_string(obj, precision)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else repr(x)
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(x, precision) for x in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, precision) for k, v in obj.items()}
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(data):
    return json.dumps(data, indent=2, ensure_ascii=True) + "\n"


def expansion_to_dict(expansion):
    p = expansion.precision
    return {
        "m": expansion.m,
        "coeffs": [decimal_string(c, p) for c in expansion.coeffs],
        "precision_bits": p,
        "provenance": expansion.provenance,
        "complete": expansion.complete,
    }


def expansion_from_dict(data):
    try:
        m, coeffs, p = int(data["m"]), data["coeffs"], int(data["precision_bits"])
        provenance = data.get("provenance", "explicit")
    except (KeyError, TypeError, ValueError):
        raise DomainError("expansion JSON needs integer 'm', 'precision_bits' and a 'coeffs' list") from None
    if provenance not in PROVENANCES:
        raise DomainError(f"unknown provenance {provenance!r}")
    if not isinstance(coeffs, list):
        raise DomainError("'coeffs' must be a list of decimal strings")
    base = tuple(parse_decimal(c, p) for c in coeffs)
    return LegendreExpansion(m, base, p, provenance, None, bool(data.get("complete", False)))


def spectrum_to_dict(spectrum):
    p = spectrum.precision
    return {
        "m": spectrum.m,
        "precision_bits": p,
        "complete": spectrum.complete,
        "blocks": [{"level": b.level, "value": decimal_string(b.value, p),
                    "multiplicity": b.multiplicity} for b in spectrum.blocks],
    }


def spectrum_from_dict(data):
    try:
        m, p, raw = int(data["m"]), int(data["precision_bits"]), data["blocks"]
        blocks = tuple(Block(int(b["level"]), parse_decimal(b["value"], p), int(b["multiplicity"]))
                       for b in raw)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError("spectrum JSON needs 'm', 'precision_bits' and 'blocks' "
                          "of {level, value, multiplicity}") from None
    return Spectrum(m, blocks, p, bool(data.get("complete", False)))


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()
