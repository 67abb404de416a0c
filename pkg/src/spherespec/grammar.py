"""Parser for kernel strings such as ``multiquadric(sigma=1,delta=0.5)``.

Grammar::

    kernel  := name [ "(" [ arg ("," arg)* ] ")" ]  |  "zonal-table:" path
    arg     := key "=" number  |  number
    number  := decimal literal, optionally "p/q"

Numbers are converted to ``mpf`` at the requested precision so that decimal
parameters such as 0.1 are as exact as the working precision allows.
"""
from __future__ import annotations

import re

import numpy as np
from mpmath import mp, mpf

from .errors import DomainError, KernelParseError
from .kernels import (
    DotProduct,
    ExplicitCoefficients,
    Gaussian,
    Moller,
    Multiquadric,
    Optimality,
    PointwiseZonal,
)

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_-]*")
_KEY = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/\d+)?")

# family -> (required keys, optional keys with defaults, positional allowed)
_FAMILIES = {
    "gaussian": (("r",), {}, False),
    "multiquadric": (("sigma", "delta"), {}, False),
    "moller": (("alpha", "beta", "tau"), {"sigma": "1"}, False),
    "optimality": ((), {}, False),
    "dotproduct": ((), {"q": None, "scale": "1"}, True),
    "explicit": ((), {}, True),
}


class _Cursor:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip_space(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_space()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def match(self, pattern):
        self.skip_space()
        mt = pattern.match(self.text, self.pos)
        if mt is None:
            return None, self.pos
        start = self.pos
        self.pos = mt.end()
        return mt.group(0), start

    def fail(self, message, position=None):
        raise KernelParseError(message, self.text, self.pos if position is None else position)


def _to_mpf(token):
    num, _, den = token.partition("/")
    value = mpf(num)
    return value / int(den) if den else value


def _parse_args(cur):
    """List of (key or None, value, start offset) up to the closing parenthesis."""
    args = []
    if cur.peek() == ")":
        cur.pos += 1
        return args
    while True:
        start = cur.pos
        key, kpos = cur.match(_KEY)
        if key is not None and cur.peek() == "=":
            cur.pos += 1
        else:
            cur.pos, key = start, None
        token, tpos = cur.match(_NUMBER)
        if token is None:
            cur.fail("expected a number")
        args.append((key, _to_mpf(token), kpos if key else tpos))
        ch = cur.peek()
        if ch == ",":
            cur.pos += 1
        elif ch == ")":
            cur.pos += 1
            return args
        elif ch == "":
            cur.fail("missing ')'")
        else:
            cur.fail(f"unexpected character {ch!r}")


def read_zonal_table(path):
    """Rows ``t f(t)`` (whitespace or comma separated, '#' comments) as two arrays."""
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DomainError(f"cannot read zonal table {path!r}: {exc.strerror}") from None
    rows = []
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DomainError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise DomainError(f"{path}:{lineno}: non-numeric entry") from None
    if len(rows) < 4:
        raise DomainError(f"{path}: need at least 4 samples, got {len(rows)}")
    t = np.array([r[0] for r in rows])
    f = np.array([r[1] for r in rows])
    if np.any(np.diff(t) <= 0):
        raise DomainError(f"{path}: abscissae must be strictly increasing")
    if t[0] > -1 or t[-1] < 1:
        raise DomainError(f"{path}: samples must cover [-1, 1], got [{t[0]}, {t[-1]}]")
    return t, f


def zonal_table_kernel(path):
    """Pointwise kernel from tabulated samples, cubic-spline interpolated in binary64."""
    from scipy.interpolate import CubicSpline

    t, f = read_zonal_table(path)
    spline = CubicSpline(t, f)
    return PointwiseZonal(lambda x: float(spline(float(x))), label=f"zonal-table:{path}")


def parse_kernel(text, precision=256):
    """Build a kernel specification from its string form and validate it."""
    stripped = text.strip()
    if stripped.startswith("zonal-table:"):
        path = stripped[len("zonal-table:"):]
        if not path:
            raise KernelParseError("missing path after 'zonal-table:'", text, len(text))
        return zonal_table_kernel(path)
    cur = _Cursor(text)
    with mp.workprec(precision + 16):
        name, npos = cur.match(_NAME)
        if name is None:
            cur.fail("expected a kernel name")
        if name not in _FAMILIES:
            cur.fail(f"unknown kernel {name!r}; expected one of {', '.join(sorted(_FAMILIES))}, zonal-table:path", npos)
        args = []
        open_pos = cur.pos
        if cur.peek() == "(":
            cur.pos += 1
            args = _parse_args(cur)
        if cur.peek() != "":
            cur.fail("unexpected trailing text")
        spec = _build(name, args, cur, open_pos)
    spec.validate()
    return spec


def _build(name, args, cur, open_pos):
    required, optional, positional_ok = _FAMILIES[name]
    keyed, positional = {}, []
    for key, value, pos in args:
        if key is None:
            if not positional_ok:
                cur.fail(f"{name} takes key=value arguments only", pos)
            if keyed:
                cur.fail("positional argument after key=value", pos)
            positional.append(value)
            continue
        if key not in required and key not in optional:
            allowed = ", ".join(required + tuple(optional)) or "none"
            cur.fail(f"unknown parameter {key!r} for {name} (allowed: {allowed})", pos)
        if key in keyed:
            cur.fail(f"duplicate parameter {key!r}", pos)
        keyed[key] = value
    for key in required:
        if key not in keyed:
            cur.fail(f"{name} needs parameter {key!r}", open_pos)
    values = {k: (mpf(v) if v is not None else None) for k, v in optional.items()}
    values.update(keyed)
    label = cur.text.strip()

    if name == "gaussian":
        return Gaussian(values["r"])
    if name == "multiquadric":
        return Multiquadric(values["sigma"], values["delta"])
    if name == "moller":
        return Moller(values["alpha"], values["beta"], values["tau"], values["sigma"])
    if name == "optimality":
        return Optimality()
    if name == "explicit":
        if not positional:
            cur.fail("explicit needs at least one coefficient", open_pos)
        return ExplicitCoefficients(tuple(positional))
    # dotproduct: finite list or geometric q^n series
    if positional and "q" in keyed:
        cur.fail("dotproduct takes either a coefficient list or q=, not both", open_pos)
    if positional:
        return DotProduct(tuple(positional), label=label)
    q, scale = values["q"], values["scale"]
    if q is None:
        cur.fail("dotproduct needs a coefficient list or q=", open_pos)
    if not (0 < q < 1 and scale > 0):
        raise DomainError(f"dotproduct: need 0 < q < 1 and scale > 0, got q={q}, scale={scale}")
    return DotProduct(lambda n: scale * q ** n, label=label)
