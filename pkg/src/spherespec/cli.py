"""Command line front-end: one subcommand per pipeline stage.

Exit codes: 0 ok, 2 parse error, 3 domain error, 4 non-convergence.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field

from mpmath import mp

from . import io as sio
from .decay import exponent_from_string, series_eval, verify_lemma42
from .errors import ConvergenceError, DomainError, ParseError
from .grammar import parse_kernel
from .harmonics import DEFAULT_PRECISION, level_of_index
from .kernels import CATALOG, LegendreExpansion, expand
from .oracle import build_grid, oracle_check
from .spectra import eigenvalue_blocks, lb_derivative

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 2, 3, 4
PRECISION_ENV = "SPHERESPEC_PRECISION_BITS"
MIN_PRECISION = 64


@dataclass(frozen=True)
class RunConfig:
    command: str
    kernel: str | None
    m: int | None
    levels: int | None
    precision: int
    fmt: str = "json"
    output: str | None = None
    input: str | None = None
    options: dict = field(default_factory=dict)

    def validate(self):
        if self.precision < MIN_PRECISION:
            raise DomainError(f"precision must be >= {MIN_PRECISION} bits, got {self.precision}")
        if self.levels is not None and self.levels < 0:
            raise DomainError(f"levels must be >= 0, got {self.levels}")
        if self.m is not None and self.m < 2:
            raise DomainError(f"m must be >= 2, got {self.m}")
        if self.command != "catalog" and (self.kernel is None) == (self.input is None):
            raise DomainError("give exactly one of --kernel or --input")


def default_precision(environ=None):
    env = os.environ if environ is None else environ
    text = env.get(PRECISION_ENV)
    if text is None or text.strip() == "":
        return DEFAULT_PRECISION
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{PRECISION_ENV} must be an integer", text, 0) from None


def _checkpoints(text):
    out = []
    pos = 0
    for tok in text.split(","):
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"checkpoint {tok!r} is not an integer", text, pos) from None
        pos += len(tok) + 1
    return out


def _grid(text):
    p, sep, a = text.lower().partition("x")
    try:
        if not sep:
            raise ValueError
        return int(p), int(a)
    except ValueError:
        raise ParseError("grid must look like PxA, e.g. 40x80", text, 0) from None


# --------------------------------------------------------------------------
# Sources


def _load_input(cfg):
    data = sio.load_json(cfg.input)
    if not isinstance(data, dict):
        raise DomainError(f"{cfg.input}: expected a JSON object")
    if "coeffs" in data:
        obj = sio.expansion_from_dict(data)
    elif "blocks" in data:
        obj = sio.spectrum_from_dict(data)
    else:
        raise DomainError(f"{cfg.input}: neither an expansion nor a spectrum")
    if cfg.m is not None and cfg.m != obj.m:
        raise DomainError(f"--m {cfg.m} conflicts with m={obj.m} in {cfg.input}")
    return obj


def _source(cfg, default_levels, allow_spectrum=False):
    """(kernel spec or None, expansion or None, spectrum or None) for the run."""
    if cfg.input is not None:
        obj = _load_input(cfg)
        if isinstance(obj, LegendreExpansion):
            return None, obj, None
        if not allow_spectrum:
            raise DomainError(f"{cfg.command} needs an expansion as input, got a spectrum")
        return None, None, obj
    spec = parse_kernel(cfg.kernel, cfg.precision)
    m = 2 if cfg.m is None else cfg.m
    N = cfg.levels
    if N is None and spec.name != "explicit":
        N = default_levels(m)
    return spec, expand(spec, m, N, cfg.precision), None


def _spectrum_of(expansion, spectrum):
    return spectrum if spectrum is not None else eigenvalue_blocks(expansion)


# --------------------------------------------------------------------------
# Commands; each returns (json data, csv header, csv rows)


def _expansion_rows(E):
    return ["n", "c_n"], [(n, sio.decimal_string(c, E.precision)) for n, c in enumerate(E.coeffs)]


def cmd_expand(cfg):
    _, E, _ = _source(cfg, lambda m: 30)
    return (sio.expansion_to_dict(E), *_expansion_rows(E))


def cmd_derivative(cfg):
    _, E, _ = _source(cfg, lambda m: 30)
    D = lb_derivative(E, cfg.options["r"])
    return (sio.expansion_to_dict(D), *_expansion_rows(D))


def cmd_spectrum(cfg):
    _, E, S = _source(cfg, lambda m: 30, allow_spectrum=True)
    S = _spectrum_of(E, S)
    flat = S.flat_sorted if cfg.options.get("order", "sorted") == "sorted" else S.flat_block_order
    rows = [(j, lvl, sio.decimal_string(v, S.precision)) for j, lvl, v in flat]
    return sio.spectrum_to_dict(S), ["index", "level", "value"], rows


def cmd_decay_check(cfg):
    n_max = cfg.options["n_max"]
    _, E, _ = _source(cfg, lambda m: 3 * n_max + 9)
    report = verify_lemma42(eigenvalue_blocks(E), E, n_max)
    p = E.precision
    data = sio.to_jsonable(report, p)
    data["all_hold"] = report.all_hold
    rows = [(n, j, sio.decimal_string(a, p), sio.decimal_string(b, p), sio.decimal_string(r, p), ok)
            for n, j, a, b, r, ok in zip(report.indices, report.flat_indices, report.lhs,
                                         report.rhs, report.ratios, report.verdicts)]
    return data, ["n", "flat_index", "lhs", "rhs", "ratio", "holds"], rows


def cmd_series(cfg):
    checkpoints = cfg.options["checkpoints"]
    if not checkpoints or min(checkpoints) < 1:
        raise DomainError("checkpoints must be positive integers")
    K = max(checkpoints)
    _, E, S = _source(cfg, lambda m: level_of_index(K, m), allow_spectrum=True)
    S = _spectrum_of(E, S)
    exponent = exponent_from_string(cfg.options["alpha"], S.m)
    result = series_eval(S, exponent, checkpoints, S.precision)
    p = S.precision
    data = sio.to_jsonable(result, p)
    rows = []
    with mp.workprec(p + 20):
        acc = 0
        for j, t in enumerate(result.terms, 1):
            acc += t
            rows.append((j, sio.decimal_string(t, p), sio.decimal_string(acc, p)))
    return data, ["index", "term", "partial_sum"], rows


def cmd_oracle_check(cfg):
    n_pol, n_az = cfg.options["grid"]
    k = cfg.options["top_k"]
    spec, E, _ = _source(cfg, lambda m: 30)
    report = oracle_check(spec, E, eigenvalue_blocks(E), build_grid(n_pol, n_az), k)
    data = sio.to_jsonable(report, E.precision)
    data["clusters_match"] = report.comparison.clusters_match
    c = report.comparison
    rows = [(i + 1, repr(float(a)), repr(float(b)), repr(float(e)))
            for i, (a, b, e) in enumerate(zip(c.numeric, c.analytic, c.rel_errors))]
    return data, ["k", "numeric", "analytic", "rel_error"], rows


def cmd_catalog(cfg):
    rows = [(name, key, rng) for name, entry in CATALOG.items()
            for key, rng in entry["params"].items()]
    return CATALOG, ["family", "parameter", "constraint"], rows


COMMANDS = {
    "expand": cmd_expand,
    "spectrum": cmd_spectrum,
    "derivative": cmd_derivative,
    "decay-check": cmd_decay_check,
    "series": cmd_series,
    "oracle-check": cmd_oracle_check,
    "catalog": cmd_catalog,
}


# --------------------------------------------------------------------------
# Argument handling


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kernel", help="kernel string, e.g. 'gaussian(r=1)'")
    common.add_argument("--input", help="expansion or spectrum JSON from an earlier command")
    common.add_argument("--m", type=int, help="sphere dimension (default 2)")
    common.add_argument("--levels", type=int, help="truncation level N")
    common.add_argument("--precision", type=int,
                        help=f"working precision in bits (default ${PRECISION_ENV} or {DEFAULT_PRECISION})")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="output file (default stdout)")

    parser = argparse.ArgumentParser(prog="spherespec",
                                     description="Spectra of zonal kernels on spheres.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("expand", parents=[common], help="condensed Legendre coefficients")
    p = sub.add_parser("spectrum", parents=[common], help="eigenvalue blocks")
    p.add_argument("--order", choices=("sorted", "block"), default="sorted",
                   help="row order of the CSV output")
    p = sub.add_parser("derivative", parents=[common], help="Laplace-Beltrami derivative D^r")
    p.add_argument("--r", type=int, default=1)
    p = sub.add_parser("decay-check", parents=[common], help="verify the decay chain up to n-max")
    p.add_argument("--n-max", type=int, default=30)
    p = sub.add_parser("series", parents=[common], help="weighted eigenvalue series")
    p.add_argument("--alpha", default="zero",
                   help="zero | power:p | root:kappa | root:auto-divergent[=ell] | file:path")
    p.add_argument("--checkpoints", default="100,1000,10000")
    p = sub.add_parser("oracle-check", parents=[common], help="Nystrom cross-check on S^2")
    p.add_argument("--grid", default="40x80")
    p.add_argument("--top-k", type=int, default=16)
    sub.add_parser("catalog", parents=[common], help="kernel families and parameter ranges")
    return parser


def config_from_args(ns):
    options = {}
    if ns.command == "spectrum":
        options["order"] = ns.order
    elif ns.command == "derivative":
        options["r"] = ns.r
    elif ns.command == "decay-check":
        options["n_max"] = ns.n_max
    elif ns.command == "series":
        options["alpha"] = ns.alpha
        options["checkpoints"] = _checkpoints(ns.checkpoints)
    elif ns.command == "oracle-check":
        options["grid"] = _grid(ns.grid)
        options["top_k"] = ns.top_k
    precision = ns.precision if ns.precision is not None else default_precision()
    return RunConfig(ns.command, ns.kernel, ns.m, ns.levels, precision, ns.fmt,
                     ns.output, ns.input, options)


def render(cfg, data, header, rows):
    if cfg.fmt == "csv":
        return sio.csv_text(header, rows)
    return sio.dumps(data)


def run(cfg):
    """Execute a validated config and return the output text."""
    cfg.validate()
    return render(cfg, *COMMANDS[cfg.command](cfg))


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        text = run(cfg)
    except ParseError as exc:
        print(f"spherespec: parse error: {exc.annotated()}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"spherespec: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"spherespec: did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    if cfg.output:
        try:
            with open(cfg.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"spherespec: cannot write {cfg.output}: {exc.strerror}", file=sys.stderr)
            return EXIT_DOMAIN
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # downstream closed early (e.g. piped into head); not an error
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
