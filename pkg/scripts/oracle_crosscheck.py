"""Nystrom eigenvalues on refining S^2 grids against the analytic block spectrum."""
import argparse
import time
from dataclasses import dataclass

from spherespec import eigenvalue_blocks, expand, parse_kernel
from spherespec.oracle import build_grid, oracle_check


@dataclass(frozen=True)
class CrossCheckConfig:
    kernel: str = "gaussian(r=1)"
    grids: tuple = ((20, 40), (40, 80), (60, 120))
    top_k: int = 16
    levels: int = 60
    precision: int = 256


def run(cfg):
    spec = parse_kernel(cfg.kernel, cfg.precision)
    E = expand(spec, 2, cfg.levels, cfg.precision)
    S = eigenvalue_blocks(E)
    print(f"kernel {cfg.kernel}, top {cfg.top_k} eigenvalues")
    print(f"{'grid':>9} {'max rel err':>12} {'trace err':>10} {'frob err':>10} {'min eig':>10}  clusters  time")
    for n_pol, n_az in cfg.grids:
        t0 = time.perf_counter()
        rep = oracle_check(spec, E, S, build_grid(n_pol, n_az), cfg.top_k)
        c = rep.comparison
        print(f"{n_pol:>4}x{n_az:<4} {c.max_rel_error:12.2e} {rep.trace_rel_error:10.1e} "
              f"{rep.frobenius_rel_error:10.1e} {rep.min_eigenvalue:10.1e}  "
              f"{'ok' if c.clusters_match else 'MISMATCH':8}  {time.perf_counter() - t0:.2f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kernel", default="gaussian(r=1)")
    ap.add_argument("--grids", default="20x40,40x80,60x120")
    ap.add_argument("--top-k", type=int, default=16)
    ap.add_argument("--levels", type=int, default=60)
    a = ap.parse_args()
    grids = tuple(tuple(int(v) for v in g.split("x")) for g in a.grids.split(","))
    run(CrossCheckConfig(a.kernel, grids, a.top_k, a.levels))


if __name__ == "__main__":
    main()
