"""Series behaviour of the extremal kernel: convergence at alpha = 0, divergence on the critical root exponent.

    python3 scripts/optimality_demo.py --m 2 --levels 99 --checkpoints 100,1000,10000
"""
import argparse
from dataclasses import dataclass

from mpmath import mp

from spherespec import Optimality, eigenvalue_blocks, expand, exponent_from_string, series_eval
from spherespec.decay import block_end_indices, decay_envelope_check, divergence_parameters


@dataclass(frozen=True)
class DemoConfig:
    m: int = 2
    levels: int = 99
    precision: int = 512
    checkpoints: tuple = (100, 1000, 10000)
    ell: float = 0.9


def run(cfg):
    S = eigenvalue_blocks(expand(Optimality(), cfg.m, cfg.levels, cfg.precision))
    print(f"m={cfg.m}, levels 0..{cfg.levels}, {S.size} eigenvalues at {cfg.precision} bits")
    print("first blocks (level, eigenvalue, multiplicity):")
    for b in S.blocks[:6]:
        print(f"  {b.level:3d}  {mp.nstr(b.value, 12):>20}  {b.multiplicity}")

    params = divergence_parameters(cfg.m, cfg.ell)
    print(f"\nlimit of d_n^(m+1)/n^m: brute force {params.limit_brute_force:.12g}, "
          f"2/m! = {params.limit_stated:.12g}")
    print(f"divergent exponent: ell={params.ell:.6g}, n_ell={params.n_ell}, kappa={params.kappa:.6g}")

    for label in ("zero", f"root:auto-divergent={cfg.ell}"):
        ev = series_eval(S, exponent_from_string(label, cfg.m), cfg.checkpoints)
        print(f"\nexponent {ev.exponent}: verdict {ev.verdict}")
        for K, s, t in zip(ev.checkpoints, ev.partial_sums, ev.term_values):
            print(f"  K={K:6d}  partial sum {mp.nstr(s, 15):>24}  term {mp.nstr(t, 6)}")
        if ev.tail_ratio is not None:
            print(f"  tail / sum <= {mp.nstr(ev.tail_ratio, 4)}")

    idx = [j for j in block_end_indices(cfg.m, cfg.levels)[1:] if j <= max(cfg.checkpoints)]
    env = decay_envelope_check(S, idx)
    print(f"\nnormalised envelope at block ends: decreasing from index {env.monotone_from}")
    for j, v in list(zip(env.indices, env.values))[::max(1, len(idx) // 8)]:
        print(f"  j={j:6d}  {mp.nstr(v, 6)}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--levels", type=int, default=99)
    ap.add_argument("--precision", type=int, default=512)
    ap.add_argument("--checkpoints", default="100,1000,10000")
    ap.add_argument("--ell", type=float, default=0.9)
    a = ap.parse_args()
    run(DemoConfig(a.m, a.levels, a.precision, tuple(int(x) for x in a.checkpoints.split(",")), a.ell))


if __name__ == "__main__":
    main()
