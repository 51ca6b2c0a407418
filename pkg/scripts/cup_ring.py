"""Check the cup product ring of C_2 with F_2 coefficients on a window of degrees."""

import argparse
import time

from tatecalc.tate_cohomology import verify_cup_ring

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--window", type=int, nargs=2, default=(-4, 4))
    ap.add_argument("--perturbations", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    t0 = time.perf_counter()
    r = verify_cup_ring(tuple(a.window), a.perturbations, a.seed)
    print(f"u*u nonzero      {r.nonzero_square}")
    print(f"unital           {r.unital}")
    print(f"all products     {r.products_nonzero}")
    print(f"associative      {r.associative} ({r.triples} triples)")
    print(f"rep independent  {r.independent} ({r.perturbations} perturbations)")
    print(f"{time.perf_counter() - t0:.2f}s")
    for f in r.failures[:10]:
        print("failure:", f)
    raise SystemExit(0 if r.ok else 1)
