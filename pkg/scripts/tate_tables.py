"""Print Tate cohomology tables of cyclic groups, computed by both pipelines.

    python scripts/tate_tables.py --max-order 6 --window -8 8
"""

import argparse
import time
from dataclasses import dataclass

from tatecalc.tate_cohomology import CyclicGroup, GModule, tate_GT, tate_HMT


@dataclass
class TableConfig:
    max_order: int = 6
    lo: int = -8
    hi: int = 8
    module: str = "trivial"  # trivial, sign or free


def build(G: CyclicGroup, kind: str) -> GModule:
    if kind == "trivial":
        return GModule.trivial(G)
    if kind == "sign":
        return GModule.sign(G)
    return GModule.free(G)


def main(cfg: TableConfig) -> int:
    bad = 0
    for n in range(2, cfg.max_order + 1):
        if cfg.module == "sign" and n % 2:
            continue
        G = CyclicGroup(n)
        X = build(G, cfg.module)
        t0 = time.perf_counter()
        gt = tate_GT(G, X, (cfg.lo, cfg.hi))
        hmt = tate_HMT(G, X, (cfg.lo, cfg.hi))
        dt = time.perf_counter() - t0
        cells = " ".join(f"{-i}:{'+'.join(map(str, gt[i])) or '0'}" for i in sorted(gt, key=lambda i: -i))
        agree = gt == hmt
        bad += not agree
        print(f"C{n} {cfg.module:8s} {'agree' if agree else 'DIFFER'} {dt:5.2f}s  {cells}")
    return 1 if bad else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-order", type=int, default=6)
    ap.add_argument("--window", type=int, nargs=2, default=(-8, 8))
    ap.add_argument("--module", choices=("trivial", "sign", "free"), default="trivial")
    a = ap.parse_args()
    raise SystemExit(main(TableConfig(a.max_order, a.window[0], a.window[1], a.module)))
