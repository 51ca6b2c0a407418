"""Run the Tate spectral sequence presets and report collapse pages and abutment lengths."""

import argparse
import time
from dataclasses import dataclass, field

from tatecalc.tp_engine import TateSSInput, run_tate_ss


@dataclass
class PresetConfig:
    primes: list[int] = field(default_factory=lambda: [2, 3, 5])
    heights: list[int] = field(default_factory=lambda: [1, 2])
    precisions: list[int] = field(default_factory=lambda: [4, 8])
    window: tuple[int, int] = (-6, 6)


def main(cfg: PresetConfig) -> int:
    failed = 0
    runs = [(TateSSInput("cyclic", p, r), 8) for p in cfg.primes for r in cfg.heights]
    runs += [(TateSSInput("circle", p, 1), N) for p in cfg.primes for N in cfg.precisions]
    for inp, N in runs:
        t0 = time.perf_counter()
        R = run_tate_ss(inp, cfg.window, N=N)
        dt = time.perf_counter() - t0
        lengths = sorted(set(R.abutment.values()))
        failed += not R.ok
        print(f"{inp.group:6s} p={inp.p} r={inp.r} N={N}  collapse E^{R.collapse_page}  "
              f"lengths {lengths}  {'ok' if R.ok else 'FAIL'}  {dt:.2f}s")
    return 1 if failed else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3, 5])
    ap.add_argument("--window", type=int, nargs=2, default=(-6, 6))
    a = ap.parse_args()
    raise SystemExit(main(PresetConfig(primes=a.primes, window=tuple(a.window))))
