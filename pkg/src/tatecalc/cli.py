"""Command-line front end.

Every command writes its data table to stdout (or to --out DIR) as JSON or
CSV and a report with one verdict per check.  The exit status is 0 when all
verdicts pass, 1 when any fails and 2 for usage or schema errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import __version__
from . import schemas
from .filtered_ss import SpectralSequence, canonical_form
from .graded_algebra import GradedModulePresentation, PresentationError, laurent_W, tor
from .operad_lab import operad_check
from .schemas import SchemaError, csv_text, factors
from .sigma_e1 import (SigmaModule, check_hm_linearity, check_monoidal, e1_of_module, sample_modules,
                       verify_CCS)
from .tate_cohomology import GModule, tate_GT, tate_HMT
from .tp_engine import TateSSInput, kunneth_ss, run_tate_ss, witt_lift

COMMANDS = ("tate-cohomology", "ss-run", "hm-e1", "operad-check", "tp-lift", "tor", "roundtrip")
THREADS_ENV = "TATECALC_THREADS"


@dataclass
class Verdict:
    name: str
    ok: bool
    detail: Any = None


@dataclass
class Report:
    command: list[str]
    verdicts: list[Verdict] = field(default_factory=list)
    files: list[str] = field(default_factory=list)
    wall_clock: float = 0.0

    def add(self, name: str, ok: bool, detail: Any = None) -> None:
        self.verdicts.append(Verdict(name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    def to_json(self) -> dict:
        failing = next((v for v in self.verdicts if not v.ok), None)
        return {
            "command": self.command,
            "version": __version__,
            "wall_clock_s": round(self.wall_clock, 3),
            "ok": self.ok,
            "verdicts": [{"name": v.name, "ok": v.ok, "detail": v.detail} for v in self.verdicts],
            "files": self.files,
            "first_failure": None if failing is None else {"name": failing.name, "detail": failing.detail},
        }


@dataclass
class Table:
    """Rows for CSV output; ``doc`` is the JSON form."""

    header: list[str]
    rows: list[list[Any]]
    doc: Any


# --------------------------------------------------------------------------
# argument helpers


def parse_window(s: str) -> tuple[int, int]:
    try:
        a, b = s.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like a..b, got {s!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty window {s!r}")
    return lo, hi


def _shared(p: argparse.ArgumentParser, window: str | None = None) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=parse_window, default=parse_window(window) if window else None)
    p.add_argument("--precision", type=int, default=None, help="Witt precision N")
    p.add_argument("--max-page", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path, default=None, help="directory for data and report files")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tatecalc", description="Exact Tate, spectral sequence and operad computations.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("tate-cohomology", help="Tate cohomology of a cyclic group by both pipelines")
    _shared(p, "-8..8")
    p.add_argument("--group", required=True)
    p.add_argument("--module", type=Path, default=None, help="gmodule file (default: trivial Z)")
    p.add_argument("--localize", type=int, default=None, help="keep only the p-primary part")

    p = sub.add_parser("ss-run", help="spectral sequence of a preset or a filtered complex")
    _shared(p, "-6..6")
    p.add_argument("--preset", choices=("tate-cpr", "tate-circle"), default=None)
    p.add_argument("--input", type=Path, default=None, help="filtered-complex or tate-ss-input file")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--r", type=int, default=1)

    p = sub.add_parser("hm-e1", help="E^1 of a sigma-module and the kernel of sigma")
    _shared(p, "-4..4")
    p.add_argument("--input", type=Path, default=None, help="sigma-module file (default: the sphere)")
    p.add_argument("--samples", action="store_true", help="run on the built-in sample modules")
    p.add_argument("--ccs", action="store_true", help="also check ker sigma on E^1(S) against HM")
    p.add_argument("--j-window", type=parse_window, default=parse_window("-2..3"))
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--trials", type=int, default=200)

    p = sub.add_parser("operad-check", help="randomized exact checks of the interval operads")
    _shared(p)
    for flag in ("axioms", "coaction", "moore", "bimodule"):
        p.add_argument(f"--{flag}", action="store_true")
    p.add_argument("--trials", type=int, default=1000)

    p = sub.add_parser("tp-lift", help="assemble Witt coefficients from E^infinity digits")
    _shared(p)
    p.add_argument("--input", type=Path, required=True)

    p = sub.add_parser("tor", help="Tor of graded modules (Kunneth E^2 over W[v^±] with --ring tp)")
    _shared(p, "-4..4")
    p.add_argument("--ring", default="auto", choices=("auto", "tp"))
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--modules", nargs=2, required=True, metavar=("M", "N"),
                   help="module files, or for --ring tp the shorthands free and torsion:k")
    p.add_argument("--bound", type=int, default=3, help="largest homological degree")

    p = sub.add_parser("roundtrip", help="parse, serialize and re-parse input files")
    _shared(p)
    p.add_argument("files", nargs="+", type=Path)
    return ap


# --------------------------------------------------------------------------
# commands (each a thin wrapper over one library entry point)


def cmd_tate_cohomology(a, rep: Report) -> Table:
    G = schemas.parse_group(a.group)
    X = schemas.load(a.module, "gmodule") if a.module else GModule.trivial(G)
    if X.group.n != G.n:
        raise SchemaError(f"module is for C{X.group.n}, not C{G.n}", str(a.module))
    gt = tate_GT(G, X, a.window, p=a.localize)
    hmt = tate_HMT(G, X, a.window, p=a.localize)
    rep.add("GT and HMT pipelines agree", gt == hmt,
            None if gt == hmt else {str(-i): [gt[i], hmt[i]] for i in gt if gt[i] != hmt[i]})
    rows = [[-i, factors(gt[i])] for i in sorted(gt, key=lambda i: -i)]
    return Table(["degree", "invariant_factors"], rows,
                 {"group": f"C{G.n}", "module": X.name, "table": {str(d): f.split(";") if f else [] for d, f in rows}})


def cmd_ss_run(a, rep: Report) -> Table:
    doc = schemas.load_document(a.input) if a.input else None
    if doc is not None and doc.get("schema") == "filtered-complex":
        F = schemas.parse(doc, "filtered-complex", str(a.input))
        ss = SpectralSequence(F)
        last = a.max_page if a.max_page is not None else ss.r_infinity
        rep.add("d^r d^r = 0 on every page", all(ss.check_d_squared(r) for r in range(0, ss.r_infinity + 1)))
        rep.add("E^{r+1} = H(E^r, d^r)", all(ss.check_next_page(r) for r in range(0, ss.r_infinity)))
        rep.add("E^infinity = Gr H", ss.check_convergence())
        if a.max_page is not None:
            rep.add(f"E^{a.max_page} = E^infinity", ss.collapse_page() <= a.max_page, ss.collapse_page())
        rows = []
        for r in range(0, min(last, ss.r_infinity) + 1):
            for (p, n), g in sorted(ss.page(r).groups.items()):
                if g:
                    rows.append([r, p, n - p, factors(g)])
        for (p, n), g in sorted(ss.e_infinity().items()):
            if g:
                rows.append(["inf", p, n - p, factors(g)])
        return Table(["page", "p", "q", "invariant_factors"], rows, {"rows": rows})
    if doc is not None:
        inp = schemas.parse(doc, "tate-ss-input", str(a.input))
    elif a.preset is not None:
        inp = TateSSInput("cyclic" if a.preset == "tate-cpr" else "circle", a.p, a.r)
    else:
        raise SchemaError("ss-run needs --preset or --input")
    N = a.precision or 8
    R = run_tate_ss(inp, a.window, a.max_page, N=N)
    if a.max_page is not None:
        rep.add(f"E^{a.max_page} = E^infinity", R.collapse_page <= a.max_page, {"collapse_page": R.collapse_page})
    rep.add("abutment lengths match the target", R.matches_target,
            {"abutment": R.abutment, "target": R.target})
    rep.add("truncation certificate", R.certificate, {"cap": R.cap})
    rep.add("Leibniz rule for the differential", R.leibniz)
    rep.add("E^infinity = Gr H of the cut complex", R.converges)
    rep.add("E^infinity finitely generated", R.finite,
            {"generators": [list(g) for g in R.generators], "bound": R.generator_bound})
    rows = []
    for r, page in sorted(R.pages.items()):
        for (p, q), g in sorted(page.items()):
            rows.append([r, p, q, factors(g)])
    for (p, q), g in sorted(R.e_infinity.items()):
        rows.append(["inf", p, q, factors(g)])
    return Table(["page", "p", "q", "invariant_factors"], rows,
                 {"input": schemas.tate_input_to_json(inp), "rows": rows,
                  "abutment": {str(k): v for k, v in R.abutment.items()}, "collapse_page": R.collapse_page})


def cmd_hm_e1(a, rep: Report) -> Table:
    if a.samples:
        modules = sample_modules()
    elif a.input:
        modules = [schemas.load(a.input, "sigma-module")]
    else:
        modules = [SigmaModule.sphere()]
    i_max = max(abs(a.window[0]), abs(a.window[1]))
    rows = []
    rng = random.Random(a.seed)
    for X in modules:
        X.validate()
        _, verdicts = e1_of_module(X, i_max, a.n_max)
        bad = [v for v in verdicts if not v.ok]
        rep.add(f"{X.name}: HM (x) pi_*X -> ker sigma bijective per bidegree", not bad,
                [[list(v.summand), v.degree] for v in bad[:5]] or None)
        lin = check_hm_linearity(X, rng, a.trials)
        rep.add(f"{X.name}: HM-linear", not lin, lin[:3] or None)
        mon = check_monoidal(X, X, rng, a.trials)
        rep.add(f"{X.name}: monoidal", not mon, mon[:3] or None)
        for v in verdicts:
            if a.window[0] <= v.bidegree[0] <= a.window[1]:
                rows.append([v.bidegree[0], v.bidegree[1], X.name, v.summand[0], v.summand[1],
                             factors(_orders(v.kernel)), v.ok])
    if a.ccs:
        res = verify_CCS(range(a.window[0], a.window[1] + 1), range(a.j_window[0], a.j_window[1] + 1), a.n_max)
        bad = [k for k, v in res.items() if not v.ok]
        rep.add("ker sigma on E^1(S) is free on x^m z^n, x^m y z^n", not bad, [list(k) for k in bad[:5]] or None)
        rep.add("ker sigma = im(sigma + eta)", all(v.equals_image for v in res.values()))
        for (i, j), v in sorted(res.items()):
            rows.append([i, j, "S:ccs", "", "", factors(_orders(v.kernel)), v.ok])
    rows.sort(key=lambda r: (r[0], r[1], r[2], str(r[3]), str(r[4])))
    return Table(["i", "j", "module", "m", "n", "kernel_invariant_factors", "ok"], rows, {"rows": rows})


def _orders(canon: tuple) -> list[int]:
    free, torsion = canon
    return [0] * free + list(torsion)


def cmd_operad_check(a, rep: Report) -> Table:
    flags = [a.axioms, a.coaction, a.moore, a.bimodule]
    if not any(flags):
        flags = [True] * 4
    results = operad_check(a.seed, a.trials, *flags)
    rows = []
    for r in results:
        rep.add(r.name, r.ok, None if r.ok else {"first_counterexample": repr(r.failures[0])})
        rows.append([r.name, r.trials, len(r.failures)])
    return Table(["suite", "trials", "failures"], rows, {"rows": rows})


def cmd_tp_lift(a, rep: Report) -> Table:
    doc = schemas.load_document(a.input)
    if doc.get("schema", "witt-data") != "witt-data":
        raise SchemaError("expected schema 'witt-data'", str(a.input))
    try:
        data, targets = schemas.witt_from_json(doc, a.precision)
    except SchemaError as e:
        raise SchemaError(str(e), str(a.input)) from None
    lifts = witt_lift(data, targets)
    rows = []
    for k, L in enumerate(lifts):
        rep.add(f"target {k}: partial sums are p-adically Cauchy", L.cauchy)
        for l, c in enumerate(L.coefficients):
            rows.append([L.target.bidegree[0], L.target.bidegree[1], l, c])
    return Table(["i", "j", "generator", "coefficient"], rows,
                 {"p": data.p, "N": data.N, "rows": rows})


def _tp_module(token: str, p: int, N: int) -> GradedModulePresentation:
    R = laurent_W(p, N)
    if token == "free":
        return GradedModulePresentation.free(R, [(0,)])
    if token.startswith("torsion:"):
        k = int(token.split(":", 1)[1])
        return GradedModulePresentation.cyclic(R, [(R.one(), p ** k)])
    raise SchemaError(f"unknown module shorthand {token!r}")


def cmd_tor(a, rep: Report) -> Table:
    window = list(range(a.window[0], a.window[1] + 1))
    mods = []
    for tok in a.modules:
        if a.ring == "tp" and not Path(tok).exists():
            if a.p is None or a.N is None:
                raise SchemaError("module shorthands need --p and --N")
            mods.append(_tp_module(tok, a.p, a.N))
        else:
            mods.append(schemas.load(tok, "module"))
    M, N = mods
    if a.ring == "tp":
        K = kunneth_ss(M, N, window, a.bound)
        rep.add("Tor_{>=2} = 0 over W[v^±]", K.two_column)
        rep.add("two-column E^2 collapses", K.collapses)
        rep.add("F_p shadow: Tor_{>0} = 0", K.fp_field)
        rep.add("rational shadow: Tor_{>0} = 0", K.q_field)
        T = K.tor
    else:
        T = tor(M, N, a.bound, window if M.ring.laurent_period() is not None else None)
        rep.add("Tor agrees with its independent oracle", True, T.method or None)
    rows = [[s, *d, v] for s, d, v in T.rows()]
    ndeg = len(T.rows()[0][1]) if T.rows() else 1
    header = ["s"] + [f"degree{k}" if ndeg > 1 else "degree" for k in range(ndeg)] + ["invariant_factors"]
    return Table(header, rows, {"ring": T.ring, "rows": rows})


def cmd_roundtrip(a, rep: Report) -> Table:
    threads = max(1, int(os.environ.get(THREADS_ENV, "1")))

    def one(path: Path):
        try:
            ok, first, second = schemas.roundtrip(path)
            return str(path), ok, None if ok else {"first": first, "second": second}
        except SchemaError as e:
            return str(path), False, {"schema_error": str(e)}

    with ThreadPoolExecutor(threads) as pool:
        results = list(pool.map(one, a.files))
    rows = []
    for path, ok, detail in results:
        rep.add(f"round-trip {path}", ok, detail)
        rows.append([path, ok])
    if any(d and "schema_error" in d for _, _, d in results):
        raise SchemaError("; ".join(d["schema_error"] for _, _, d in results if d and "schema_error" in d))
    return Table(["file", "ok"], rows, {"rows": rows})


DISPATCH = {
    "tate-cohomology": cmd_tate_cohomology,
    "ss-run": cmd_ss_run,
    "hm-e1": cmd_hm_e1,
    "operad-check": cmd_operad_check,
    "tp-lift": cmd_tp_lift,
    "tor": cmd_tor,
    "roundtrip": cmd_roundtrip,
}


# --------------------------------------------------------------------------


def _normalize_argv(argv: list[str]) -> list[str]:
    """Glue ``--window -6..6`` into ``--window=-6..6`` so negative ranges parse."""
    out, k = [], 0
    while k < len(argv):
        tok = argv[k]
        if tok in ("--window", "--j-window") and k + 1 < len(argv):
            out.append(f"{tok}={argv[k + 1]}")
            k += 2
            continue
        out.append(tok)
        k += 1
    return out


def _emit(a, rep: Report, table: Table) -> None:
    if a.format == "csv":
        text = csv_text(table.header, table.rows)
    else:
        text = schemas.canonical_json(table.doc)
    if a.out is not None:
        name = f"{a.command}.{a.format}"
        schemas.write_atomic(a.out / name, text)
        rep.files.append(str(a.out / name))
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> tuple[int, Report | None]:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        a = ap.parse_args(_normalize_argv(argv))
    except SystemExit as e:
        return (2 if e.code else 0), None
    if a.command is None:
        ap.print_help(sys.stderr)
        sys.stderr.write(f"\nknown commands: {', '.join(COMMANDS)}\n")
        return 2, None
    rep = Report(["tatecalc", *argv])
    t0 = time.perf_counter()
    try:
        table = DISPATCH[a.command](a, rep)
    except (SchemaError, PresentationError) as e:
        rep.add("input parses against its schema", False, str(e))
        rep.wall_clock = time.perf_counter() - t0
        _report(a, rep)
        sys.stderr.write(f"schema error: {e}\n")
        return 2, rep
    except ValueError as e:
        rep.add("inputs valid", False, str(e))
        rep.wall_clock = time.perf_counter() - t0
        _report(a, rep)
        sys.stderr.write(f"error: {e}\n")
        return 2, rep
    rep.wall_clock = time.perf_counter() - t0
    _emit(a, rep, table)
    _report(a, rep)
    return (0 if rep.ok else 1), rep


def _report(a, rep: Report) -> None:
    if getattr(a, "out", None) is not None:
        schemas.write_atomic(a.out / "report.json", json.dumps(rep.to_json(), indent=2, default=str) + "\n")
    for v in rep.verdicts:
        sys.stderr.write(f"{'PASS' if v.ok else 'FAIL'}  {v.name}\n")


def main(argv: list[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
