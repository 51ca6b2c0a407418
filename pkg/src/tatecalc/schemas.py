"""Schemas, parsing, serialization and round-tripping for every input type.

Every document is a JSON object with a "schema" tag:

    gmodule           a cyclic group acting on Z^r / relations
    module            a graded module presentation over a named ring
    sigma-module      a Lambda-module with sigma
    filtered-complex  a bounded complex with a basis-vector filtration
    witt-data         generators, offsets and digit tables for Witt assembly
    tate-ss-input     group, prime and cyclic module summands for the Tate SS

TOML files are accepted when a TOML reader is importable and are
normalized to the same JSON objects.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Callable

from .filtered_ss import FilteredComplex
from .graded_algebra import GradedModulePresentation, PresentationError
from .sigma_e1 import SigmaError, SigmaModule
from .tate_cohomology import CyclicGroup, GModule, TateError
from .tp_engine import ModuleSummand, TateSSError, TateSSInput, WittFiltrationData, WittGenerator, WittTarget

try:  # Python >= 3.11
    import tomllib as _toml
except ImportError:  # pragma: no cover - depends on the interpreter
    try:
        import tomli as _toml
    except ImportError:
        _toml = None


class SchemaError(ValueError):
    def __init__(self, msg: str, path: str = "", line: int | None = None):
        where = path + (f":{line}" if line else "")
        super().__init__(f"{where}: {msg}" if where else msg)
        self.path, self.line = path, line


# --------------------------------------------------------------------------
# per-schema converters


def gmodule_to_json(X: GModule) -> dict:
    return {"schema": "gmodule", "group": f"C{X.group.n}", "rank": X.rank, "action": X.action,
            "relations": X.rels, "name": X.name}


def parse_group(s: str | int) -> CyclicGroup:
    if isinstance(s, int):
        return CyclicGroup(s)
    if isinstance(s, str) and s[:1] in "Cc" and s[1:].isdigit():
        return CyclicGroup(int(s[1:]))
    raise SchemaError(f"group must look like C<n>, got {s!r}")


def gmodule_from_json(d: dict, group: CyclicGroup | None = None) -> GModule:
    G = group or parse_group(d.get("group", "C2"))
    kind = d.get("kind")
    order = int(d.get("order", 0))
    if kind == "trivial":
        return GModule.trivial(G, order)
    if kind == "sign":
        return GModule.sign(G, order)
    if kind == "free":
        return GModule.free(G, order)
    try:
        return GModule(G, int(d["rank"]), [[int(x) for x in row] for row in d["action"]],
                       [[int(x) for x in row] for row in d.get("relations", [])], d.get("name", ""))
    except KeyError as e:
        raise SchemaError(f"gmodule is missing field {e}") from None


def filtered_complex_to_json(F: FilteredComplex) -> dict:
    levels = {}
    for n, by_level in F.new_gens.items():
        lv = [None] * F.dim(n)
        for p, vecs in by_level.items():
            for v in vecs:
                nz = [k for k, x in enumerate(v) if x]
                if len(nz) != 1 or v[nz[0]] != 1:
                    raise SchemaError("only basis-vector filtrations serialize")
                lv[nz[0]] = p
        levels[str(n)] = lv
    return {"schema": "filtered-complex", "name": F.name,
            "dims": {str(n): d for n, d in sorted(F.dims.items())},
            "diff": {str(n): m for n, m in sorted(F.diff.items())},
            "levels": dict(sorted(levels.items(), key=lambda kv: int(kv[0]))),
            "relations": {str(n): r for n, r in sorted(F.rels.items()) if r}}


def filtered_complex_from_json(d: dict) -> FilteredComplex:
    try:
        dims = {int(n): int(v) for n, v in d["dims"].items()}
        diff = {int(n): [[int(x) for x in row] for row in m] for n, m in d.get("diff", {}).items()}
        levels = {int(n): [int(x) for x in lv] for n, lv in d["levels"].items()}
        rels = {int(n): [[int(x) for x in row] for row in r] for n, r in d.get("relations", {}).items()}
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"malformed filtered complex: {e}") from None
    for n, dn in dims.items():
        if len(levels.get(n, [])) != dn:
            raise SchemaError(f"degree {n} needs {dn} filtration levels")
    for n, m in diff.items():
        if len(m) != dims.get(n - 1, 0) or any(len(row) != dims.get(n, 0) for row in m):
            raise SchemaError(f"differential out of degree {n} has the wrong shape")
    return FilteredComplex.from_levels(dims, diff, levels, rels, d.get("name", ""))


def witt_to_json(data: WittFiltrationData, targets: list[WittTarget]) -> dict:
    return {"schema": "witt-data", "p": data.p, "N": data.N,
            "generators": [list(g.bidegree) for g in data.generators], "offsets": data.offsets,
            "targets": [{"bidegree": list(t.bidegree), "digits": t.digits} for t in targets]}


def witt_from_json(d: dict, precision: int | None = None) -> tuple[WittFiltrationData, list[WittTarget]]:
    try:
        data = WittFiltrationData(int(d["p"]), int(precision or d["N"]),
                                  [WittGenerator((int(i), int(j))) for i, j in d["generators"]],
                                  [int(s) for s in d["offsets"]])
        targets = [WittTarget((int(t["bidegree"][0]), int(t["bidegree"][1])),
                              [[int(a) for a in row] for row in t["digits"]]) for t in d["targets"]]
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise SchemaError(f"malformed witt data: {e}") from None
    return data, targets


def tate_input_to_json(inp: TateSSInput) -> dict:
    return {"schema": "tate-ss-input", "group": inp.group, "p": inp.p, "r": inp.r,
            "summands": [{"shift": s.shift, "t_exp": s.t_exp} for s in inp.summands]}


def tate_input_from_json(d: dict) -> TateSSInput:
    if "module" in d:
        return TateSSInput.from_presentation(d.get("group", "cyclic"), int(d["p"]), int(d.get("r", 1)), d["module"])
    summands = d.get("summands", [{}])
    if not isinstance(summands, list):
        raise SchemaError("summands must be a finite list")
    return TateSSInput(d.get("group", "cyclic"), int(d["p"]), int(d.get("r", 1)),
                       [ModuleSummand(int(s.get("shift", 0)), None if s.get("t_exp") is None else int(s["t_exp"]))
                        for s in summands])


def _module_from(d: dict) -> GradedModulePresentation:
    return GradedModulePresentation.from_json(d)


def _module_to(M: GradedModulePresentation) -> dict:
    return {"schema": "module", **M.to_json()}


def _sigma_to(X: SigmaModule) -> dict:
    return {"schema": "sigma-module", **X.to_json()}


SCHEMAS: dict[str, tuple[Callable[[dict], Any], Callable[[Any], dict]]] = {
    "gmodule": (gmodule_from_json, gmodule_to_json),
    "module": (_module_from, _module_to),
    "sigma-module": (SigmaModule.from_json, _sigma_to),
    "filtered-complex": (filtered_complex_from_json, filtered_complex_to_json),
    "witt-data": (lambda d: witt_from_json(d), lambda v: witt_to_json(*v)),
    "tate-ss-input": (tate_input_from_json, tate_input_to_json),
}

_ERRORS = (SchemaError, PresentationError, SigmaError, TateError, TateSSError, KeyError, TypeError, ValueError)


# --------------------------------------------------------------------------
# files


def load_document(path: str | Path) -> dict:
    """Read a JSON (or TOML) file into a plain dict, reporting line numbers on syntax errors."""
    path = str(path)
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise SchemaError(f"cannot read file: {e.strerror}", path) from None
    if path.endswith(".toml"):
        if _toml is None:
            raise SchemaError("TOML input needs a TOML reader (Python >= 3.11 or tomli)", path)
        try:
            doc = _toml.loads(text)
        except Exception as e:  # the reader's own error type
            raise SchemaError(f"TOML syntax error: {e}", path) from None
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise SchemaError(f"JSON syntax error: {e.msg}", path, e.lineno) from None
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object", path, 1)
    return doc


def parse(doc: dict, schema: str | None = None, path: str = "") -> Any:
    tag = doc.get("schema", schema)
    if schema is not None and tag != schema:
        raise SchemaError(f"expected schema {schema!r}, found {tag!r}", path)
    if tag not in SCHEMAS:
        raise SchemaError(f"unknown schema {tag!r}; known: {', '.join(sorted(SCHEMAS))}", path)
    try:
        return SCHEMAS[tag][0](doc)
    except SchemaError as e:
        raise SchemaError(str(e), path) from None
    except _ERRORS as e:
        raise SchemaError(f"{tag}: {e}", path) from None


def serialize(value: Any, schema: str) -> dict:
    return SCHEMAS[schema][1](value)


def load(path: str | Path, schema: str | None = None) -> Any:
    return parse(load_document(path), schema, str(path))


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def roundtrip(path: str | Path) -> tuple[bool, dict, dict]:
    """parse -> serialize -> parse -> serialize; the two serializations must agree."""
    doc = load_document(path)
    tag = doc.get("schema")
    first = serialize(parse(doc, None, str(path)), tag)
    second = serialize(parse(json.loads(canonical_json(first)), tag, str(path)), tag)
    return first == second, first, second


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def factors(orders: list[int]) -> str:
    """Invariant factors as a semicolon-joined string; 0 marks a free summand."""
    return ";".join(str(d) for d in orders)
