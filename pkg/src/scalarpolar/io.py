"""JSON problem and report files.

A matrix is encoded as ``{"rows": r, "cols": c, "entries": [[re, im], ...]}``
with entries in row-major order.  Floats are written with Python's
shortest round-trip ``repr``, so reading a written file reproduces every
IEEE double bit for bit.

Problem file keys
-----------------
``form``           ``"real_bilinear" | "complex_bilinear" | "sesquilinear"``
``sign_function``  ``"sign1" | "sign2" | "sign3"``
``side``           ``"right" | "left" | "both"``
``F``, ``N``       matrices (``N`` may be omitted for ``sign``/``sqrt``)
``M``              optional codomain product matrix
``tolerances``     optional ``{"tol_sing", "tol_eq", "tol_class", "tol_cluster"}``
``name``, ``description``  optional strings
``expected``       optional ``{label: matrix}`` of reference values
``expect_error``   optional violated-clause name the problem should raise
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .core import FormKind, Tolerances
from .errors import ParseError, SchemaError

__all__ = [
    "ProblemFile",
    "ReportFile",
    "encode_matrix",
    "decode_matrix",
    "read_problem",
    "write_problem",
    "read_report",
    "write_report",
    "dumps",
]

REPORT_FORMAT = "scalarpolar-report"
REPORT_VERSION = 1

SIGN_NAMES = ("sign1", "sign2", "sign3")
SIDES = ("right", "left", "both")
_PROBLEM_KEYS = {
    "form", "sign_function", "side", "F", "N", "M", "tolerances",
    "name", "description", "expected", "expect_error",
}


@dataclass(eq=False)
class ProblemFile:
    form: FormKind
    sign_function: str
    side: str
    f: np.ndarray
    n: np.ndarray | None = None
    m: np.ndarray | None = None
    tolerances: Tolerances | None = None
    name: str | None = None
    description: str | None = None
    expected: dict[str, np.ndarray] = field(default_factory=dict)
    expect_error: str | None = None


@dataclass(eq=False)
class ReportFile:
    """Output of a CLI command.

    `factors` groups matrices by role, e.g. ``{"right": {"W": ..., "S": ...,
    "Sigma": ...}}``; `residuals` maps check names to measured values.
    """

    factors: dict[str, dict[str, np.ndarray]]
    residuals: dict[str, float]
    passed: bool
    metadata: dict[str, Any] = field(default_factory=dict)

    def same_as(self, other: "ReportFile") -> bool:
        """Bit-exact structural equality."""
        if self.passed != other.passed or self.metadata != other.metadata:
            return False
        if list(self.residuals) != list(other.residuals):
            return False
        for k, v in self.residuals.items():
            w = other.residuals[k]
            if not (v == w or (math.isnan(v) and math.isnan(w))):
                return False
        if list(self.factors) != list(other.factors):
            return False
        for g, mats in self.factors.items():
            if list(mats) != list(other.factors[g]):
                return False
            for k, a in mats.items():
                b = other.factors[g][k]
                if a.shape != b.shape or a.tobytes() != b.tobytes():
                    return False
        return True


# -- matrices ----------------------------------------------------------------


def encode_matrix(a) -> dict:
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def decode_matrix(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object with rows, cols, entries", field=where)
    for key in ("rows", "cols", "entries"):
        if key not in obj:
            raise SchemaError(f"missing key {key!r}", field=where)
    extra = set(obj) - {"rows", "cols", "entries"}
    if extra:
        raise SchemaError(f"unknown keys {sorted(extra)}", field=where)
    rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
    for key, v in (("rows", rows), ("cols", cols)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise SchemaError(f"{key} must be a positive integer, got {v!r}", field=f"{where}.{key}")
    if not isinstance(entries, list):
        raise SchemaError("entries must be a list", field=f"{where}.entries")
    if len(entries) != rows * cols:
        raise SchemaError(
            f"expected {rows * cols} entries for a {rows}x{cols} matrix, got {len(entries)}",
            field=f"{where}.entries")
    out = np.empty(rows * cols, dtype=np.complex128)
    for k, e in enumerate(entries):
        if not (isinstance(e, list) and len(e) == 2 and all(_is_number(x) for x in e)):
            raise SchemaError(f"entry {k} must be a [re, im] pair of numbers, got {e!r}",
                              field=f"{where}.entries[{k}]")
        re_, im_ = float(e[0]), float(e[1])
        if not (math.isfinite(re_) and math.isfinite(im_)):
            raise SchemaError(f"entry {k} is not finite", field=f"{where}.entries[{k}]")
        out[k] = complex(re_, im_)
    return out.reshape(rows, cols)


# -- text --------------------------------------------------------------------

# indent=2 puts every list element on its own line, and JSON strings cannot
# hold a raw newline, so requiring the newlines confines matches to real pairs
_NUM = r"(-?[0-9][^,\s\]]*|NaN|-?Infinity)"
_PAIR = re.compile(r"\[\n\s*" + _NUM + r",\n\s*" + _NUM + r"\n\s*\]")


def dumps(obj) -> str:
    """Deterministic JSON text with ``[re, im]`` pairs kept on one line."""
    text = json.dumps(obj, indent=2, ensure_ascii=False)
    return _PAIR.sub(lambda m: f"[{m.group(1)}, {m.group(2)}]", text) + "\n"


def _load(path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not text.strip():
        raise ParseError(f"{path} is empty", line=1)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from exc


def _choice(obj, key, allowed, required=True):
    if key not in obj:
        if required:
            raise SchemaError("missing required field", field=key)
        return None
    v = obj[key]
    if v not in allowed:
        raise SchemaError(f"must be one of {list(allowed)}, got {v!r}", field=key)
    return v


def _tolerances(obj) -> Tolerances:
    if not isinstance(obj, dict):
        raise SchemaError("must be an object", field="tolerances")
    allowed = {"tol_sing", "tol_eq", "tol_class", "tol_cluster"}
    extra = set(obj) - allowed
    if extra:
        raise SchemaError(f"unknown keys {sorted(extra)}", field="tolerances")
    for k, v in obj.items():
        if not _is_number(v) or not (v > 0 and math.isfinite(v)):
            raise SchemaError(f"must be a positive number, got {v!r}", field=f"tolerances.{k}")
    return Tolerances(**{k: float(v) for k, v in obj.items()})


def _optional_str(obj, key):
    v = obj.get(key)
    if v is not None and not isinstance(v, str):
        raise SchemaError("must be a string", field=key)
    return v


def parse_problem(obj) -> ProblemFile:
    if not isinstance(obj, dict):
        raise SchemaError("top level must be an object")
    extra = set(obj) - _PROBLEM_KEYS
    if extra:
        raise SchemaError(f"unknown fields {sorted(extra)}", field=sorted(extra)[0])
    form = FormKind(_choice(obj, "form", [f.value for f in FormKind]))
    sign = _choice(obj, "sign_function", SIGN_NAMES)
    side = _choice(obj, "side", SIDES, required=False) or "right"
    if "F" not in obj:
        raise SchemaError("missing required field", field="F")
    f = decode_matrix(obj["F"], "F")
    n = decode_matrix(obj["N"], "N") if obj.get("N") is not None else None
    m = decode_matrix(obj["M"], "M") if obj.get("M") is not None else None
    if m is not None and n is None:
        raise SchemaError("M given without N", field="M")
    if form is FormKind.REAL_BILINEAR:
        for label, a in (("F", f), ("N", n), ("M", m)):
            if a is not None and np.any(a.imag != 0):
                raise SchemaError("real_bilinear entries must have im = 0", field=label)
    for label, a in (("N", n), ("M", m)):
        if a is not None and a.shape[0] != a.shape[1]:
            raise SchemaError(f"must be square, got {a.shape[0]}x{a.shape[1]}", field=label)
    if n is not None and n.shape[0] != f.shape[1]:
        raise SchemaError(f"N is {n.shape[0]}x{n.shape[0]} but F has {f.shape[1]} columns", field="N")
    if m is not None and m.shape[0] != f.shape[0]:
        raise SchemaError(f"M is {m.shape[0]}x{m.shape[0]} but F has {f.shape[0]} rows", field="M")
    if m is None and n is not None and f.shape[0] != f.shape[1]:
        raise SchemaError("a rectangular F needs both M and N", field="M")
    tol = _tolerances(obj["tolerances"]) if obj.get("tolerances") is not None else None
    expected = {}
    if obj.get("expected") is not None:
        if not isinstance(obj["expected"], dict):
            raise SchemaError("must be an object of matrices", field="expected")
        expected = {k: decode_matrix(v, f"expected.{k}") for k, v in obj["expected"].items()}
    return ProblemFile(
        form=form, sign_function=sign, side=side, f=f, n=n, m=m, tolerances=tol,
        name=_optional_str(obj, "name"), description=_optional_str(obj, "description"),
        expected=expected, expect_error=_optional_str(obj, "expect_error"),
    )


def problem_to_obj(p: ProblemFile) -> dict:
    obj: dict[str, Any] = {}
    if p.name is not None:
        obj["name"] = p.name
    if p.description is not None:
        obj["description"] = p.description
    obj["form"] = FormKind(p.form).value
    obj["sign_function"] = p.sign_function
    obj["side"] = p.side
    obj["F"] = encode_matrix(p.f)
    if p.n is not None:
        obj["N"] = encode_matrix(p.n)
    if p.m is not None:
        obj["M"] = encode_matrix(p.m)
    if p.tolerances is not None:
        obj["tolerances"] = tolerances_to_obj(p.tolerances)
    if p.expected:
        obj["expected"] = {k: encode_matrix(v) for k, v in p.expected.items()}
    if p.expect_error is not None:
        obj["expect_error"] = p.expect_error
    return obj


def tolerances_to_obj(t: Tolerances) -> dict:
    return {"tol_sing": t.tol_sing, "tol_eq": t.tol_eq, "tol_class": t.tol_class,
            "tol_cluster": t.tol_cluster}


def read_problem(path) -> ProblemFile:
    """Parse a problem file; raises :class:`ParseError` or :class:`SchemaError`."""
    return parse_problem(_load(path))


def write_problem(path, problem: ProblemFile) -> None:
    Path(path).write_text(dumps(problem_to_obj(problem)), encoding="utf-8")


def report_to_obj(r: ReportFile) -> dict:
    return {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "metadata": r.metadata,
        "factors": {g: {k: encode_matrix(a) for k, a in mats.items()} for g, mats in r.factors.items()},
        "certification": {"passed": bool(r.passed), "residuals": dict(r.residuals)},
    }


def parse_report(obj) -> ReportFile:
    if not isinstance(obj, dict):
        raise SchemaError("top level must be an object")
    if obj.get("format") != REPORT_FORMAT:
        raise SchemaError(f"expected {REPORT_FORMAT!r}", field="format")
    if obj.get("version") != REPORT_VERSION:
        raise SchemaError(f"unsupported version {obj.get('version')!r}", field="version")
    meta = obj.get("metadata", {})
    if not isinstance(meta, dict):
        raise SchemaError("must be an object", field="metadata")
    facs = obj.get("factors")
    if not isinstance(facs, dict):
        raise SchemaError("must be an object", field="factors")
    factors = {}
    for g, mats in facs.items():
        if not isinstance(mats, dict):
            raise SchemaError("must be an object of matrices", field=f"factors.{g}")
        factors[g] = {k: decode_matrix(v, f"factors.{g}.{k}") for k, v in mats.items()}
    cert = obj.get("certification")
    if not isinstance(cert, dict) or not isinstance(cert.get("passed"), bool):
        raise SchemaError("must hold a boolean 'passed'", field="certification")
    res = cert.get("residuals", {})
    if not isinstance(res, dict) or not all(_is_number(v) for v in res.values()):
        raise SchemaError("must map names to numbers", field="certification.residuals")
    return ReportFile(factors, {k: float(v) for k, v in res.items()}, cert["passed"], meta)


def write_report(path, report: ReportFile) -> None:
    Path(path).write_text(dumps(report_to_obj(report)), encoding="utf-8")


def read_report(path) -> ReportFile:
    return parse_report(_load(path))
