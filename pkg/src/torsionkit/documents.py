"""UTF-8 JSON document formats for complexes, cellular/Morse/order data,
and computation reports.

All integers and rationals travel as decimal strings ("12", "-3", "5/7"),
so documents never depend on any implementation integer width.  Parsing
is strict: malformed documents raise DocumentError with a field path.
Serialization is canonical (sorted keys, fixed separators), so identical
inputs always produce byte-identical documents and reports.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .complexes import ChainComplex, GroupAction, validate
from .constructions import CWData, MSData, OrderComplex
from .matrices import Matrix

FORMAT_VERSION = "torsionkit-documents-1"


class DocumentError(ValueError):
    pass


def _fail(path: str, message: str):
    raise DocumentError(f"{path}: {message}")


def _expect(obj: dict, key: str, kind, path: str):
    if key not in obj:
        _fail(path, f"missing field {key!r}")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        _fail(f"{path}.{key}", f"expected {getattr(kind, '__name__', kind)}")
    return value


def _parse_int(text: Any, path: str) -> int:
    if isinstance(text, int) and not isinstance(text, bool):
        return text
    if not isinstance(text, str):
        _fail(path, "expected a decimal integer string")
    try:
        return int(text, 10)
    except ValueError:
        _fail(path, f"not a decimal integer: {text!r}")


def _parse_rational(text: Any, path: str) -> Fraction:
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        _fail(path, "expected a decimal rational string")
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num, 10), int(den, 10))
        return Fraction(int(text, 10))
    except (ValueError, ZeroDivisionError):
        _fail(path, f"not a rational: {text!r}")


def _parse_matrix(data: Any, rows: int, cols: int, path: str, integral: bool) -> Matrix:
    if not isinstance(data, list) or len(data) != rows:
        _fail(path, f"expected {rows} rows")
    out = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            _fail(f"{path}[{i}]", f"expected {cols} entries")
        if integral:
            out.append([_parse_int(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
        else:
            out.append(
                [_parse_rational(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)]
            )
    return Matrix(rows, cols, out)


def _entry_str(x) -> str:
    if isinstance(x, Fraction) and x.denominator != 1:
        return f"{x.numerator}/{x.denominator}"
    return str(int(x))


def _matrix_json(M: Matrix) -> list:
    return [[_entry_str(x) for x in row] for row in M.data]


# ---------------------------------------------------------------------
# complex documents
# ---------------------------------------------------------------------


def parse_complex_document(doc: dict) -> tuple[str, ChainComplex]:
    if doc.get("type") != "complex":
        _fail("type", "expected a complex document")
    name = doc.get("name", "unnamed")
    min_degree = _parse_int(_expect(doc, "min_degree", None, "$"), "$.min_degree")
    ranks_raw = _expect(doc, "ranks", list, "$")
    ranks = tuple(_parse_int(r, f"$.ranks[{i}]") for i, r in enumerate(ranks_raw))
    if any(r < 0 for r in ranks):
        _fail("$.ranks", "ranks must be nonnegative")
    diffs_raw = _expect(doc, "differentials", list, "$")
    if len(diffs_raw) != max(len(ranks) - 1, 0):
        _fail("$.differentials", f"expected {max(len(ranks) - 1, 0)} matrices")
    diffs = tuple(
        _parse_matrix(
            d, ranks[i + 1], ranks[i], f"$.differentials[{i}]", integral=True
        )
        for i, d in enumerate(diffs_raw)
    )
    gram = None
    if doc.get("gram") is not None:
        gram_raw = _expect(doc, "gram", list, "$")
        if len(gram_raw) != len(ranks):
            _fail("$.gram", f"expected {len(ranks)} matrices")
        gram = tuple(
            _parse_matrix(g, ranks[i], ranks[i], f"$.gram[{i}]", integral=False)
            for i, g in enumerate(gram_raw)
        )
    action = None
    if doc.get("action") is not None:
        araw = _expect(doc, "action", dict, "$")
        order = _parse_int(_expect(araw, "order", None, "$.action"), "$.action.order")
        mats_raw = _expect(araw, "matrices", list, "$.action")
        if len(mats_raw) != len(ranks):
            _fail("$.action.matrices", f"expected {len(ranks)} matrices")
        mats = tuple(
            _parse_matrix(
                m, ranks[i], ranks[i], f"$.action.matrices[{i}]", integral=True
            )
            for i, m in enumerate(mats_raw)
        )
        action = GroupAction(order=order, matrices=mats)
    try:
        C = ChainComplex(min_degree, ranks, diffs, gram, action)
    except ValueError as exc:
        _fail("$", str(exc))
    return name, C


def complex_document(name: str, C: ChainComplex) -> dict:
    doc: dict = {
        "type": "complex",
        "format": FORMAT_VERSION,
        "name": name,
        "min_degree": str(C.min_degree),
        "ranks": [str(r) for r in C.ranks],
        "differentials": [_matrix_json(d) for d in C.differentials],
    }
    if C.gram is not None:
        doc["gram"] = [_matrix_json(g) for g in C.gram]
    if C.action is not None:
        doc["action"] = {
            "order": str(C.action.order),
            "matrices": [_matrix_json(m) for m in C.action.matrices],
        }
    return doc


# ---------------------------------------------------------------------
# cellular documents
# ---------------------------------------------------------------------


def parse_cw_document(doc: dict) -> tuple[str, CWData]:
    if doc.get("type") != "cw":
        _fail("type", "expected a cw document")
    name = doc.get("name", "unnamed")
    cells_raw = _expect(doc, "cells", list, "$")
    cells = []
    for dim, group in enumerate(cells_raw):
        if not isinstance(group, list) or not all(isinstance(c, str) for c in group):
            _fail(f"$.cells[{dim}]", "expected a list of cell identifiers")
        if len(set(group)) != len(group):
            _fail(f"$.cells[{dim}]", "duplicate cell identifiers")
        cells.append(tuple(sorted(group)))
    known = {c for group in cells for c in group}
    incidence = {}
    for k, item in enumerate(_expect(doc, "incidence", list, "$")):
        if not isinstance(item, list) or len(item) != 3:
            _fail(f"$.incidence[{k}]", "expected [upper, lower, coefficient]")
        u, l, coeff = item
        if u not in known or l not in known:
            _fail(f"$.incidence[{k}]", f"unknown cell in ({u!r}, {l!r})")
        incidence[(u, l)] = _parse_int(coeff, f"$.incidence[{k}][2]")
    action_order = None
    action_images = None
    if doc.get("action") is not None:
        araw = _expect(doc, "action", dict, "$")
        action_order = _parse_int(
            _expect(araw, "order", None, "$.action"), "$.action.order"
        )
        images_raw = _expect(araw, "images", dict, "$.action")
        action_images = {}
        for cell, img in images_raw.items():
            if cell not in known:
                _fail("$.action.images", f"unknown cell {cell!r}")
            if not isinstance(img, list) or len(img) != 2:
                _fail(f"$.action.images[{cell}]", "expected [image, sign]")
            target, sign = img
            sign = _parse_int(sign, f"$.action.images[{cell}][1]")
            if target not in known or sign not in (-1, 1):
                _fail(f"$.action.images[{cell}]", "bad image or sign")
            action_images[cell] = (target, sign)
        missing = known - set(action_images)
        if missing:
            _fail("$.action.images", f"cells without images: {sorted(missing)}")
    return name, CWData(
        cells=tuple(cells),
        incidence=incidence,
        action_order=action_order,
        action_images=action_images,
    )


def cw_document(name: str, K: CWData) -> dict:
    doc: dict = {
        "type": "cw",
        "format": FORMAT_VERSION,
        "name": name,
        "cells": [list(group) for group in K.cells],
        "incidence": sorted(
            [u, l, str(c)] for (u, l), c in K.incidence.items()
        ),
    }
    if K.action_images is not None:
        doc["action"] = {
            "order": str(K.action_order),
            "images": {
                c: [img, str(sign)] for c, (img, sign) in sorted(K.action_images.items())
            },
        }
    return doc


# ---------------------------------------------------------------------
# Morse documents
# ---------------------------------------------------------------------


def parse_morse_document(doc: dict) -> tuple[str, MSData]:
    if doc.get("type") != "morse":
        _fail("type", "expected a morse document")
    name = doc.get("name", "unnamed")
    rank = _parse_int(doc.get("rank", 1), "$.rank")
    crit_raw = _expect(doc, "critical_points", dict, "$")
    crit = {
        cid: _parse_int(ind, f"$.critical_points[{cid}]")
        for cid, ind in crit_raw.items()
    }
    flows = []
    for k, item in enumerate(doc.get("flow_lines", [])):
        if not isinstance(item, dict):
            _fail(f"$.flow_lines[{k}]", "expected an object")
        src = _expect(item, "from", str, f"$.flow_lines[{k}]")
        dst = _expect(item, "to", str, f"$.flow_lines[{k}]")
        sign = _parse_int(
            _expect(item, "sign", None, f"$.flow_lines[{k}]"),
            f"$.flow_lines[{k}].sign",
        )
        transport = _parse_matrix(
            _expect(item, "transport", list, f"$.flow_lines[{k}]"),
            rank,
            rank,
            f"$.flow_lines[{k}].transport",
            integral=True,
        )
        flows.append((src, dst, sign, transport))
    return name, MSData(critical_points=crit, flow_lines=tuple(flows), rank=rank)


def morse_document(name: str, D: MSData) -> dict:
    return {
        "type": "morse",
        "format": FORMAT_VERSION,
        "name": name,
        "rank": str(D.rank),
        "critical_points": {c: str(i) for c, i in sorted(D.critical_points.items())},
        "flow_lines": [
            {
                "from": src,
                "to": dst,
                "sign": str(sign),
                "transport": _matrix_json(t),
            }
            for src, dst, sign, t in D.flow_lines
        ],
    }


# ---------------------------------------------------------------------
# order documents
# ---------------------------------------------------------------------


def parse_order_document(doc: dict) -> tuple[str, OrderComplex]:
    if doc.get("type") != "order_complex":
        _fail("type", "expected an order_complex document")
    name = doc.get("name", "unnamed")
    modulus = tuple(
        _parse_int(c, f"$.modulus[{i}]")
        for i, c in enumerate(_expect(doc, "modulus", list, "$"))
    )
    min_degree = _parse_int(_expect(doc, "min_degree", None, "$"), "$.min_degree")
    ranks = tuple(
        _parse_int(r, f"$.ranks[{i}]")
        for i, r in enumerate(_expect(doc, "ranks", list, "$"))
    )
    m = len(modulus) - 1
    diffs = []
    diffs_raw = _expect(doc, "differentials", list, "$")
    if len(diffs_raw) != max(len(ranks) - 1, 0):
        _fail("$.differentials", f"expected {max(len(ranks) - 1, 0)} matrices")
    for i, dmat in enumerate(diffs_raw):
        path = f"$.differentials[{i}]"
        if not isinstance(dmat, list) or len(dmat) != ranks[i + 1]:
            _fail(path, f"expected {ranks[i + 1]} rows")
        rows = []
        for r, row in enumerate(dmat):
            if not isinstance(row, list) or len(row) != ranks[i]:
                _fail(f"{path}[{r}]", f"expected {ranks[i]} entries")
            entries = []
            for c, coeffs in enumerate(row):
                if not isinstance(coeffs, list) or len(coeffs) != m:
                    _fail(f"{path}[{r}][{c}]", f"expected {m} coefficients")
                entries.append(
                    tuple(
                        _parse_int(x, f"{path}[{r}][{c}][{k}]")
                        for k, x in enumerate(coeffs)
                    )
                )
            rows.append(tuple(entries))
        diffs.append(tuple(rows))
    try:
        P = OrderComplex(
            modulus=modulus,
            min_degree=min_degree,
            ranks=ranks,
            differentials=tuple(diffs),
        )
    except ValueError as exc:
        _fail("$", str(exc))
    return name, P


def order_document(name: str, P: OrderComplex) -> dict:
    return {
        "type": "order_complex",
        "format": FORMAT_VERSION,
        "name": name,
        "modulus": [str(c) for c in P.modulus],
        "min_degree": str(P.min_degree),
        "ranks": [str(r) for r in P.ranks],
        "differentials": [
            [[[str(x) for x in entry] for entry in row] for row in dmat]
            for dmat in P.differentials
        ],
    }


# ---------------------------------------------------------------------
# loading and canonical serialization
# ---------------------------------------------------------------------


PARSERS = {
    "complex": parse_complex_document,
    "cw": parse_cw_document,
    "morse": parse_morse_document,
    "order_complex": parse_order_document,
}


def load_document(path: str) -> tuple[str, str, object]:
    """Read a document file; returns (type, name, parsed object)."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise DocumentError(f"{path}: document must be an object")
    kind = doc.get("type")
    if kind not in PARSERS:
        raise DocumentError(
            f"{path}: unknown document type {kind!r}; "
            f"expected one of {sorted(PARSERS)}"
        )
    name, parsed = PARSERS[kind](doc)
    return kind, name, parsed


def serialize(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def validated_complex(path: str) -> tuple[str, ChainComplex]:
    """Load a complex document and insist it passes validation."""
    kind, name, obj = load_document(path)
    if kind != "complex":
        raise DocumentError(f"{path}: expected a complex document, got {kind!r}")
    report = validate(obj)
    if not report.ok:
        raise DocumentError(f"{path}: invalid complex: " + "; ".join(report.problems))
    return name, obj
