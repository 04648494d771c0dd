"""JSON solution documents and CSV rendering."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Sequence

from .models import DerivedQuantities, ModelSector, SectorError, SectorSolution

SCHEMA_VERSION = "1"

_SECTOR_FIELDS = set(ModelSector.__dataclass_fields__)
_DERIVED_FIELDS = set(DerivedQuantities.__dataclass_fields__)


class DocumentError(ValueError):
    """Malformed or unsupported solution document."""


def _finite_or_none(x: float) -> float | None:
    return float(x) if math.isfinite(x) else None


def _clean(x: float) -> float:
    return float(x) + 0.0  # folds -0.0 into 0.0


def solution_to_doc(sol: SectorSolution) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "sector": sol.sector.to_dict(),
        "derived": {k: (None if v is None else _clean(v)) for k, v in sol.derived.to_dict().items()},
        "roots": [_clean(r) for r in sol.roots],
        "w": _clean(sol.w),
        "constraint_residuals": {k: float(v) for k, v in sol.constraint_residuals.items()},
        "bethe_residual": _finite_or_none(sol.bethe.bethe_residual_norm),
        "closure_residual": _finite_or_none(sol.bethe.closure_residual_norm),
        "certified": bool(sol.certified),
        "diagnostics": list(sol.diagnostics),
    }


def bundle(solutions: Iterable[SectorSolution], diagnostics: Sequence[str] = ()) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "solutions": [solution_to_doc(s) for s in solutions],
        "diagnostics": list(diagnostics),
    }


def dumps(obj: dict[str, Any]) -> str:
    # json writes floats with repr, the shortest string that reads back to
    # the same double, so parse(serialize(x)) == x value for value.
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _check_version(d: dict) -> None:
    if not isinstance(d, dict):
        raise DocumentError("document must be a JSON object")
    v = d.get("schema_version")
    if v != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema_version {v!r} (expected {SCHEMA_VERSION!r})")


def parse_documents(text: str) -> list[dict[str, Any]]:
    """Solution documents from a single document or a bundle."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from None
    _check_version(data)
    docs = data["solutions"] if "solutions" in data else [data]
    if not isinstance(docs, list):
        raise DocumentError("'solutions' must be a list")
    for d in docs:
        _check_version(d)
        for key in ("sector", "derived", "roots", "certified"):
            if key not in d:
                raise DocumentError(f"document lacks {key!r}")
    return docs


def doc_sector(doc: dict) -> ModelSector:
    raw = doc["sector"]
    if not isinstance(raw, dict) or set(raw) - _SECTOR_FIELDS:
        raise DocumentError("bad sector record")
    try:
        return ModelSector.from_dict(raw)
    except (SectorError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad sector record: {exc}") from None


def doc_derived(doc: dict) -> DerivedQuantities:
    raw = doc["derived"]
    if not isinstance(raw, dict) or set(raw) - _DERIVED_FIELDS or "energy" not in raw:
        raise DocumentError("bad derived record")
    return DerivedQuantities.from_dict(raw)


def doc_roots(doc: dict) -> list[float]:
    roots = doc["roots"]
    if not isinstance(roots, list) or not all(isinstance(r, (int, float)) for r in roots):
        raise DocumentError("roots must be a list of numbers")
    return [float(r) for r in roots]


def fmt(x: Any) -> str:
    """CSV cell: 17 significant digits for floats, empty for None."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x + 0.0, ".17g")
    return str(x)


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()
