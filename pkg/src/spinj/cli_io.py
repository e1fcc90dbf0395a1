"""Serialization helpers shared by the CLI: full-precision CSV and versioned
JSON envelopes.  Numeric fields are written with 17 significant digits so a
parse of the emitted text reproduces every double bit-for-bit."""

from __future__ import annotations

import csv
import io
import json
from typing import Optional

from . import __version__
from .sweep import CSV_COLUMNS, SweepRow

SCHEMA_VERSION = "1.0"


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (tuple, list)):
        return ";".join(str(v) for v in value)
    return str(value)


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_cell(getattr(r, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def _parse_optional_float(cell: str) -> Optional[float]:
    return None if cell == "" else float(cell)


def parse_rows_csv(text: str) -> list[SweepRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    for rec in reader:
        cells = dict(zip(CSV_COLUMNS, rec))
        rows.append(SweepRow(
            n=int(cells["n"]),
            family=cells["family"],
            param=float(cells["param"]),
            sld_bound=float(cells["sld_bound"]),
            rld_bound=_parse_optional_float(cells["rld_bound"]),
            hn_upper=float(cells["hn_upper"]),
            condition_lhs=float(cells["condition_lhs"]),
            condition_rhs=float(cells["condition_rhs"]),
            condition_holds=cells["condition_holds"] == "true",
            r_max=_parse_optional_float(cells["r_max"]),
            eta=_parse_optional_float(cells["eta"]),
            asymptotic_eta=_parse_optional_float(cells["asymptotic_eta"]),
            eta_over_sld=_parse_optional_float(cells["eta_over_sld"]),
            reasons=tuple(cells["reasons"].split(";")) if cells["reasons"] else (),
        ))
    return rows


def json_envelope(command: str, inputs: dict, payload: dict, seed: Optional[int] = None) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "provenance": {
            "version": __version__,
            "seed": seed,
            "tolerances": {
                "closed_form_match": 1e-9,
                "condition_tie": 1e-12,
                "support_residual": 1e-10,
            },
        },
        "result": payload,
    }
    return json.dumps(doc, indent=2, sort_keys=False, default=_json_default) + "\n"


def _json_default(obj):
    if hasattr(obj, "item"):
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")
