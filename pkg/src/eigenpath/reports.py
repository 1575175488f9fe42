"""JSON run reports and CSV trial logs.

The CSV holds one row per trial with a fixed column order. The JSON report
holds the run configuration, aggregates, bound values and verdicts; it
carries a schema version and is validated strictly when read back.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, List

from .experiments import CSV_COLUMNS, RunResult
from .stats import Verdict

SCHEMA_VERSION = 1
REPORT_KEYS = {"schema_version", "config", "aggregates", "bounds", "verdicts"}
VERDICT_KEYS = {"name", "kind", "estimate", "stderr", "target", "passed"}


class ReportSchemaError(ValueError):
    pass


def _clean(value):
    """NaN and infinities become null so the output stays strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item"):
        return _clean(value.item())
    return value


def _cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_text(records: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([_cell(rec[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def assemble_report(config: dict, aggregates: dict, bounds: dict, verdicts: Iterable[Verdict]) -> dict:
    return _clean({"schema_version": SCHEMA_VERSION, "config": config, "aggregates": aggregates,
                   "bounds": bounds, "verdicts": [v.as_dict() for v in verdicts]})


def build_report(result: RunResult, config: dict) -> dict:
    return assemble_report({**config, "experiment": result.experiment, "params": result.params},
                           result.aggregates, result.bounds, result.verdicts)


def report_text(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_outputs(prefix: str, report: dict, records: List[dict]) -> None:
    with open(prefix + ".json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report_text(report))
    with open(prefix + ".csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(records))


def validate_report(data: dict) -> dict:
    if not isinstance(data, dict):
        raise ReportSchemaError("report must be a JSON object")
    keys = set(data)
    if keys != REPORT_KEYS:
        extra, missing = sorted(keys - REPORT_KEYS), sorted(REPORT_KEYS - keys)
        raise ReportSchemaError(f"report keys differ from the schema: unknown {extra}, missing {missing}")
    if data["schema_version"] != SCHEMA_VERSION:
        raise ReportSchemaError(f"unsupported schema version {data['schema_version']!r}")
    for key in ("config", "aggregates", "bounds"):
        if not isinstance(data[key], dict):
            raise ReportSchemaError(f"{key} must be an object")
    if not isinstance(data["verdicts"], list):
        raise ReportSchemaError("verdicts must be a list")
    for v in data["verdicts"]:
        if not isinstance(v, dict) or set(v) != VERDICT_KEYS:
            raise ReportSchemaError(f"malformed verdict {v!r}")
    return data


def read_report(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return validate_report(json.load(fh))


def verdicts_from(report: dict) -> List[Verdict]:
    out = []
    for v in validate_report(report)["verdicts"]:
        est = float("nan") if v["estimate"] is None else v["estimate"]
        se = float("nan") if v["stderr"] is None else v["stderr"]
        tgt = float("nan") if v["target"] is None else v["target"]
        out.append(Verdict(v["name"], v["kind"], est, se, tgt, v["passed"]))
    return out
