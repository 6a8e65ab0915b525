"""
Report rendering and output.

Reports are pydantic models.  JSON output is the model dump (aliases
applied, unset optional fields dropped); CSV output flattens a model into
rows, one per entry of its main list field when it has one.
"""

import csv
import io
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence, Union

import aiofiles
from pydantic import BaseModel

from ..models.schemas import CampaignReport

logger = logging.getLogger(__name__)

Report = Union[BaseModel, Sequence[BaseModel]]


def _dump(model: BaseModel, timing: bool) -> Dict[str, Any]:
    exclude = None if timing else {"elapsed_seconds"}
    return model.model_dump(mode="json", by_alias=True, exclude_none=True, exclude=exclude)


def render_json(report: Report, timing: bool = False) -> str:
    if isinstance(report, BaseModel):
        payload: Any = _dump(report, timing)
    else:
        payload = [_dump(item, timing) for item in report]
    return json.dumps(payload, indent=2) + "\n"


def _cell(value: Any) -> Any:
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"))
    return value


def _rows(report: Report, timing: bool) -> List[Dict[str, Any]]:
    if not isinstance(report, BaseModel):
        return [{k: _cell(v) for k, v in _dump(item, timing).items()} for item in report]
    if isinstance(report, CampaignReport):
        # one row per relation, campaign columns repeated
        head = _dump(report, timing)
        failures = report.failures
        rows = []
        for summary in report.relations:
            row = {k: head[k] for k in ("campaign_id", "mode", "n", "seed", "function_count") if k in head}
            row.update(summary.model_dump(mode="json", exclude_none=True))
            row["failing_tables"] = _cell([x.fspec for x in failures if x.relation == summary.id])
            if timing and "elapsed_seconds" in head:
                row["elapsed_seconds"] = head["elapsed_seconds"]
            rows.append(row)
        return rows
    return [{k: _cell(v) for k, v in _dump(report, timing).items()}]


def render_csv(report: Report, timing: bool = False) -> str:
    rows = _rows(report, timing)
    fieldnames: List[str] = []
    for row in rows:
        fieldnames.extend(k for k in row if k not in fieldnames)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def render(report: Report, fmt: str = "json", timing: bool = False) -> str:
    if fmt == "csv":
        return render_csv(report, timing)
    if fmt == "json":
        return render_json(report, timing)
    raise ValueError(f"unknown output format '{fmt}'")


async def write_report(text: str, path: Optional[str] = None) -> None:
    """Write rendered text to ``path``, or to stdout when no path is given."""
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    async with aiofiles.open(path, "w", encoding="utf-8") as handle:
        await handle.write(text)
    logger.info(f"Report written to {path}")
