"""
Output adapter for the blockfade toolkit.

Writes result records as CSV or JSON with the run manifest embedded, to
stdout or to a file.
"""

import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence, Union

from pydantic import BaseModel

from src.models.response_models import RunManifest

logger = logging.getLogger(__name__)

Result = Union[BaseModel, Sequence[BaseModel]]


def to_jsonable(value: Any) -> Any:
    """Recursively convert results to JSON types; non-finite floats become strings."""
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump(mode="python"))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        return value
    if hasattr(value, "isoformat"):
        return value.isoformat()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def _cell(value: Any) -> str:
    value = to_jsonable(value)
    if isinstance(value, list):
        return ";".join(_cell(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, separators=(",", ":"))
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


class OutputAdapter:
    """Adapter that serializes results together with their manifest."""

    def __init__(self, fmt: str = "json", output: Optional[Union[str, Path]] = None):
        if fmt not in ("csv", "json"):
            raise ValueError(f"unsupported output format {fmt!r}")
        self.fmt = fmt
        self.output = Path(output) if output else None

    def render(self, manifest: RunManifest, result: Result) -> str:
        """Serialize a result to text in the configured format."""
        if self.fmt == "json":
            payload = {"manifest": to_jsonable(manifest), "result": to_jsonable(result)}
            return json.dumps(payload, indent=2) + "\n"

        rows: List[BaseModel] = list(result) if isinstance(result, (list, tuple)) else [result]
        buffer = io.StringIO()
        buffer.write(f"# manifest: {json.dumps(to_jsonable(manifest), separators=(',', ':'))}\n")
        if rows:
            fields = list(type(rows[0]).model_fields)
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(fields)
            for row in rows:
                writer.writerow([_cell(getattr(row, name)) for name in fields])
        return buffer.getvalue()

    def write(self, manifest: RunManifest, result: Result) -> str:
        """Render and write to the output file or stdout; returns the text."""
        text = self.render(manifest, result)
        if self.output is None:
            sys.stdout.write(text)
        else:
            self.output.parent.mkdir(parents=True, exist_ok=True)
            self.output.write_text(text, encoding="utf-8")
            logger.info(f"Wrote {self.fmt.upper()} output to {self.output}")
        return text
