"""JSON exporter for records, reports and ensemble metadata."""

import json
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np
import polars as pl
from pydantic import BaseModel

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Convert results to JSON-compatible values.

    Complex numbers and complex arrays become [re, im] leaves (the model file
    convention), real arrays become nested lists, pydantic models are dumped
    field by field and polars tables become lists of row records.
    Non-finite floats are written as strings.
    """
    if isinstance(value, BaseModel):
        return {name: to_jsonable(getattr(value, name)) for name in type(value).model_fields}
    if isinstance(value, pl.DataFrame):
        return [to_jsonable(row) for row in value.to_dicts()]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return np.stack([value.real, value.imag], axis=-1).tolist()
        return value.tolist()
    if isinstance(value, complex | np.complexfloating):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


class JsonExporter:
    """Write results as indented, key-sorted JSON."""

    indent: int = 2

    def render(self, payload: Any) -> str:
        """Return the JSON text of ``payload``."""
        return json.dumps(to_jsonable(payload), indent=self.indent, sort_keys=True) + "\n"

    def export(self, payload: Any, path: str | Path) -> Path:
        """Write ``payload`` to ``path``.

        Raises:
            OSError: If the file cannot be written
        """
        target = Path(path)
        target.write_text(self.render(payload), encoding="utf-8", newline="")
        logger.debug("wrote JSON to %s", target)
        return target
