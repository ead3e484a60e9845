"""CSV exporter for tabular results."""

import logging
from pathlib import Path

import polars as pl

logger = logging.getLogger(__name__)


class CsvExporter:
    """Write polars tables as reproducible CSV.

    Floats are written in lowercase scientific notation with 17 significant
    digits and '\\n' line endings, so identical inputs give byte-identical files.
    """

    float_precision: int = 16

    def render(self, frame: pl.DataFrame) -> str:
        """Return the CSV text of ``frame``."""
        return frame.write_csv(
            float_scientific=True,
            float_precision=self.float_precision,
            line_terminator="\n",
        )

    def export(self, frame: pl.DataFrame, path: str | Path) -> Path:
        """Write ``frame`` to ``path``.

        Args:
            frame: Table to write
            path: Destination file

        Returns:
            The path written

        Raises:
            OSError: If the file cannot be written
        """
        target = Path(path)
        target.write_text(self.render(frame), encoding="utf-8", newline="")
        logger.debug("wrote %d rows to %s", frame.height, target)
        return target
