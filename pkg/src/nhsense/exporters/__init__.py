"""Exporters writing results as CSV and JSON."""

from nhsense.exporters.csv_export import CsvExporter
from nhsense.exporters.json_export import JsonExporter, to_jsonable

__all__ = ["CsvExporter", "JsonExporter", "to_jsonable"]
