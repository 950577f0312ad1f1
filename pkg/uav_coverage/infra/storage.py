"""Atomic writes of run artefacts (CSV, manifests, summaries, plot scripts)."""

import csv
import io
import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any


def format_float(value: float) -> str:
    """Shortest round-tripping decimal form, independent of locale."""
    return repr(float(value))


class ResultsStorage:
    """
    Writes files through a temporary sibling and a rename.

    A failed write leaves any previous file in place and removes the temporary file.
    """

    def __init__(self, base_dir: Path | None = None):
        self.base_dir = Path(base_dir) if base_dir is not None else None

    def resolve(self, path: str | Path) -> Path:
        path = Path(path)
        if not path.is_absolute() and self.base_dir is not None:
            path = self.base_dir / path
        return path

    def write_text(self, path: str | Path, text: str) -> Path:
        """Write text atomically with \\n line endings."""
        filepath = self.resolve(path)
        filepath.parent.mkdir(parents=True, exist_ok=True)
        temp_filepath = filepath.with_name(filepath.name + ".tmp")

        try:
            with open(temp_filepath, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            temp_filepath.replace(filepath)
        except OSError as e:
            if temp_filepath.exists():
                temp_filepath.unlink()
            raise e
        return filepath

    def write_csv(
        self, path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]
    ) -> Path:
        """Write a CSV with a fixed column order; floats use format_float."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
        return self.write_text(path, buffer.getvalue())

    def write_json(self, path: str | Path, data: Any) -> Path:
        """Write JSON with sorted keys and indent 2."""
        text = json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        return self.write_text(path, text)

    def load_json(self, path: str | Path) -> Any:
        with open(self.resolve(path), encoding="utf-8") as f:
            return json.load(f)
