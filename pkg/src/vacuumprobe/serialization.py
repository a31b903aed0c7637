"""Output record and CSV / JSON / SVG writers."""

from __future__ import annotations

import json
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Any
from xml.sax.saxutils import escape

from pydantic import BaseModel, ConfigDict

from .results import SweepResult

__all__ = [
    "SCHEMA_VERSION",
    "OutputRecord",
    "provenance",
    "to_csv",
    "to_json",
    "from_json",
    "to_svg",
    "write_outputs",
    "IoError",
]

SCHEMA_VERSION = "1"


class IoError(OSError):
    """Output could not be written."""


class OutputRecord(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    schema_version: str = SCHEMA_VERSION
    command: str
    inputs: dict[str, Any]
    results: dict[str, Any]
    provenance: dict[str, str]

    @property
    def sweep(self) -> SweepResult | None:
        data = self.results.get("sweep")
        return SweepResult.from_dict(data) if data is not None else None

    @property
    def scalars(self) -> dict[str, Any] | None:
        return self.results.get("scalars")


def provenance() -> dict[str, str]:
    """Tool name, version and a UTC timestamp (SOURCE_DATE_EPOCH pins it)."""
    from . import __version__

    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return {
        "tool": "vacuumprobe",
        "version": __version__,
        "timestamp": when.strftime("%Y-%m-%dT%H:%M:%SZ"),
    }


def _fmt(x: Any) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, int):
        return str(x)
    text = str(x)
    if any(c in text for c in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def to_csv(record: OutputRecord) -> str:
    """Header row plus one row per grid point (or one row of scalars)."""
    sweep = record.sweep
    if sweep is not None:
        names = [sweep.axis_name, *sweep.observables]
        cols = [sweep.axis_values, *sweep.observables.values()]
        rows = [",".join(_fmt(c[i]) for c in cols) for i in range(len(sweep))]
    else:
        scalars = record.scalars or {}
        names = list(scalars)
        rows = [",".join(_fmt(v) for v in scalars.values())]
    return "\n".join([",".join(names), *rows]) + "\n"


def to_json(record: OutputRecord) -> str:
    return json.dumps(record.model_dump(), indent=2, allow_nan=False) + "\n"


def from_json(text: str) -> OutputRecord:
    return OutputRecord.model_validate(json.loads(text))


def _polyline(xs, ys, box) -> str:
    x0, y0, w, h = box
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    xspan = (xhi - xlo) or 1.0
    yspan = (yhi - ylo) or 1.0
    pts = " ".join(
        f"{x0 + (x - xlo) / xspan * w:.2f},{y0 + h - (y - ylo) / yspan * h:.2f}" for x, y in zip(xs, ys)
    )
    return pts


def to_svg(record: OutputRecord) -> str:
    """One small line chart per observable, stacked vertically.  Presentation only."""
    width, panel, margin = 640, 240, 60
    parts = []
    sweep = record.sweep
    if sweep is None:
        scalars = record.scalars or {}
        height = 40 + 20 * len(scalars)
        parts.append(f'<text x="10" y="24" font-size="14">{escape(record.command)}</text>')
        for i, (k, v) in enumerate(scalars.items()):
            parts.append(f'<text x="10" y="{48 + 20 * i}" font-size="12">{escape(k)} = {escape(_fmt(v))}</text>')
    else:
        names = list(sweep.observables)
        height = max(1, len(names)) * (panel + margin) + margin
        xs = sweep.axis_values
        for i, name in enumerate(names):
            ys = sweep.observables[name]
            top = margin + i * (panel + margin)
            box = (margin * 1.5, top, width - 2 * margin, panel)
            parts.append(
                f'<rect x="{box[0]:.2f}" y="{top}" width="{box[2]}" height="{panel}" '
                'fill="none" stroke="black"/>'
            )
            parts.append(
                f'<polyline fill="none" stroke="steelblue" stroke-width="1.5" '
                f'points="{_polyline(xs, ys, box)}"/>'
            )
            parts.append(
                f'<text x="{width / 2:.0f}" y="{top + panel + 32}" text-anchor="middle" '
                f'font-size="12">{escape(sweep.axis_name)}</text>'
            )
            parts.append(
                f'<text x="14" y="{top + panel / 2:.0f}" font-size="12" '
                f'transform="rotate(-90 14 {top + panel / 2:.0f})" text-anchor="middle">{escape(name)}</text>'
            )
            parts.append(f'<text x="{box[0]:.2f}" y="{top - 6}" font-size="10">max {_fmt(max(ys))}</text>')
            parts.append(
                f'<text x="{box[0]:.2f}" y="{top + panel + 14}" font-size="10">{_fmt(min(xs))}</text>'
            )
            parts.append(
                f'<text x="{box[0] + box[2]:.2f}" y="{top + panel + 14}" font-size="10" '
                f'text-anchor="end">{_fmt(max(xs))}</text>'
            )
    body = "\n".join(parts)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n{body}\n</svg>\n'
    )


_WRITERS = {"csv": to_csv, "json": to_json, "svg": to_svg}


def write_outputs(record: OutputRecord, path: str, formats) -> list[Path]:
    """Write ``<stem>.<fmt>`` for each requested format; a matching suffix on path is dropped."""
    target = Path(path)
    if target.suffix.lstrip(".") in _WRITERS:
        target = target.with_suffix("")
    written = []
    for fmt in formats:
        out = target.with_name(target.name + "." + fmt)
        try:
            out.parent.mkdir(parents=True, exist_ok=True)
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(_WRITERS[fmt](record))
        except OSError as exc:
            raise IoError(f"cannot write {out}: {exc.strerror or exc}") from exc
        written.append(out)
    return written
