"""Labeled grid results shared by the computation modules and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

__all__ = ["SweepResult"]


def _as_floats(values) -> tuple[float, ...]:
    return tuple(float(v) for v in np.asarray(values, dtype=float).ravel())


@dataclass(frozen=True)
class SweepResult:
    """One independent axis plus any number of observables sampled on it."""

    axis_name: str
    axis_values: tuple[float, ...]
    observables: Mapping[str, tuple[float, ...]]
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "axis_values", _as_floats(self.axis_values))
        obs = {str(k): _as_floats(v) for k, v in self.observables.items()}
        n = len(self.axis_values)
        for name, vals in obs.items():
            if len(vals) != n:
                raise ValueError(
                    f"observable {name!r} has {len(vals)} values, axis has {n}"
                )
        object.__setattr__(self, "observables", obs)
        object.__setattr__(self, "metadata", dict(self.metadata))

    def __len__(self) -> int:
        return len(self.axis_values)

    def column(self, name: str) -> np.ndarray:
        if name == self.axis_name:
            return np.array(self.axis_values)
        return np.array(self.observables[name])

    def to_dict(self) -> dict:
        return {
            "axis_name": self.axis_name,
            "axis_values": list(self.axis_values),
            "observables": {k: list(v) for k, v in self.observables.items()},
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SweepResult":
        unknown = set(data) - {"axis_name", "axis_values", "observables", "metadata"}
        if unknown:
            raise ValueError(f"unknown SweepResult fields: {sorted(unknown)}")
        return cls(
            axis_name=data["axis_name"],
            axis_values=data["axis_values"],
            observables=data["observables"],
            metadata=data.get("metadata", {}),
        )
