"""Enumeration budgets shared by all modules."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class Limits:
    brute_force_n: int = 24
    nullspace_dim: int = 20
    max_row_weight: int = 20
    vertex_n: int = 16
    subset_enumeration: int = 10**5
    dd_max_rays: int = 200_000
    redundant_rows: int = 4096
    gcd_budget: int = 2_000_000
    lpd_vertex_cache: int = 20_000

    @classmethod
    def from_json(cls, path) -> "Limits":
        data = json.loads(Path(path).read_text())
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown limit keys: {sorted(unknown)}")
        return replace(cls(), **data)

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_LIMITS = Limits()
