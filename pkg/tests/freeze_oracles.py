"""Recompute the oracle values and write frozen_oracles.json.

Run from the repository root: ``python tests/freeze_oracles.py``.
"""

from __future__ import annotations

import json
from pathlib import Path

import oracles
from _codes import SMALL, matrix


def frac_list(v):
    return [str(x) for x in v]


def build() -> dict:
    out: dict = {}
    for name, rows in SMALL.items():
        H = matrix(rows)
        out[name] = {
            "codewords": ["".join(map(str, w)) for w in oracles.codewords(H)],
            "girth": oracles.girth(H) if oracles.girth(H) != float("inf") else "inf",
            "diameter": oracles.diameter(H) if oracles.diameter(H) != float("inf") else "inf",
            "vertices": [frac_list(v) for v in oracles.polytope_vertices(H)],
            "rays": [[int(x) for x in r] for r in oracles.cone_rays(H)],
            "stopping_sets": [sorted(int(i) for i in S) for S in oracles.stopping_sets(H)],
            "redundant_rows_r2": sorted("".join(map(str, r)) for r in oracles.row_span_sums(H, 2)),
        }
    H = matrix(SMALL["three_bit"])
    out["three_bit"]["lp"] = {
        "c=-1,-1,-1": round(oracles.lp_value(H, [-1, -1, -1])[0], 9),
        "c=1,1,1": round(oracles.lp_value(H, [1, 1, 1])[0], 9),
        "c=2,-1,-2": round(oracles.lp_value(H, [2, -1, -2])[0], 9),
    }
    return out


if __name__ == "__main__":
    path = Path(__file__).with_name("frozen_oracles.json")
    path.write_text(json.dumps(build(), indent=1) + "\n")
    print(f"wrote {path}")
