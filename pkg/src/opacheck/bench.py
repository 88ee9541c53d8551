"""Timing harness: search effort per step bound, CSV-friendly.

The point of measuring several bounds on one system is that expansion counts
stop depending on the bound once the search saturates.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .automata import DES, format_step_bound
from .verify import verify_kso_detailed


@dataclass(frozen=True)
class BenchRow:
    k: object
    expansions: int
    wall_seconds: float
    backend: str


def bench_des(d: DES, ks, backend: str | None = None, repeat: int = 1) -> list[BenchRow]:
    rows = []
    for k in ks:
        best = None
        stats = None
        for _ in range(max(1, repeat)):
            t0 = time.perf_counter()
            _, stats = verify_kso_detailed(d, k, backend=backend, extract_witness=False)
            dt = time.perf_counter() - t0
            best = dt if best is None or dt < best else best
        rows.append(BenchRow(k, stats.expansions, best, stats.backend))
    return rows


def rows_to_csv(rows) -> str:
    out = ["k,expansions,wall_seconds"]
    for r in rows:
        out.append(f"{format_step_bound(r.k)},{r.expansions},{r.wall_seconds:.6f}")
    return "\n".join(out) + "\n"
