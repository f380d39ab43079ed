"""Wrapper around the compiled kernel: packs tables, unpacks results."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _native
from .plan import EvalPlan

_EMPTY_I32 = np.empty(0, dtype=np.int32)


@lru_cache(maxsize=1024)
def _packed_rows(table) -> np.ndarray:
    """(output_arity, W) uint64 words of a truth table, 64 patterns per word."""
    n = 1 << table.input_arity
    w = (n + 63) // 64
    rows = np.empty((table.output_arity, w), dtype=np.uint64)
    for j, col in enumerate(table.bits):
        rows[j] = np.frombuffer(col.to_bytes(w * 8, "little"), dtype=np.uint64)
    rows.setflags(write=False)
    return rows


def evaluate_plan(plan: EvalPlan) -> tuple[int, ...]:
    tables = plan.tables
    if tables:
        words = [_packed_rows(t) for t in tables]
        k_in = np.fromiter((t.input_arity for t in tables), dtype=np.int32, count=len(tables))
        k_out = np.fromiter((t.output_arity for t in tables), dtype=np.int32, count=len(tables))
    else:
        words = []
        k_in = k_out = _EMPTY_I32
    raw = _native.run_plan(
        plan.m, plan.n_slots, plan.ops, plan.tbl_srcs, k_in, k_out, words, plan.out_slots
    )
    n = plan.n_rows
    nbytes = (n + 7) // 8
    outs = []
    for row in raw:
        v = int.from_bytes(row.tobytes()[:nbytes], "little")
        if n & 7:
            v &= (1 << n) - 1
        outs.append(v)
    return tuple(outs)
