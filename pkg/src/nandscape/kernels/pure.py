"""Pure-Python evaluation backend.

Signals are unpacked numpy uint8 vectors, one entry per input pattern. NAND is
an elementwise op; pooled components gather through their unpacked lookup
tables with fancy indexing. Output columns are repacked into Python ints, bit
p = pattern p, so results are bit-identical to the native backend.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .plan import EvalPlan


@lru_cache(maxsize=512)
def _lookup_rows(table) -> np.ndarray:
    """Unpacked (output_arity, 2**k) uint8 view of a truth table."""
    n = 1 << table.input_arity
    nbytes = (n + 7) // 8
    rows = np.empty((table.output_arity, n), dtype=np.uint8)
    for j, col in enumerate(table.bits):
        raw = np.frombuffer(col.to_bytes(nbytes, "little"), dtype=np.uint8)
        rows[j] = np.unpackbits(raw, count=n, bitorder="little")
    rows.setflags(write=False)
    return rows


def evaluate_plan(plan: EvalPlan) -> tuple[int, ...]:
    n = plan.n_rows
    sig: list = [None] * plan.n_slots
    idx = np.arange(n, dtype=np.uint32)
    one = np.uint32(1)
    for i in range(plan.m):
        sig[i] = ((idx >> np.uint32(i)) & one).astype(np.uint8)
    sig[plan.m] = np.zeros(n, dtype=np.uint8)
    sig[plan.m + 1] = np.ones(n, dtype=np.uint8)

    srcs = plan.tbl_srcs
    for kind, a, b, out in plan.ops.tolist():
        if kind == 0:
            sig[out] = (sig[a] & sig[b]) ^ 1
        else:
            tbl = plan.tables[a]
            q = np.zeros(n, dtype=np.uint32)
            for j in range(tbl.input_arity):
                q |= sig[srcs[b + j]].astype(np.uint32) << np.uint32(j)
            rows = _lookup_rows(tbl)
            for jj in range(tbl.output_arity):
                sig[out + jj] = rows[jj][q]

    outs = []
    for s in plan.out_slots.tolist():
        packed = np.packbits(sig[s], bitorder="little")
        outs.append(int.from_bytes(packed.tobytes(), "little"))
    return tuple(outs)
