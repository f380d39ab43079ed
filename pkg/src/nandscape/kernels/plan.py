"""Flat instruction plan consumed by the evaluation backends.

A draft is compiled once into slot-addressed instructions so backends can run
without touching the draft object model. Slot layout: slots ``0..m-1`` are the
external input patterns, slot ``m`` is constant false, slot ``m+1`` constant
true, and component outputs follow in component order. Ops are rows of
``(kind, a, b, out)``:

* kind 0, NAND: ``a``/``b`` are input slots, ``out`` the output slot.
* kind 1, table lookup: ``a`` indexes :attr:`EvalPlan.tables`, ``b`` is the
  offset of the component's input slots inside :attr:`EvalPlan.tbl_srcs`, and
  ``out`` is the first of its contiguous output slots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..tables import TruthTable


@dataclass(frozen=True)
class EvalPlan:
    m: int
    n_slots: int
    ops: np.ndarray        # int32 [n_ops, 4]
    tbl_srcs: np.ndarray   # int32, flattened table-op input slots
    tables: tuple[TruthTable, ...]
    out_slots: np.ndarray  # int32, dangling outputs in canonical order

    @property
    def n_rows(self) -> int:
        return 1 << self.m
