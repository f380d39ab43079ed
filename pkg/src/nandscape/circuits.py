"""Circuit drafts: random composition, evaluation, and cost.

A draft is an ordered list of components, each a NAND primitive or a pooled
(previously created) circuit used as a black box. Input terminals reference
earlier components only, which makes every draft a DAG by construction.
Constants are wiring sources, not components, and do not count toward the
2..12 component bound. The draft's outputs are its dangling component outputs,
ordered by (component index, output index).

Source references are packed into ints for speed:

* ``0 <= s < 16``           external input ``s``
* ``s == -1`` / ``s == -2`` constant true / false
* ``s >= 16``               output ``(s - 16) & 127`` of component ``(s - 16) >> 7``
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .kernels import EvalPlan
from .tables import MAX_INPUTS, Signature, TruthTable, signature_of

CONST_TRUE = -1
CONST_FALSE = -2
MIN_COMPONENTS = 2
MAX_COMPONENTS = 12


class StructuralError(Exception):
    """A draft violates a structural invariant (bad reference, arity, bounds)."""


def ext_input(i: int) -> int:
    return i


def comp_output(component_index: int, output_index: int) -> int:
    return 16 + (component_index << 7) + output_index


def decode_source(src: int) -> tuple:
    """Readable view of a packed source: ('const', bool) / ('ext', i) / ('comp', c, j)."""
    if src == CONST_TRUE:
        return ("const", True)
    if src == CONST_FALSE:
        return ("const", False)
    if src < 16:
        return ("ext", src)
    v = src - 16
    return ("comp", v >> 7, v & 127)


class NandPrimitive:
    """The primitive component kind; a single 2-input NAND gate."""

    __slots__ = ()
    input_arity = 2
    output_arity = 1

    def __repr__(self):
        return "NAND"


NAND = NandPrimitive()


class Pooled:
    """A pooled circuit used as a component, reduced to its table and cost.

    ``frozen_cost`` is the pool cost captured when this view was built; later
    improvements of the underlying signature never reprice components that
    already reference it.
    """

    __slots__ = ("signature", "table", "frozen_cost")

    def __init__(self, signature: Signature, table: TruthTable, frozen_cost: int):
        self.signature = signature
        self.table = table
        self.frozen_cost = frozen_cost

    @property
    def input_arity(self) -> int:
        return self.table.input_arity

    @property
    def output_arity(self) -> int:
        return self.table.output_arity

    def __repr__(self):
        return f"Pooled({self.signature!r}, cost={self.frozen_cost})"


class ComponentInstance:
    __slots__ = ("kind", "inputs")

    def __init__(self, kind, inputs: tuple[int, ...]):
        self.kind = kind
        self.inputs = inputs

    def __repr__(self):
        return f"ComponentInstance({self.kind!r}, {self.inputs})"


class CircuitDraft:
    __slots__ = ("components", "external_input_count")

    def __init__(self, components: Sequence[ComponentInstance], external_input_count: int):
        self.components = tuple(components)
        self.external_input_count = external_input_count

    def __repr__(self):
        return (
            f"CircuitDraft({len(self.components)} components, "
            f"{self.external_input_count} inputs)"
        )


@dataclass(frozen=True)
class ComposeParams:
    """Choice-function probabilities and structural bounds for composition.

    Per component slot: a constant source with probability ``p_const`` (true
    or false equally), a NAND primitive with probability ``p_nand``, otherwise
    a uniform draw from the active pool. While the pool is empty its
    probability mass folds into the NAND primitive.
    """

    p_const: float = 0.05
    p_nand: float = 0.50
    min_components: int = MIN_COMPONENTS
    max_components: int = MAX_COMPONENTS
    max_external_inputs: int = MAX_INPUTS

    def __post_init__(self):
        if not 0.0 <= self.p_const < 1.0:
            raise ValueError("p_const must be in [0, 1)")
        if not 0.0 <= self.p_nand <= 1.0:
            raise ValueError("p_nand must be in [0, 1]")
        if self.p_const + self.p_nand > 1.0:
            raise ValueError("p_const + p_nand must not exceed 1")
        if not MIN_COMPONENTS <= self.min_components <= self.max_components <= MAX_COMPONENTS:
            raise ValueError(
                f"component range must satisfy {MIN_COMPONENTS} <= min <= max <= {MAX_COMPONENTS}"
            )
        if not 1 <= self.max_external_inputs <= MAX_INPUTS:
            raise ValueError(f"max_external_inputs must be in [1, {MAX_INPUTS}]")


def validate_draft(draft: CircuitDraft) -> None:
    """Raise StructuralError unless all draft invariants hold."""
    comps = draft.components
    if not MIN_COMPONENTS <= len(comps) <= MAX_COMPONENTS:
        raise StructuralError(
            f"component count {len(comps)} outside [{MIN_COMPONENTS}, {MAX_COMPONENTS}]"
        )
    m = draft.external_input_count
    if not 0 <= m <= MAX_INPUTS:
        raise StructuralError(f"external input count {m} outside [0, {MAX_INPUTS}]")
    for ci, comp in enumerate(comps):
        kind = comp.kind
        if len(comp.inputs) != kind.input_arity:
            raise StructuralError(
                f"component {ci}: {len(comp.inputs)} inputs, arity {kind.input_arity}"
            )
        for src in comp.inputs:
            if src in (CONST_TRUE, CONST_FALSE):
                continue
            if src < 0:
                raise StructuralError(f"component {ci}: bad source code {src}")
            if src < 16:
                if src >= m:
                    raise StructuralError(
                        f"component {ci}: external input {src} >= declared count {m}"
                    )
                continue
            v = src - 16
            c, j = v >> 7, v & 127
            if c >= ci:
                raise StructuralError(
                    f"component {ci}: forward reference to component {c}"
                )
            if j >= comps[c].kind.output_arity:
                raise StructuralError(
                    f"component {ci}: output {j} out of range for component {c}"
                )


def dangling_outputs(draft: CircuitDraft) -> list[tuple[int, int]]:
    """Unreferenced component outputs in (component, output) order: the circuit outputs."""
    referenced = set()
    for comp in draft.components:
        for src in comp.inputs:
            if src >= 16:
                v = src - 16
                referenced.add((v >> 7, v & 127))
    outs = []
    for ci, comp in enumerate(draft.components):
        for j in range(comp.kind.output_arity):
            if (ci, j) not in referenced:
                outs.append((ci, j))
    return outs


def _compile_plan(draft: CircuitDraft) -> EvalPlan:
    m = draft.external_input_count
    const_false = m
    const_true = m + 1
    next_slot = m + 2
    comp_base = []
    ops = []
    tbl_srcs: list[int] = []
    tables: list[TruthTable] = []
    referenced: set[int] = set()  # slots consumed by some later component

    def resolve(src: int) -> int:
        if src >= 16:
            v = src - 16
            slot = comp_base[v >> 7] + (v & 127)
            referenced.add(slot)
            return slot
        if src >= 0:
            return src
        return const_true if src == CONST_TRUE else const_false

    for comp in draft.components:
        kind = comp.kind
        base = next_slot
        comp_base.append(base)
        next_slot += kind.output_arity
        if kind is NAND:
            ops.append((0, resolve(comp.inputs[0]), resolve(comp.inputs[1]), base))
        else:
            off = len(tbl_srcs)
            tbl_srcs.extend(resolve(s) for s in comp.inputs)
            ops.append((1, len(tables), off, base))
            tables.append(kind.table)

    out_slots = [s for s in range(m + 2, next_slot) if s not in referenced]
    return EvalPlan(
        m=m,
        n_slots=next_slot,
        ops=np.array(ops, dtype=np.int32).reshape(-1, 4),
        tbl_srcs=np.array(tbl_srcs, dtype=np.int32),
        tables=tuple(tables),
        out_slots=np.array(out_slots, dtype=np.int32),
    )


def _evaluate_checked(draft: CircuitDraft) -> TruthTable:
    cols = kernels.evaluate_plan(_compile_plan(draft))
    return TruthTable(draft.external_input_count, len(cols), cols)


def evaluate(draft: CircuitDraft) -> TruthTable:
    """Truth table of a draft over all 2**m input patterns.

    Signals propagate in component order; NAND is computed directly, pooled
    components by lookup in their stored tables. Outputs are the dangling
    component outputs in canonical order.
    """
    validate_draft(draft)
    return _evaluate_checked(draft)


def _cost_of(draft: CircuitDraft) -> int:
    total = 0
    for comp in draft.components:
        total += 1 if comp.kind is NAND else comp.kind.frozen_cost
    return total


def cost(draft: CircuitDraft) -> int:
    """Total NAND count: 1 per primitive, frozen cost per pooled component."""
    validate_draft(draft)
    return _cost_of(draft)


@dataclass(frozen=True)
class Circuit:
    """An evaluated draft with its functionality key and frozen cost."""

    draft: CircuitDraft
    table: TruthTable
    signature: Signature
    cost: int
    created_trial: int
    creator_agent: int


def build_circuit(draft: CircuitDraft, created_trial: int = 0, creator_agent: int = 0) -> Circuit:
    validate_draft(draft)
    table = _evaluate_checked(draft)
    return Circuit(
        draft, table, signature_of(table), _cost_of(draft), created_trial, creator_agent
    )


def compose_random(
    pool_view: Sequence[Pooled], params: ComposeParams, rng
) -> CircuitDraft:
    """Draw a random draft against a snapshot of the pool.

    The target component count is uniform over the configured range. Slots are
    drawn through the choice function; a constant slot only adds a wiring
    source and does not count toward the target. Each input terminal of a new
    component picks uniformly among all earlier slot outputs (component
    outputs and drawn constants), the external inputs created so far, and one
    fresh-external-input candidate, which is withdrawn once the input cap is
    reached. Uniform picks are ``int(rng.random() * n)``. Identical
    (pool_view, params, rng state) yields identical drafts.
    """
    random = rng.random
    target = rng.randint(params.min_components, params.max_components)
    p_const = params.p_const
    p_nand_cut = p_const + params.p_nand
    cap = params.max_external_inputs
    pool_n = len(pool_view)

    comps: list[ComponentInstance] = []
    sources: list[int] = []  # wirable slot outputs, in creation order
    ext_count = 0

    while len(comps) < target:
        u = random()
        if u < p_const:
            sources.append(CONST_TRUE if random() < 0.5 else CONST_FALSE)
            continue
        if pool_n == 0 or u < p_nand_cut:
            kind = NAND
        else:
            kind = pool_view[int(random() * pool_n)]
        n_sources = len(sources)
        n_fixed = n_sources + ext_count
        inputs = []
        for _ in range(kind.input_arity):
            n_cand = n_fixed + (1 if ext_count < cap else 0)
            if n_cand == 0:
                pick = n_fixed  # unreachable for valid params; forces a fresh input
            else:
                pick = int(random() * n_cand)
            if pick < n_sources:
                inputs.append(sources[pick])
            elif pick < n_fixed:
                inputs.append(pick - n_sources)
            else:
                inputs.append(ext_count)
                ext_count += 1
                n_fixed += 1
        ci = len(comps)
        comps.append(ComponentInstance(kind, tuple(inputs)))
        for j in range(kind.output_arity):
            sources.append(comp_output(ci, j))

    return CircuitDraft(comps, ext_count)
