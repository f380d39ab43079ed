"""The 16 built-in goal functions and the closeness score.

Small goals are tabulated from their boolean definitions; IMPLY keeps the
orientation "false only when the second input is set without the first", so
it reads B implies A on inputs (A, B). All adder-family goals put the carry
in the highest output position: FULL-ADDER is (S, Cout) and the n-bit adders
(n = 1..8) take A0..A(n-1), B0..B(n-1) LSB first and produce S0..Sn with Sn
the final carry. The adder tables are built by a bit-parallel ripple-carry
recurrence over the packed input patterns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tables import Signature, TruthTable, matching_bits, signature_of, table_from_function


def input_pattern(i: int, m: int) -> int:
    """Packed column of external input i over all 2**m patterns."""
    if not 0 <= i < m:
        raise ValueError("input index outside arity")
    pat = ((1 << (1 << i)) - 1) << (1 << i)  # one block: 2**i zeros then 2**i ones
    span = 1 << (i + 1)
    total = 1 << m
    while span < total:
        pat |= pat << span
        span <<= 1
    return pat


@dataclass(frozen=True)
class GoalSpec:
    name: str
    table: TruthTable
    signature: Signature

    @property
    def input_arity(self) -> int:
        return self.table.input_arity

    @property
    def output_arity(self) -> int:
        return self.table.output_arity


@dataclass
class GoalState:
    """Per-replication progress toward one goal."""

    met: bool = False
    met_trial: int | None = None
    best_closeness: float = 0.0
    current_pool_cost: int | None = None


def _adder_table(n: int) -> TruthTable:
    m = 2 * n
    carry = 0
    cols = []
    for j in range(n):
        aj = input_pattern(j, m)
        bj = input_pattern(n + j, m)
        partial = aj ^ bj
        cols.append(partial ^ carry)
        carry = (aj & bj) | (carry & partial)
    cols.append(carry)
    return TruthTable(m, n + 1, tuple(cols))


def _spec(name: str, table: TruthTable) -> GoalSpec:
    return GoalSpec(name, table, signature_of(table))


def builtin_goals() -> list[GoalSpec]:
    """All 16 goals in canonical order."""
    goals = [
        _spec("NOT", table_from_function(1, 1, lambda v: (v[0] ^ 1,))),
        _spec("IMPLY", table_from_function(2, 1, lambda v: (v[0] | (v[1] ^ 1),))),
        _spec("AND", table_from_function(2, 1, lambda v: (v[0] & v[1],))),
        _spec("OR", table_from_function(2, 1, lambda v: (v[0] | v[1],))),
        _spec("XOR", table_from_function(2, 1, lambda v: (v[0] ^ v[1],))),
        _spec("EQUIV", table_from_function(2, 1, lambda v: (v[0] ^ v[1] ^ 1,))),
        _spec("3WAY-AND", table_from_function(3, 1, lambda v: (v[0] & v[1] & v[2],))),
        _spec(
            "FULL-ADDER",
            table_from_function(
                3, 2, lambda v: (v[0] ^ v[1] ^ v[2], (v[0] & v[1]) | (v[2] & (v[0] ^ v[1])))
            ),
        ),
    ]
    for n in range(1, 9):
        goals.append(_spec(f"ADDER-{n}", _adder_table(n)))
    return goals


GOAL_NAMES = tuple(g.name for g in builtin_goals())


def closeness(candidate: TruthTable, goal: GoalSpec) -> float:
    """Fraction of matching output bits; 0.0 on any arity mismatch.

    Equals 1.0 exactly when the candidate's signature equals the goal's.
    """
    t = goal.table
    if candidate.input_arity != t.input_arity or candidate.output_arity != t.output_arity:
        return 0.0
    total = t.output_arity << t.input_arity
    return matching_bits(candidate, t) / total


@dataclass(frozen=True)
class GoalRegistry:
    """Immutable index over the goal set, built once per run."""

    goals: tuple[GoalSpec, ...]
    by_name: dict = field(repr=False)
    by_arity: dict = field(repr=False)
    by_signature: dict = field(repr=False)

    @classmethod
    def builtin(cls) -> "GoalRegistry":
        return cls.from_goals(builtin_goals())

    @classmethod
    def from_goals(cls, goals) -> "GoalRegistry":
        goals = tuple(goals)
        by_arity: dict = {}
        for g in goals:
            by_arity.setdefault((g.input_arity, g.output_arity), []).append(g)
        return cls(
            goals=goals,
            by_name={g.name: g for g in goals},
            by_arity={k: tuple(v) for k, v in by_arity.items()},
            by_signature={g.signature: g for g in goals},
        )

    def new_states(self) -> dict[str, GoalState]:
        return {g.name: GoalState() for g in self.goals}
