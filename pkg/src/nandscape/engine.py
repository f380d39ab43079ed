"""Trial loop: simultaneous composition, classification, and pool merging.

Each trial every agent composes one circuit against the same start-of-trial
pool snapshot. Candidates are classified, in order: improvement or junk if
the signature is already pooled (improvement needs strictly lower cost),
goal-meeting invention if the table equals an unmet goal's table, partial
invention if it strictly raises the running best closeness of at least one
goal, junk otherwise. Junk is never pooled. Within a trial, non-junk
candidates are grouped by signature and the cheapest one per group (ties to
the lowest agent index) enters the pool; every agent still logs its own
classification, with ``accepted`` marking group winners.

A replication halts at the end of the trial in which the last goal is met,
or at the trial cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import rng as rngmod
from .circuits import (
    Circuit,
    ComposeParams,
    Pooled,
    build_circuit,
    compose_random,
)
from .goals import GoalRegistry, GoalState, closeness
from .tables import Signature, TruthTable


@dataclass(frozen=True)
class GoalMetInvention:
    goal: str


@dataclass(frozen=True)
class PartialInvention:
    # (goal name, new closeness) for every goal whose running best is exceeded
    gains: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class Improvement:
    old_cost: int
    new_cost: int


@dataclass(frozen=True)
class Junk:
    pass


JUNK = Junk()

Classification = GoalMetInvention | PartialInvention | Improvement | Junk


@dataclass(slots=True)
class Event:
    trial: int
    agent: int
    event: str  # goal | invention | improvement | junk
    goal: str | None
    cost: int
    closeness: float | None
    accepted: bool


@dataclass(slots=True)
class PoolEntry:
    signature: Signature
    table: TruthTable
    cost: int
    created_trial: int
    creator_agent: int
    kind: Pooled
    draft: object = None


class Pool:
    """Active circuits keyed by signature; replacement strictly lowers cost.

    Replaced circuits leave the active map and are never composed from again;
    an improvement swaps the incumbent in place, so the composition view stays
    in insertion order without rebuilding. ``history`` (optional) records
    every cost ever held per signature, for audits.
    """

    def __init__(self, track_history: bool = False):
        self.active: dict[Signature, PoolEntry] = {}
        self.replaced_count = 0
        self.history: dict[Signature, list[int]] | None = {} if track_history else None
        self._view: list[Pooled] = []
        self._view_index: dict[Signature, int] = {}

    def __len__(self) -> int:
        return len(self.active)

    def insert(self, entry: PoolEntry) -> None:
        assert entry.signature not in self.active
        self.active[entry.signature] = entry
        self._view_index[entry.signature] = len(self._view)
        self._view.append(entry.kind)
        if self.history is not None:
            self.history.setdefault(entry.signature, []).append(entry.cost)

    def replace(self, entry: PoolEntry) -> None:
        old = self.active[entry.signature]
        assert entry.cost < old.cost, "replacement must strictly decrease cost"
        self.active[entry.signature] = entry
        self._view[self._view_index[entry.signature]] = entry.kind
        self.replaced_count += 1
        if self.history is not None:
            self.history[entry.signature].append(entry.cost)

    def view(self) -> list[Pooled]:
        """The active circuits as composable components.

        This is the live list; it is only mutated by merges, never by readers,
        and all of a trial's compositions happen before its merge.
        """
        return self._view


@dataclass
class ReplicationConfig:
    group_size: int = 1
    max_trials: int = 100_000
    params: ComposeParams = field(default_factory=ComposeParams)
    close_threshold: float = 0.65
    store_drafts: bool = False
    track_pool_history: bool = False

    def validate(self) -> None:
        if self.group_size < 1:
            raise ValueError("group_size must be >= 1")
        if self.max_trials < 1:
            raise ValueError("max_trials must be >= 1")
        if not 0.5 < self.close_threshold <= 1.0:
            raise ValueError("close_threshold must be in (0.5, 1]")


@dataclass
class EngineState:
    config: ReplicationConfig
    registry: GoalRegistry
    pool: Pool
    goal_states: dict[str, GoalState]
    streams: list
    trial: int = 0
    goals_met: int = 0
    events: list[Event] = field(default_factory=list)

    @property
    def all_goals_met(self) -> bool:
        return self.goals_met == len(self.registry.goals)

    @property
    def terminated(self) -> bool:
        return self.all_goals_met or self.trial >= self.config.max_trials


def new_state(config: ReplicationConfig, seed: int, registry: GoalRegistry | None = None) -> EngineState:
    config.validate()
    registry = registry or GoalRegistry.builtin()
    return EngineState(
        config=config,
        registry=registry,
        pool=Pool(track_history=config.track_pool_history),
        goal_states=registry.new_states(),
        streams=[rngmod.agent_stream(seed, a) for a in range(config.group_size)],
    )


def classify(
    candidate: Circuit,
    pool: Pool,
    goal_states: dict[str, GoalState],
    registry: GoalRegistry,
    close_threshold: float = 0.65,
) -> Classification:
    """Classify one candidate against start-of-trial snapshots.

    A circuit counts as close to an unmet goal when its closeness reaches
    ``close_threshold`` or strictly exceeds the goal's running best, so early
    progress below the threshold is still captured while genuinely close
    circuits keep counting (and keep entering the pool) even once the running
    best is high.
    """
    incumbent = pool.active.get(candidate.signature)
    if incumbent is not None:
        if candidate.cost < incumbent.cost:
            return Improvement(incumbent.cost, candidate.cost)
        return JUNK
    goal = registry.by_signature.get(candidate.signature)
    if goal is not None and not goal_states[goal.name].met:
        return GoalMetInvention(goal.name)
    table = candidate.table
    gains = []
    for g in registry.by_arity.get((table.input_arity, table.output_arity), ()):
        state = goal_states[g.name]
        if state.met:
            continue
        c = closeness(table, g)
        if c >= close_threshold or c > state.best_closeness:
            gains.append((g.name, c))
    if gains:
        return PartialInvention(tuple(gains))
    return JUNK


def _entry_from(circuit: Circuit, store_draft: bool) -> PoolEntry:
    return PoolEntry(
        signature=circuit.signature,
        table=circuit.table,
        cost=circuit.cost,
        created_trial=circuit.created_trial,
        creator_agent=circuit.creator_agent,
        kind=Pooled(circuit.signature, circuit.table, circuit.cost),
        draft=circuit.draft if store_draft else None,
    )


def merge_trial(
    results: list[tuple[int, Circuit, Classification]], state: EngineState, trial: int
) -> None:
    """Apply one trial's simultaneous results to the pool and goal states."""
    groups: dict[Signature, list[tuple[int, Circuit, Classification]]] = {}
    for item in results:
        if not isinstance(item[2], Junk):
            groups.setdefault(item[1].signature, []).append(item)

    winners = set()
    goal_sigs = state.registry.by_signature
    for sig, members in groups.items():
        agent, circuit, cls = min(members, key=lambda t: (t[1].cost, t[0]))
        winners.add(agent)
        if isinstance(cls, Improvement):
            state.pool.replace(_entry_from(circuit, state.config.store_drafts))
            goal = goal_sigs.get(sig)
            if goal is not None:
                state.goal_states[goal.name].current_pool_cost = circuit.cost
        elif isinstance(cls, GoalMetInvention):
            state.pool.insert(_entry_from(circuit, state.config.store_drafts))
            gs = state.goal_states[cls.goal]
            gs.met = True
            gs.met_trial = trial
            gs.best_closeness = 1.0
            gs.current_pool_cost = circuit.cost
            state.goals_met += 1
        else:  # PartialInvention
            state.pool.insert(_entry_from(circuit, state.config.store_drafts))
            for gname, c in cls.gains:
                gs = state.goal_states[gname]
                if c > gs.best_closeness:
                    gs.best_closeness = c

    events = state.events
    for agent, circuit, cls in results:
        accepted = agent in winners
        if isinstance(cls, Junk):
            events.append(Event(trial, agent, "junk", None, circuit.cost, None, False))
        elif isinstance(cls, Improvement):
            events.append(
                Event(trial, agent, "improvement", None, circuit.cost, None, accepted)
            )
        elif isinstance(cls, GoalMetInvention):
            events.append(Event(trial, agent, "goal", cls.goal, circuit.cost, 1.0, accepted))
            events.append(
                Event(trial, agent, "invention", cls.goal, circuit.cost, 1.0, accepted)
            )
        else:
            gname, c = max(cls.gains, key=lambda gc: gc[1])
            events.append(Event(trial, agent, "invention", gname, circuit.cost, c, accepted))


def run_trial(state: EngineState) -> EngineState:
    """One simultaneous trial: compose, classify against the snapshot, merge."""
    trial = state.trial + 1
    view = state.pool.view()
    params = state.config.params
    threshold = state.config.close_threshold
    results = []
    for agent, stream in enumerate(state.streams):
        draft = compose_random(view, params, stream)
        circuit = build_circuit(draft, trial, agent)
        results.append(
            (agent, circuit, classify(circuit, state.pool, state.goal_states, state.registry, threshold))
        )
    merge_trial(results, state, trial)
    state.trial = trial
    return state


@dataclass
class ReplicationResult:
    seed: int
    group_size: int
    termination_trial: int
    all_goals_met: bool
    events: list[Event]
    goal_states: dict[str, GoalState]
    pool_size: int
    replaced_count: int
    totals: dict[str, int]
    pool_history: dict[Signature, list[int]] | None = None


def run_replication(
    config: ReplicationConfig, seed: int, registry: GoalRegistry | None = None
) -> ReplicationResult:
    """Run trials until every goal is met or the trial cap is reached."""
    state = new_state(config, seed, registry)
    while not state.terminated:
        run_trial(state)

    # met goals must still be present in the active pool
    for g in state.registry.goals:
        gs = state.goal_states[g.name]
        if gs.met:
            assert g.signature in state.pool.active, f"met goal {g.name} lost from pool"

    totals = {"goals_met": state.goals_met, "inventions": 0, "improvements": 0, "junk": 0}
    for e in state.events:
        if e.event == "invention":
            totals["inventions"] += 1
        elif e.event == "improvement":
            totals["improvements"] += 1
        elif e.event == "junk":
            totals["junk"] += 1

    return ReplicationResult(
        seed=seed,
        group_size=config.group_size,
        termination_trial=state.trial,
        all_goals_met=state.all_goals_met,
        events=state.events,
        goal_states=state.goal_states,
        pool_size=len(state.pool),
        replaced_count=state.pool.replaced_count,
        totals=totals,
        pool_history=state.pool.history,
    )


def audit_events(
    events: list[Event], group_size: int, close_threshold: float = 0.65
) -> None:
    """Assert the event-log invariants any run must satisfy.

    Per trial the invention/improvement/junk rows sum to the group size; each
    goal is attained in exactly one trial; every goal-tagged invention either
    reaches the closeness threshold or strictly beats the goal's running best
    as of the start of its trial (so the reconstructed best is non-decreasing
    and rises with every sub-threshold invention).
    """
    per_trial: dict[int, int] = {}
    goal_trials: dict[str, set[int]] = {}
    snap_best: dict[str, float] = {}  # best closeness at start of a goal's current trial
    run_best: dict[str, float] = {}
    best_trial: dict[str, int] = {}
    for e in events:
        if e.event in ("invention", "improvement", "junk"):
            per_trial[e.trial] = per_trial.get(e.trial, 0) + 1
        if e.event == "goal":
            goal_trials.setdefault(e.goal, set()).add(e.trial)
        if e.event == "invention" and e.goal is not None:
            assert e.closeness is not None
            if best_trial.get(e.goal) != e.trial:
                snap_best[e.goal] = run_best.get(e.goal, 0.0)
                best_trial[e.goal] = e.trial
            assert (
                e.closeness >= close_threshold or e.closeness > snap_best[e.goal]
            ), f"invention for {e.goal} neither close nor beating its running best"
            run_best[e.goal] = max(run_best.get(e.goal, 0.0), e.closeness)
    if events:
        n_trials = max(e.trial for e in events)
        assert set(per_trial) == set(range(1, n_trials + 1)), "missing trial rows"
        assert all(v == group_size for v in per_trial.values()), (
            "per-trial events do not sum to group size"
        )
    for name, trials in goal_trials.items():
        assert len(trials) == 1, f"goal {name} attained in more than one trial"
