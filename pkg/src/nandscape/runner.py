"""Experiment harness: config handling, job expansion, parallel execution.

A config is a flat key=value text file; every key can be overridden by a CLI
flag of the same name. Each (group size, replication) cell becomes one job
with a seed derived from the master seed, so any job can be reproduced in
isolation. Jobs share nothing and write their own event files as they finish;
the coordinator writes summary.csv in canonical job order and manifest.txt
last.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, fields, replace

from . import __version__
from .circuits import ComposeParams
from .engine import Event, ReplicationConfig, run_replication
from .rng import derive_seed

EVENTS_HEADER = "trial,agent,event,goal,cost,closeness,accepted"
SUMMARY_HEADER = (
    "group_size,replication,seed,termination_trial,goals_met,inventions,improvements,junk"
)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    group_sizes: tuple[int, ...] = (1, 2, 4, 8)
    replications: int = 20
    max_trials: int = 100_000
    master_seed: int = 1
    p_const: float = 0.05
    p_nand: float = 0.50
    min_components: int = 2
    max_components: int = 12
    max_external_inputs: int = 16
    close_threshold: float = 0.65
    out_dir: str = "runs"
    jobs: int = 0  # 0 = hardware parallelism
    write_junk: bool = True
    store_drafts: bool = False

    def validate(self) -> list[str]:
        errors = []
        if not self.group_sizes:
            errors.append("group_sizes must not be empty")
        if any(g < 1 for g in self.group_sizes):
            errors.append("group sizes must be positive")
        if len(set(self.group_sizes)) != len(self.group_sizes):
            errors.append("group sizes must be distinct")
        if self.replications < 1:
            errors.append("replications must be >= 1")
        if self.max_trials < 1:
            errors.append("max_trials must be >= 1")
        if self.jobs < 0:
            errors.append("jobs must be >= 0")
        if not 0.5 < self.close_threshold <= 1.0:
            errors.append("close_threshold must be in (0.5, 1]")
        try:
            self.compose_params()
        except ValueError as exc:
            errors.append(str(exc))
        return errors

    def compose_params(self) -> ComposeParams:
        return ComposeParams(
            p_const=self.p_const,
            p_nand=self.p_nand,
            min_components=self.min_components,
            max_components=self.max_components,
            max_external_inputs=self.max_external_inputs,
        )

    def replication_config(self, group_size: int) -> ReplicationConfig:
        return ReplicationConfig(
            group_size=group_size,
            max_trials=self.max_trials,
            params=self.compose_params(),
            close_threshold=self.close_threshold,
            store_drafts=self.store_drafts,
        )

    def jobs_list(self) -> list[tuple[int, int, int]]:
        """(group_size, replication_index, seed) in canonical order."""
        return [
            (g, r, derive_seed(self.master_seed, g, r))
            for g in self.group_sizes
            for r in range(self.replications)
        ]


_BOOL_STRINGS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _coerce(name: str, kind, raw: str):
    raw = raw.strip()
    if kind is bool:
        if raw.lower() not in _BOOL_STRINGS:
            raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
        return _BOOL_STRINGS[raw.lower()]
    if name == "group_sizes":
        return parse_group_sizes(raw)
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r}") from None
    return raw


def parse_group_sizes(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"cannot parse group sizes from {raw!r}") from None


_FIELD_TYPES = {
    "group_sizes": tuple,
    "replications": int,
    "max_trials": int,
    "master_seed": int,
    "p_const": float,
    "p_nand": float,
    "min_components": int,
    "max_components": int,
    "max_external_inputs": int,
    "close_threshold": float,
    "out_dir": str,
    "jobs": int,
    "write_junk": bool,
    "store_drafts": bool,
}


def load_config(path: str | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Config from an optional key=value file plus already-typed overrides."""
    values: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, raw = (part.strip() for part in line.split("=", 1))
                if key not in _FIELD_TYPES:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = _coerce(key, _FIELD_TYPES[key], raw)
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


def config_lines(config: ExperimentConfig) -> list[str]:
    """Config echo in the same flat key=value format the parser accepts."""
    lines = []
    for f in fields(config):
        v = getattr(config, f.name)
        if f.name == "group_sizes":
            v = ",".join(str(g) for g in v)
        elif isinstance(v, bool):
            v = "true" if v else "false"
        lines.append(f"{f.name} = {v}")
    return lines


def _format_closeness(c: float | None) -> str:
    return "" if c is None else repr(c)


def write_events_csv(path: str, events: list[Event], write_junk: bool = True) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(EVENTS_HEADER + "\n")
        for e in events:
            if not write_junk and e.event == "junk":
                continue
            fh.write(
                f"{e.trial},{e.agent},{e.event},{e.goal or ''},{e.cost},"
                f"{_format_closeness(e.closeness)},{1 if e.accepted else 0}\n"
            )


def events_file_name(group_size: int, replication: int) -> str:
    return f"g{group_size}_r{replication}.events.csv"


@dataclass
class JobOutcome:
    group_size: int
    replication: int
    seed: int
    ok: bool
    termination_trial: int = 0
    goals_met: int = 0
    inventions: int = 0
    improvements: int = 0
    junk: int = 0
    error: str = ""


def _run_job(rep_config: ReplicationConfig, seed: int, replication: int, out_dir: str, write_junk: bool) -> JobOutcome:
    try:
        result = run_replication(rep_config, seed)
        path = os.path.join(out_dir, events_file_name(rep_config.group_size, replication))
        tmp = path + ".tmp"
        write_events_csv(tmp, result.events, write_junk)
        os.replace(tmp, path)
        return JobOutcome(
            group_size=rep_config.group_size,
            replication=replication,
            seed=seed,
            ok=True,
            termination_trial=result.termination_trial,
            goals_met=result.totals["goals_met"],
            inventions=result.totals["inventions"],
            improvements=result.totals["improvements"],
            junk=result.totals["junk"],
        )
    except Exception as exc:  # job isolation: a failed job must not sink the rest
        return JobOutcome(
            group_size=rep_config.group_size,
            replication=replication,
            seed=seed,
            ok=False,
            error=f"{type(exc).__name__}: {exc}",
        )


def run_experiment(config: ExperimentConfig) -> int:
    """Execute all jobs; returns 0 when every job succeeded."""
    errors = config.validate()
    if errors:
        raise ConfigError("; ".join(errors))
    os.makedirs(config.out_dir, exist_ok=True)

    jobs = config.jobs_list()
    n_workers = config.jobs or os.cpu_count() or 1
    outcomes: dict[tuple[int, int], JobOutcome] = {}

    if n_workers == 1 or len(jobs) == 1:
        for g, r, seed in jobs:
            outcomes[(g, r)] = _run_job(
                config.replication_config(g), seed, r, config.out_dir, config.write_junk
            )
    else:
        with ProcessPoolExecutor(max_workers=min(n_workers, len(jobs))) as pool:
            futures = {
                pool.submit(
                    _run_job,
                    config.replication_config(g),
                    seed,
                    r,
                    config.out_dir,
                    config.write_junk,
                ): (g, r)
                for g, r, seed in jobs
            }
            for fut in as_completed(futures):
                out = fut.result()
                outcomes[(out.group_size, out.replication)] = out

    summary_path = os.path.join(config.out_dir, "summary.csv")
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for g, r, seed in jobs:
            out = outcomes[(g, r)]
            if out.ok:
                fh.write(
                    f"{g},{r},{seed},{out.termination_trial},{out.goals_met},"
                    f"{out.inventions},{out.improvements},{out.junk}\n"
                )

    manifest_path = os.path.join(config.out_dir, "manifest.txt")
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# nandscape run manifest\n")
        fh.write(f"version = {__version__}\n")
        for line in config_lines(config):
            fh.write(line + "\n")
        fh.write("[jobs]\n")
        for g, r, seed in jobs:
            out = outcomes[(g, r)]
            if out.ok:
                fh.write(
                    f"group_size={g} replication={r} seed={seed} status=ok "
                    f"termination_trial={out.termination_trial} goals_met={out.goals_met} "
                    f"inventions={out.inventions} improvements={out.improvements} "
                    f"junk={out.junk} file={events_file_name(g, r)}\n"
                )
            else:
                fh.write(
                    f"group_size={g} replication={r} seed={seed} status=failed "
                    f"error={out.error!r}\n"
                )

    return 0 if all(out.ok for out in outcomes.values()) else 1
