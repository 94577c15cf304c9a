"""Run outputs: synchronized trace, delivery trajectory, outcome series.

All outputs are UTF-8 CSV with a header row and dot decimal separators,
plus a plain-text run summary. Output content is a pure function of the
scenario, flags, and seed; nothing time-of-day dependent is written.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .coordination import RunResult
from .errors import CareNetsError
from .scenario import CompiledScenario, ScenarioDocument, compile_scenario


def _fmt(value) -> str:
    if isinstance(value, float) and value == int(value):
        return str(int(value))
    return str(value)


def write_trace_csv(path: Path, result: RunResult) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["time", "net", "event_label", "psi_or_event_index",
                         "kind"])
        for row in result.trace:
            writer.writerow([_fmt(row.time), row.net, row.label,
                             row.index, row.kind])


def write_delivery_csv(path: Path, result: RunResult,
                       place_names: Sequence[str]) -> None:
    running = 0.0
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["time", "event_index", "psi", "kind"]
                        + [f"place:{name}" for name in place_names]
                        + ["cumulative_cost"])
        pending = list(result.cost_series[1:])
        next_cost = 0
        for index, point in enumerate(result.delivery_trajectory):
            if point.record is not None and \
                    point.record.kind.value == "complete":
                running = pending[next_cost][1]
                next_cost += 1
            psi = "" if point.record is None else point.record.psi
            kind = "initial" if point.record is None else \
                point.record.kind.value
            writer.writerow([_fmt(point.time), index, psi, kind]
                            + [int(c) for c in point.marking.place_tokens]
                            + [_fmt(running)])


def write_outcomes_csv(path: Path, result: RunResult) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["time", "individual_id", "outcome"])
        for time, individual, outcome in result.outcome_series:
            writer.writerow([_fmt(time), individual, _fmt(outcome)])


def write_summary(path: Path, compiled: CompiledScenario, result: RunResult,
                  mode: str, seed: int | None) -> None:
    lines = [
        f"scenario: {compiled.doc.name}",
        f"mode: {mode}",
        f"seed: {seed}",
        f"places: {len(compiled.net.place_names)}",
        f"transitions: {compiled.net.n_transitions}",
        f"individuals: {len(compiled.individuals)}",
        f"events applied: {len(result.trace)}",
        f"delivery completions: {int(result.completion_counts.sum())}",
        f"skipped optional health actions: {result.skipped_actions}",
        f"final cost: {_fmt(result.cost_series[-1][1])}",
    ]
    for i, name in enumerate(compiled.net.place_names):
        lines.append(f"final tokens at {name}: "
                     f"{int(result.final_marking.place_tokens[i])}")
    final_outcomes = final_outcome_by_individual(result)
    for ind in compiled.individuals:
        lines.append(f"final outcome for {ind.id}: "
                     f"{_fmt(final_outcomes[ind.id])}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def final_outcome_by_individual(result: RunResult) -> dict[str, float]:
    outcomes: dict[str, float] = {}
    for _, individual, outcome in result.outcome_series:
        outcomes[individual] = outcome
    return outcomes


@dataclass(frozen=True)
class RunFiles:
    directory: Path
    trace: Path
    delivery: Path
    outcomes: Path
    summary: Path


def write_run(out_dir: Path, compiled: CompiledScenario, result: RunResult,
              mode: str, seed: int | None) -> RunFiles:
    out_dir.mkdir(parents=True, exist_ok=True)
    files = RunFiles(out_dir,
                     out_dir / "trace.csv",
                     out_dir / "delivery.csv",
                     out_dir / "outcomes.csv",
                     out_dir / "summary.txt")
    write_trace_csv(files.trace, result)
    write_delivery_csv(files.delivery, result, compiled.net.place_names)
    write_outcomes_csv(files.outcomes, result)
    write_summary(files.summary, compiled, result, mode, seed)
    return files


def simulate_to_dir(doc: ScenarioDocument, mode: str, seed: int,
                    out_dir: str | Path, runs: int = 1) -> Path:
    """Run a scenario and write its report files under ``out_dir``.

    With ``runs`` greater than one, independent seeded runs execute in
    parallel, each writing into its own subdirectory, and their summary
    statistics merge into a top-level runs table. Partial outputs are
    removed if any run fails.
    """
    out_dir = Path(out_dir)
    compiled = compile_scenario(doc)
    written: list[Path] = []
    try:
        if runs <= 1:
            result = compiled.run(mode=mode, seed=seed)
            files = write_run(out_dir, compiled, result, mode, seed)
            return out_dir

        def one(k: int):
            return compiled.run(mode=mode, seed=seed + k)

        with ThreadPoolExecutor(max_workers=min(runs, 8)) as pool:
            results = list(pool.map(one, range(runs)))
        rows = []
        for k, result in enumerate(results):
            run_dir = out_dir / f"run_{k:03d}"
            write_run(run_dir, compiled, result, mode, seed + k)
            written.append(run_dir)
            outcomes = final_outcome_by_individual(result)
            rows.append((k, seed + k, result.cost_series[-1][1], outcomes))

        out_dir.mkdir(parents=True, exist_ok=True)
        runs_path = out_dir / "runs.csv"
        ids = [ind.id for ind in compiled.individuals]
        with runs_path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["run", "seed", "final_cost"]
                            + [f"final_outcome:{i}" for i in ids])
            for k, run_seed, cost, outcomes in rows:
                writer.writerow([k, run_seed, _fmt(cost)]
                                + [_fmt(outcomes[i]) for i in ids])
        costs = [row[2] for row in rows]
        lines = [f"scenario: {compiled.doc.name}",
                 f"mode: {mode}",
                 f"runs: {runs}",
                 f"base seed: {seed}",
                 f"mean final cost: {_fmt(sum(costs) / runs)}",
                 f"min final cost: {_fmt(min(costs))}",
                 f"max final cost: {_fmt(max(costs))}"]
        for ind_id in ids:
            values = [row[3][ind_id] for row in rows]
            lines.append(f"mean final outcome for {ind_id}: "
                         f"{_fmt(sum(values) / runs)}")
            lines.append(f"min final outcome for {ind_id}: "
                         f"{_fmt(min(values))}")
            lines.append(f"max final outcome for {ind_id}: "
                         f"{_fmt(max(values))}")
        (out_dir / "summary.txt").write_text("\n".join(lines) + "\n",
                                             encoding="utf-8")
        return out_dir
    except CareNetsError:
        _cleanup(out_dir, written)
        raise


def _cleanup(out_dir: Path, run_dirs: list[Path]) -> None:
    names = ["trace.csv", "delivery.csv", "outcomes.csv", "summary.txt",
             "runs.csv"]
    for directory in run_dirs + [out_dir]:
        if not directory.is_dir():
            continue
        for name in names:
            target = directory / name
            if target.exists():
                target.unlink()
        try:
            directory.rmdir()
        except OSError:
            pass
