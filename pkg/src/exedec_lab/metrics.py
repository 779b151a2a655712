"""Decomposition-quality scores for finished runs.

Both accuracies compare a run with the ground-truth program as multisets,
ignoring step order, and divide the number of one-to-one matches by the
ground-truth length (capped at 1):

* subtask accuracy matches per-step value tuples (what each step computed on
  every example);
* subprogram accuracy matches the steps themselves after renaming the
  intermediate variables each step reads to positional placeholders.
"""

from __future__ import annotations

import csv
import math
import statistics
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from scipy import stats

from .deepcoder import dc_eval_program
from .engine import RunResult
from .robustfill import rf_eval_steps
from .syntax import DcStep, Domain, Program
from .text import render_rf_expr
from .values import TaskSpec, value_key

CI_METHOD = "student-t 95%"


def _state_key(values) -> tuple:
    return tuple(value_key(v) for v in values)


def gt_states(gt: Program, spec: TaskSpec) -> list[tuple]:
    """Per-step value tuples of ``gt`` across the examples of ``spec``."""
    if gt.domain is Domain.DEEPCODER:
        per_example = [dc_eval_program(gt, {n: ex.env[n] for n in gt.inputs}) for ex in spec.examples]
    else:
        per_example = [rf_eval_steps(gt, ex.env["x0"]) for ex in spec.examples]
    return [tuple(vals[k] for vals in per_example) for k in range(len(gt))]


def _overlap(predicted: Iterable, truth: Iterable, gt_steps: int) -> Fraction:
    matched = sum((Counter(predicted) & Counter(truth)).values())
    return min(Fraction(matched, gt_steps), Fraction(1))


def subtask_accuracy(run: RunResult, gt: Program, spec: TaskSpec, use_subgoals: bool = False) -> Fraction:
    """Share of ground-truth intermediate states the run reproduced.

    With ``use_subgoals`` the run's predicted subgoals are scored instead of
    its executed values (steps without a subgoal then count as misses).
    """
    truth = [_state_key(s) for s in gt_states(gt, spec)]
    if use_subgoals:
        predicted = [_state_key(t.subgoal) for t in run.traces if t.subgoal is not None]
    else:
        predicted = [_state_key(t.values) for t in run.traces]
    return _overlap(predicted, truth, len(gt))


def step_signature(step, inputs: Sequence[str]) -> tuple | str:
    """Step identity up to the names of intermediate variables.

    The target is dropped, input names are kept, and every other variable
    becomes a placeholder numbered by first appearance within the step.
    """
    if not isinstance(step, DcStep):
        return render_rf_expr(step)
    names: dict[str, str] = {}
    args = []
    for a in step.args:
        if a in inputs:
            args.append(a)
        else:
            args.append(names.setdefault(a, f"_{len(names)}"))
    return (step.op.value, step.fn, tuple(args))


def subprogram_accuracy(run: RunResult, gt: Program) -> Fraction:
    truth = [step_signature(s, gt.inputs) for s in gt.steps]
    predicted = [step_signature(t.subprogram, gt.inputs) for t in run.traces]
    return _overlap(predicted, truth, len(gt))


@dataclass(frozen=True)
class TaskScore:
    task_id: str
    subtask_accuracy: Fraction
    subprogram_accuracy: Fraction
    steps_used: int
    gt_steps: int
    solved: bool
    seed: int = 0


def score_task(run: RunResult, gt: Program, spec: TaskSpec, task_id: str = "", seed: int = 0,
               use_subgoals: bool = False) -> TaskScore:
    return TaskScore(
        task_id,
        subtask_accuracy(run, gt, spec, use_subgoals),
        subprogram_accuracy(run, gt),
        run.steps_used,
        len(gt),
        run.solved,
        seed,
    )


# ---------------------------------------------------------------------------
# aggregates


def bin_index(value, bins: int) -> int:
    """Equal-width, right-closed bins on [0, 1]; 0 itself joins the first bin."""
    v = Fraction(value).limit_denominator(10**9) if isinstance(value, float) else Fraction(value)
    return max(math.ceil(v * bins) - 1, 0)


@dataclass(frozen=True)
class DensityGrid:
    bins: int
    counts: tuple[tuple[int, ...], ...]  # counts[x_bin][y_bin]
    total: int

    def cell(self, x_bin: int, y_bin: int) -> int:
        return self.counts[x_bin][y_bin]

    def long_format(self) -> list[tuple[int, int, int]]:
        return [(x, y, self.counts[x][y]) for x in range(self.bins) for y in range(self.bins)]


def density_grid(scores: Sequence[TaskScore], bins: int = 4) -> DensityGrid:
    """2-D histogram of (subtask, subprogram) accuracy."""
    if bins < 2:
        raise ValueError("bins must be at least 2")
    grid = [[0] * bins for _ in range(bins)]
    for s in scores:
        grid[bin_index(s.subtask_accuracy, bins)][bin_index(s.subprogram_accuracy, bins)] += 1
    return DensityGrid(bins, tuple(tuple(row) for row in grid), len(scores))


@dataclass(frozen=True)
class DecompositionHistogram:
    counts: dict[tuple[int, int], int]  # (gt_steps, steps_used) -> solved runs
    mean_gt_steps: float | None
    mean_steps_used: float | None

    def is_diagonal(self) -> bool:
        return all(gt == used for gt, used in self.counts)


def decomposition_histogram(runs: Sequence[RunResult], gt_lengths: Sequence[int]) -> DecompositionHistogram:
    """Joint counts of ground-truth length and steps used, solved runs only."""
    pairs = [(g, r.steps_used) for r, g in zip(runs, gt_lengths) if r.solved]
    counts = dict(sorted(Counter(pairs).items()))
    if not pairs:
        return DecompositionHistogram(counts, None, None)
    return DecompositionHistogram(
        counts,
        statistics.fmean(g for g, _ in pairs),
        statistics.fmean(u for _, u in pairs),
    )


def end_to_end_accuracy(runs: Sequence[RunResult]) -> float:
    if not runs:
        return 0.0
    return sum(r.solved for r in runs) / len(runs)


def mean_ci(values: Sequence[float], confidence: float = 0.95) -> tuple[float, float, float]:
    """Mean with a Student-t confidence interval; degenerate for fewer than 2 values."""
    if not values:
        return (math.nan, math.nan, math.nan)
    mean = statistics.fmean(values)
    if len(values) < 2:
        return (mean, mean, mean)
    sem = statistics.stdev(values) / math.sqrt(len(values))
    half = stats.t.ppf((1 + confidence) / 2, len(values) - 1) * sem
    return (mean, mean - half, mean + half)


# ---------------------------------------------------------------------------
# CSV reports


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, Fraction)):
        return f"{float(x):.6f}"
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def write_reports(outdir, groups: dict, bins: int = 4) -> list[Path]:
    """Write per-task, summary, density and decomposition CSVs.

    ``groups`` maps a ``(domain, category, split, mode)`` label tuple to a list
    of ``(TaskScore, RunResult)`` pairs.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    label_cols = ["domain", "category", "split", "mode"]
    per_task, summary, density, decomp = [], [], [], []
    for label in sorted(groups):
        pairs = groups[label]
        for s, _ in pairs:
            per_task.append([*label, s.task_id, s.seed, s.solved, s.subtask_accuracy,
                             s.subprogram_accuracy, s.steps_used, s.gt_steps])
        by_seed: dict[int, list] = {}
        for s, r in pairs:
            by_seed.setdefault(s.seed, []).append(r)
        accs = [end_to_end_accuracy(by_seed[k]) for k in sorted(by_seed)]
        mean, lo, hi = mean_ci(accs)
        solved = [s for s, _ in pairs if s.solved]
        summary.append([
            *label, len(pairs), len(by_seed), sum(s.solved for s, _ in pairs), mean, lo, hi,
            statistics.fmean(float(s.subtask_accuracy) for s in solved) if solved else None,
            statistics.fmean(float(s.subprogram_accuracy) for s in solved) if solved else None,
            CI_METHOD,
        ])
        grid = density_grid(solved, bins)
        for x, y, n in grid.long_format():
            density.append([*label, x, y, n])
        hist = decomposition_histogram([r for _, r in pairs], [s.gt_steps for s, _ in pairs])
        for (g, u), n in hist.counts.items():
            decomp.append([*label, g, u, n])
    paths = [outdir / name for name in ("per_task.csv", "summary.csv", "density.csv", "decompositions.csv")]
    write_csv(paths[0], label_cols + ["task_id", "seed", "solved", "subtask_accuracy",
                                      "subprogram_accuracy", "steps_used", "gt_steps"], per_task)
    write_csv(paths[1], label_cols + ["tasks", "seeds", "solved", "accuracy", "ci_low", "ci_high",
                                      "mean_subtask_accuracy", "mean_subprogram_accuracy", "ci_method"], summary)
    write_csv(paths[2], label_cols + ["x_bin", "y_bin", "count"], density)
    write_csv(paths[3], label_cols + ["gt_steps", "steps_used", "count"], decomp)
    return paths
