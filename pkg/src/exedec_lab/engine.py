"""Execution-guided synthesis loops and prediction backends.

Both loops build a program one step at a time. After each accepted step the
task specification is updated from the step's execution results:

* DeepCoder: the step's value is bound as a new input variable on every
  example; the target outputs stay the same.
* RobustFill: the produced string is stripped off the front of every
  example's remaining output.

:func:`run_regism` asks the synthesizer for a step that makes progress on the
whole task. :func:`run_exedec` first asks for a subgoal (the next step's
intended values), then for a step that reaches that subgoal.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from . import kernels
from .deepcoder import dc_enumerate_steps, dc_eval_program, dc_eval_step
from .errors import BackendError, ExecutionError, PrefixError, ProgramError, SpecError
from .robustfill import RfSearch, rf_eval_expression, rf_eval_steps
from .syntax import DcStep, Domain, Program, RfExpr, var_name
from .values import Kind, TaskSpec, Value, kind_of, normalize, value_key, values_equal

DEFAULT_BEAM = 10


@dataclass(frozen=True)
class StepTrace:
    index: int
    subgoal: tuple[Value, ...] | None
    subprogram: DcStep | RfExpr
    values: tuple[Value, ...]
    spec: TaskSpec


@dataclass(frozen=True)
class RunResult:
    solved: bool
    program: Program
    traces: tuple[StepTrace, ...]
    max_steps: int
    beam_size: int
    note: str | None = None

    @property
    def steps_used(self) -> int:
        return len(self.traces)


# ---------------------------------------------------------------------------
# specification update


def execute_step(spec: TaskSpec, sub, domain) -> tuple[Value, ...]:
    """Per-example result of ``sub`` on the current inputs."""
    domain = Domain(domain)
    if domain is Domain.DEEPCODER:
        return tuple(dc_eval_step(sub, ex.env) for ex in spec.examples)
    return tuple(rf_eval_expression(sub, ex.env["x0"]) for ex in spec.examples)


def apply_values(spec: TaskSpec, values: Sequence[Value], domain, target: str | None = None) -> TaskSpec:
    domain = Domain(domain)
    if domain is Domain.DEEPCODER:
        if target is None:
            target = var_name(len(spec.input_names))
        if target in spec.input_names:
            raise ProgramError(f"variable {target} is already bound")
        return TaskSpec(ex.with_input(target, v) for ex, v in zip(spec.examples, values))
    remaining = []
    for ex, v in zip(spec.examples, values):
        if not ex.output.startswith(v):
            raise PrefixError(f"{v!r} is not a prefix of the remaining output {ex.output!r}")
        remaining.append(ex.output[len(v):])
    return spec.with_outputs(remaining)


def update_spec(spec: TaskSpec, sub, domain) -> TaskSpec:
    """Specification after executing ``sub`` and folding its results in.

    Raises :class:`ExecutionError` if the step fails on some example, and
    :class:`PrefixError` for a RobustFill string that does not start the
    remaining output.
    """
    values = execute_step(spec, sub, domain)
    target = sub.target if isinstance(sub, DcStep) else None
    return apply_values(spec, values, domain, target)


def is_satisfied(spec: TaskSpec, domain, last_values: Sequence[Value] | None) -> bool:
    if Domain(domain) is Domain.DEEPCODER:
        if last_values is None:
            return False
        return all(values_equal(v, o) for v, o in zip(last_values, spec.outputs))
    return all(o == "" for o in spec.outputs)


def _state_key(spec: TaskSpec, domain):
    if Domain(domain) is Domain.DEEPCODER:
        return frozenset(tuple(value_key(v) for v in spec.column(n)) for n in spec.input_names)
    return spec.outputs


# ---------------------------------------------------------------------------
# backends


class PredictionBackend:
    """Interface for subgoal and subprogram predictors.

    Both request methods return at most ``beam`` candidates, best first.
    A subgoal is a tuple holding one value per example of ``spec``.
    """

    can_predict_subgoal = False
    can_predict_subprogram = False

    def subgoal(self, spec: TaskSpec, domain, beam: int) -> list[tuple[Value, ...]]:
        raise BackendError(f"{type(self).__name__} cannot predict subgoals")

    def subprogram(self, spec: TaskSpec, domain, beam: int) -> list:
        raise BackendError(f"{type(self).__name__} cannot predict subprograms")


def progress_distance(value: Value, target: Value) -> float:
    """0 for an exact match, up to 1 for no resemblance."""
    if kind_of(value) is not kind_of(target):
        return 1.0
    kind = kind_of(value)
    if kind is Kind.LIST:
        longest = max(len(value), len(target))
        return 0.0 if longest == 0 else 1.0 - kernels.lcs_length(value, target) / longest
    if kind is Kind.STR:
        longest = max(len(value), len(target))
        return 0.0 if longest == 0 else kernels.levenshtein(value, target) / longest
    return 0.0 if value == target else 1.0


def mean_distance(values: Sequence[Value], targets: Sequence[Value]) -> float:
    return sum(progress_distance(v, t) for v, t in zip(values, targets)) / len(targets)


class OracleBackend(PredictionBackend):
    """Exhaustive single-step synthesizer.

    Candidates are ranked by exact match on every example first, then by mean
    :func:`progress_distance`, then by enumeration order. Candidates that
    compute the same values as an earlier one are dropped, and so are
    DeepCoder steps that only recompute a variable that is already bound.
    ``search_budget`` caps the number of candidates examined per request;
    when it runs out the partial ranking is returned and ``exhausted`` is set.
    """

    can_predict_subprogram = True

    def __init__(self, search_budget: int | None = None, allowed=None):
        if allowed is not None and not set(allowed):
            raise ProgramError("allowed operation set is empty")
        self.search_budget = search_budget
        self.allowed = allowed
        self.exhausted = False

    def subprogram(self, spec: TaskSpec, domain, beam: int) -> list:
        domain = Domain(domain)
        self.exhausted = False
        if domain is Domain.DEEPCODER:
            scored = self._deepcoder(spec)
        else:
            scored = self._robustfill(spec, beam)
        scored.sort(key=lambda item: item[0])
        return [cand for _, cand in scored[:beam]]

    def _deepcoder(self, spec: TaskSpec):
        targets = spec.outputs
        envs = [ex.env for ex in spec.examples]
        bound = {tuple(value_key(v) for v in spec.column(n)) for n in spec.input_names}
        seen = set()
        scored = []
        for order, step in enumerate(dc_enumerate_steps(spec.signature(), self.allowed)):
            if self.search_budget is not None and order >= self.search_budget:
                self.exhausted = True
                break
            try:
                values = tuple(dc_eval_step(step, env) for env in envs)
            except ExecutionError:
                continue
            key = tuple(value_key(v) for v in values)
            if key in bound or key in seen:
                continue
            seen.add(key)
            exact = all(values_equal(v, t) for v, t in zip(values, targets))
            scored.append(((0 if exact else 1, mean_distance(values, targets), order), step))
        return scored

    def _robustfill(self, spec: TaskSpec, beam: int):
        search = RfSearch(spec.column("x0"), self.allowed, self.search_budget)
        targets = spec.outputs
        found = search.run(targets, beam)
        self.exhausted = search.exhausted
        scored = []
        for order, (expr, outs) in enumerate(found):
            exact = outs == targets
            scored.append(((0 if exact else 1, mean_distance(outs, targets), order), expr))
        return scored


def oracle_synth_backend(search_budget: int | None = None, allowed=None) -> OracleBackend:
    return OracleBackend(search_budget, allowed)


class TeacherSubgoalBackend(PredictionBackend):
    """Reveals the next ground-truth step's execution values as the only subgoal."""

    can_predict_subgoal = True

    def __init__(self, ground_truth: Program):
        self.gt = ground_truth

    def step_index(self, spec: TaskSpec) -> int:
        if self.gt.domain is Domain.DEEPCODER:
            return len(spec.input_names) - len(self.gt.inputs)
        per_example = [rf_eval_steps(self.gt, ex.env["x0"]) for ex in spec.examples]
        for k in range(len(self.gt) + 1):
            if all("".join(outs[k:]) == ex.output for outs, ex in zip(per_example, spec.examples)):
                return k
        raise BackendError("remaining outputs do not match any ground-truth suffix")

    def subgoal(self, spec: TaskSpec, domain, beam: int) -> list[tuple[Value, ...]]:
        k = self.step_index(spec)
        if not 0 <= k < len(self.gt):
            raise BackendError(f"no ground-truth step {k}; the program has {len(self.gt)}")
        if self.gt.domain is Domain.DEEPCODER:
            goal = tuple(
                dc_eval_program(self.gt, {n: ex.env[n] for n in self.gt.inputs})[k]
                for ex in spec.examples
            )
        else:
            goal = tuple(rf_eval_expression(self.gt.steps[k], ex.env["x0"]) for ex in spec.examples)
        return [goal][:beam]


def teacher_subgoal_backend(ground_truth: Program) -> TeacherSubgoalBackend:
    return TeacherSubgoalBackend(ground_truth)


# ---------------------------------------------------------------------------
# loops


def default_max_steps(gt_steps: int) -> int:
    return max(5, 2 * gt_steps)


def _task_parts(task):
    spec = task.spec
    gt = getattr(task, "ground_truth", None)
    domain = Domain(getattr(task, "domain", None) or gt.domain)
    return spec, gt, domain


@dataclass
class _Run:
    spec: TaskSpec
    domain: Domain
    inputs: tuple[str, ...]
    seen: set = field(default_factory=set)
    steps: list = field(default_factory=list)
    traces: list = field(default_factory=list)
    last_values: tuple | None = None

    def __post_init__(self):
        self.seen.add(_state_key(self.spec, self.domain))

    def try_accept(self, cand, subgoal) -> bool:
        """Execute ``cand``; keep it if it runs and leads to an unseen state."""
        if self.domain is Domain.DEEPCODER:
            if not isinstance(cand, DcStep):
                return False
            cand = cand.retarget(var_name(len(self.spec.input_names)))
        elif not isinstance(cand, RfExpr):
            return False
        try:
            values = execute_step(self.spec, cand, self.domain)
            new_spec = apply_values(self.spec, values, self.domain)
        except (ExecutionError, ProgramError):
            return False
        key = _state_key(new_spec, self.domain)
        if key in self.seen:
            return False
        self.seen.add(key)
        self.spec = new_spec
        self.steps.append(cand)
        self.last_values = values
        self.traces.append(StepTrace(len(self.traces), subgoal, cand, values, new_spec))
        return True

    @property
    def satisfied(self) -> bool:
        return is_satisfied(self.spec, self.domain, self.last_values)

    def result(self, max_steps, beam, note=None) -> RunResult:
        program = Program(self.domain, tuple(self.steps), self.inputs)
        return RunResult(self.satisfied, program, tuple(self.traces), max_steps, beam, note)


def _check_subgoal(goal, spec: TaskSpec) -> tuple[Value, ...]:
    goal = tuple(goal)
    if len(goal) != len(spec):
        raise BackendError(f"subgoal has {len(goal)} values for {len(spec)} examples")
    try:
        return tuple(normalize(v) for v in goal)
    except SpecError as exc:
        raise BackendError(f"malformed subgoal value: {exc}") from None


def run_regism(task, backend: PredictionBackend, max_steps: int | None = None,
               beam_size: int = DEFAULT_BEAM) -> RunResult:
    """Repeated single-step synthesis against the task's outputs."""
    if not backend.can_predict_subprogram:
        raise BackendError("REGISM needs a backend that predicts subprograms")
    spec, gt, domain = _task_parts(task)
    if max_steps is None:
        max_steps = default_max_steps(len(gt))
    run = _Run(spec, domain, spec.input_names)
    while len(run.traces) < max_steps and not run.satisfied:
        cands = backend.subprogram(run.spec, domain, beam_size)[:beam_size]
        if not any(run.try_accept(c, None) for c in cands):
            return run.result(max_steps, beam_size, "no executable candidate")
    return run.result(max_steps, beam_size)


def run_single_step(task, backend: PredictionBackend, beam_size: int = DEFAULT_BEAM) -> RunResult:
    """One synthesizer invocation, no iteration."""
    return run_regism(task, backend, 1, beam_size)


def run_exedec(task, subgoal_backend: PredictionBackend, synth_backend: PredictionBackend,
               max_steps: int | None = None, beam_size: int = DEFAULT_BEAM) -> RunResult:
    """Subgoal prediction, then synthesis of a step reaching it, repeated.

    Subgoals are tried in rank order and the first executable subprogram for
    any of them is accepted. The executed values, not the subgoal, update the
    specification.
    """
    if not subgoal_backend.can_predict_subgoal:
        raise BackendError("ExeDec needs a backend that predicts subgoals")
    if not synth_backend.can_predict_subprogram:
        raise BackendError("ExeDec needs a backend that predicts subprograms")
    spec, gt, domain = _task_parts(task)
    if max_steps is None:
        max_steps = default_max_steps(len(gt))
    run = _Run(spec, domain, spec.input_names)
    while len(run.traces) < max_steps and not run.satisfied:
        goals = subgoal_backend.subgoal(run.spec, domain, beam_size)[:beam_size]
        accepted = False
        for goal in goals:
            goal = _check_subgoal(goal, run.spec)
            subtask = run.spec.with_outputs(goal)
            cands = synth_backend.subprogram(subtask, domain, beam_size)[:beam_size]
            if any(run.try_accept(c, goal) for c in cands):
                accepted = True
                break
        if not accepted:
            return run.result(max_steps, beam_size, "no executable candidate")
    return run.result(max_steps, beam_size)


def run_paired(task, subgoal_backend, synth_backend, regism_backend=None,
               max_steps: int | None = None, beam_size: int = DEFAULT_BEAM) -> tuple[RunResult, RunResult]:
    """ExeDec run plus a REGISM run limited to the same number of steps."""
    exedec = run_exedec(task, subgoal_backend, synth_backend, max_steps, beam_size)
    regism = run_regism(task, regism_backend or synth_backend, exedec.steps_used, beam_size)
    return exedec, regism


def replay(result: RunResult, spec: TaskSpec) -> tuple[Value, ...] | None:
    """Final per-example values from re-running the assembled program.

    For DeepCoder these are the last assigned values, for RobustFill the
    concatenated outputs. ``None`` for an empty program.
    """
    program = result.program
    if not program.steps:
        return None
    if program.domain is Domain.DEEPCODER:
        return tuple(dc_eval_program(program, ex.env)[-1] for ex in spec.examples)
    return tuple("".join(rf_eval_steps(program, ex.env["x0"])) for ex in spec.examples)


__all__ = [
    "DEFAULT_BEAM", "OracleBackend", "PredictionBackend", "RunResult", "StepTrace",
    "TeacherSubgoalBackend", "apply_values", "default_max_steps", "execute_step", "is_satisfied",
    "mean_distance", "oracle_synth_backend", "progress_distance", "replay", "run_exedec",
    "run_paired", "run_regism", "run_single_step", "teacher_subgoal_backend", "update_spec",
]
