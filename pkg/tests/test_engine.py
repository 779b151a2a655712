import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import random_program
from exedec_lab.engine import (
    OracleBackend, PredictionBackend, default_max_steps, progress_distance, replay, run_exedec,
    run_paired, run_regism, run_single_step, teacher_subgoal_backend, update_spec,
)
from exedec_lab.errors import BackendError, BudgetExhausted, ExecutionError, PrefixError, ProgramError
from exedec_lab.syntax import DcOp, Domain
from exedec_lab.taskgen import Task, build_corpus, generate_examples
from exedec_lab.text import parse_program, parse_step, render_step
from exedec_lab.values import Example, TaskSpec, spec_satisfied

DC = Domain.DEEPCODER
RF = Domain.ROBUSTFILL

FIG1 = TaskSpec([
    Example({"x0": [42, -48]}, [42, 42]),
    Example({"x0": [-35, -21]}, [-35, -21]),
    Example({"x0": [39, 32]}, [39, 39]),
])
FIG1_GT = parse_program("x1 = Scanl1 (max) x0", DC)


def fig1_task():
    return Task("fig1", FIG1, FIG1_GT, None, 0)


class Scripted(PredictionBackend):
    """Returns a fixed candidate list per call, in order."""

    def __init__(self, subgoals=(), subprograms=()):
        self.subgoals = list(subgoals)
        self.subprograms = list(subprograms)
        self.can_predict_subgoal = bool(self.subgoals)
        self.can_predict_subprogram = bool(self.subprograms)

    def subgoal(self, spec, domain, beam):
        return self.subgoals.pop(0)

    def subprogram(self, spec, domain, beam):
        return self.subprograms.pop(0)


def dc(text):
    return parse_step(text, DC, bound={"x0", "x1", "x2", "x3"})


# specification update


def test_update_spec_deepcoder():
    spec = TaskSpec([Example({"x0": [42, -48]}, [42, 42])])
    new = update_spec(spec, dc("x1 = Sort x0"), DC)
    assert new == TaskSpec([Example({"x0": [42, -48], "x1": [-48, 42]}, [42, 42])])


def test_update_spec_robustfill():
    spec = TaskSpec([Example({"x0": "ab"}, "ab")])
    assert update_spec(spec, parse_step("ConstStr('a')", RF), RF).outputs == ("b",)
    with pytest.raises(PrefixError):
        update_spec(spec, parse_step("ConstStr('b')", RF), RF)


def test_update_spec_execution_error():
    spec = TaskSpec([Example({"x0": []}, 1)])
    with pytest.raises(ExecutionError):
        update_spec(spec, dc("x1 = Head x0"), DC)


def test_progress_distance():
    assert progress_distance((1, 2, 3), (1, 2, 3)) == 0
    assert progress_distance((1, 9, 3), (1, 2, 3)) == pytest.approx(1 / 3)
    assert progress_distance((), ()) == 0
    assert progress_distance("abc", "abd") == pytest.approx(1 / 3)
    assert progress_distance(3, 3) == 0 and progress_distance(3, 4) == 1
    assert progress_distance(3, (3,)) == 1


# loops on the worked example


def test_regism_with_scripted_backend_reproduces_fig1():
    backend = Scripted(subprograms=[[dc("x1 = Sort x0")], [dc("x2 = Zip (max) x0 x1")]])
    result = run_regism(fig1_task(), backend, max_steps=5)
    assert result.solved and result.steps_used == 2
    assert [t.values for t in result.traces] == [
        ((-48, 42), (-35, -21), (32, 39)),
        ((42, 42), (-35, -21), (39, 39)),
    ]
    assert result.traces[0].spec.column("x1") == ((-48, 42), (-35, -21), (32, 39))


def test_exedec_replays_fig1():
    goals = Scripted(subgoals=[
        [((-48, 42), (-35, -21), (32, 39))],
        [((48, 42), (-35, -21), (39, 39))],
    ])
    synth = Scripted(subprograms=[[dc("x1 = Sort x0")], [dc("x2 = Zip (max) x0 x1")]])
    result = run_exedec(fig1_task(), goals, synth, max_steps=5)
    assert result.solved and result.steps_used == 2
    assert [render_step(t.subprogram) for t in result.traces] == ["x1 = Sort x0", "x2 = Zip (max) x0 x1"]
    second = result.traces[1]
    assert second.subgoal[0] == (48, 42)
    assert second.values[0] == (42, 42)


def test_exedec_with_oracle_synth_on_fig1():
    goals = Scripted(subgoals=[
        [((-48, 42), (-35, -21), (32, 39))],
        [((42, 42), (-35, -21), (39, 39))],
    ])
    result = run_exedec(fig1_task(), goals, OracleBackend(), max_steps=5)
    assert result.solved
    assert render_step(result.traces[0].subprogram) == "x1 = Sort x0"


def test_zero_budget():
    result = run_regism(fig1_task(), OracleBackend(), max_steps=0)
    assert not result.solved and result.traces == () and result.steps_used == 0


def test_length_one_task_solved_in_one_step():
    result = run_regism(fig1_task(), OracleBackend())
    assert result.solved and result.steps_used == 1
    assert render_step(result.program.steps[0]) == "x1 = Scanl1 (max) x0"
    assert run_single_step(fig1_task(), OracleBackend()).solved


def test_wrong_subgoal_count_is_an_error():
    goals = Scripted(subgoals=[[((-48, 42), (-35, -21))]])
    with pytest.raises(BackendError):
        run_exedec(fig1_task(), goals, OracleBackend())


def test_capabilities_are_checked():
    with pytest.raises(BackendError):
        run_exedec(fig1_task(), OracleBackend(), OracleBackend())
    with pytest.raises(BackendError):
        run_regism(fig1_task(), Scripted(subgoals=[[()]]))


def test_inexecutable_candidates_stop_the_run():
    backend = Scripted(subprograms=[[dc("x1 = Sort x0")], [dc("x2 = Map (**2) x0"), dc("x2 = Sort x0")]])
    result = run_regism(fig1_task(), backend, max_steps=5)
    assert not result.solved
    assert result.steps_used == 1
    assert result.note


def test_duplicate_state_is_skipped():
    backend = Scripted(subprograms=[[dc("x1 = Sort x0")], [dc("x2 = Sort x0"), dc("x2 = Zip (max) x0 x1")]])
    result = run_regism(fig1_task(), backend, max_steps=5)
    assert result.solved
    assert render_step(result.program.steps[1]) == "x2 = Zip (max) x0 x1"


def test_beam_truncates_candidates():
    backend = Scripted(subprograms=[[dc("x1 = Head x0"), dc("x1 = Scanl1 (max) x0")]])
    assert not run_regism(fig1_task(), backend, max_steps=1, beam_size=1).solved


def test_default_max_steps():
    assert default_max_steps(1) == 5
    assert default_max_steps(4) == 8


# backends


def test_oracle_top_candidate():
    spec = FIG1.with_outputs([(-48, 42), (-35, -21), (32, 39)])
    assert render_step(OracleBackend().subprogram(spec, DC, 10)[0]) == "x1 = Sort x0"


def test_oracle_drops_observational_duplicates():
    # on this one example Reverse and Sort agree; the earlier one is kept
    spec = TaskSpec([Example({"x0": [42, -48]}, [-48, 42])])
    cands = [render_step(c) for c in OracleBackend().subprogram(spec, DC, 100)]
    assert cands[0] == "x1 = Reverse x0"
    assert "x1 = Sort x0" not in cands


def test_oracle_unreachable_target():
    spec = TaskSpec([Example({"x0": [1, 2]}, [100, -100, 7])])
    cands = OracleBackend().subprogram(spec, DC, 10)
    assert 0 < len(cands) <= 10
    for c in cands:
        assert update_spec(spec, c, DC).column("x1")[0] != (100, -100, 7)


def test_oracle_respects_beam_and_budget():
    spec = TaskSpec([Example({"x0": [3, 1, 2]}, [1, 2, 3])])
    assert len(OracleBackend().subprogram(spec, DC, 3)) == 3
    small = OracleBackend(search_budget=2)
    small.subprogram(spec, DC, 10)
    assert small.exhausted


def test_oracle_rejects_empty_allowed_set():
    with pytest.raises(ProgramError):
        OracleBackend(allowed=set())


def test_oracle_allowed_set():
    spec = TaskSpec([Example({"x0": [42, -48]}, [-48, 42])])
    cands = OracleBackend(allowed={DcOp.REVERSE}).subprogram(spec, DC, 10)
    assert [render_step(c) for c in cands] == ["x1 = Reverse x0"]


def test_teacher_backend_on_fig1():
    teacher = teacher_subgoal_backend(FIG1_GT)
    assert teacher.subgoal(FIG1, DC, 10) == [((42, 42), (-35, -21), (39, 39))]
    after = update_spec(FIG1, dc("x1 = Scanl1 (max) x0"), DC)
    with pytest.raises(BackendError):
        teacher.subgoal(after, DC, 10)


def test_teacher_matches_intermediate_values(domain):
    from exedec_lab.deepcoder import dc_eval_program
    from exedec_lab.robustfill import rf_eval_steps
    task = build_corpus(domain, "train", "train", 1, 13)[0]
    teacher = teacher_subgoal_backend(task.ground_truth)
    spec = task.spec
    for k, step in enumerate(task.ground_truth.steps):
        goal = teacher.subgoal(spec, domain, 10)[0]
        if domain is DC:
            expected = tuple(dc_eval_program(task.ground_truth, ex.env)[k] for ex in task.spec)
        else:
            expected = tuple(rf_eval_steps(task.ground_truth, ex.env["x0"])[k] for ex in task.spec)
        assert goal == expected
        spec = update_spec(spec, step, domain)


# properties over generated tasks


@pytest.mark.parametrize("dom", [DC, RF], ids=["deepcoder", "robustfill"])
def test_teacher_and_oracle_reproduce_ground_truth_length(dom):
    for task in build_corpus(dom, "train", "train", 25, 21):
        result = run_exedec(task, teacher_subgoal_backend(task.ground_truth), OracleBackend())
        assert result.solved
        assert result.steps_used == len(task.ground_truth)
        assert replay(result, task.spec) is not None
        assert spec_satisfied(task.spec, replay(result, task.spec))


def random_task(dom, seed):
    program = random_program(dom, seed)
    try:
        return program, generate_examples(program, random.Random(seed))
    except BudgetExhausted:
        assume(False)


@given(st.integers(0, 10**6))
def test_deepcoder_monotonicity(seed):
    program, spec = random_task(DC, seed)
    result = run_regism(Task("t", spec, program, None, seed), OracleBackend(), max_steps=3)
    n = len(program.inputs)
    for k, trace in enumerate(result.traces):
        assert trace.spec.input_names == spec.input_names + tuple(f"x{n + j}" for j in range(k + 1))
        assert trace.spec.outputs == spec.outputs
    assert result.steps_used <= 3
    if result.solved:
        assert spec_satisfied(spec, replay(result, spec))


@given(st.integers(0, 10**6))
def test_robustfill_concatenation(seed):
    program, spec = random_task(RF, seed)
    result = run_regism(Task("t", spec, program, None, seed), OracleBackend(), max_steps=len(program) + 2)
    if result.solved:
        for i, ex in enumerate(spec):
            assert "".join(t.values[i] for t in result.traces) == ex.output
        assert replay(result, spec) == spec.outputs


def test_paired_run_caps_regism():
    for task in build_corpus(DC, "length_generalization", "test", 4, 3):
        exedec, regism = run_paired(task, teacher_subgoal_backend(task.ground_truth), OracleBackend())
        assert regism.max_steps == exedec.steps_used
        assert regism.steps_used <= exedec.steps_used


def test_replay_of_empty_program():
    result = run_regism(fig1_task(), OracleBackend(), max_steps=0)
    assert replay(result, FIG1) is None
