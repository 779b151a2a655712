import functools
import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from exedec_lab.deepcoder import dc_enumerate_steps, dc_eval_program, dc_eval_step
from exedec_lab.errors import EmptyListError, ExecutionError, IndexOutOfRange, ProgramError, ValueRangeError
from exedec_lab.syntax import BOOL_LAMBDAS, INT_LAMBDAS, PAIR_LAMBDAS, DcOp, DcStep, Domain, Program
from exedec_lab.text import parse_program
from exedec_lab.values import Kind, normalize

small_lists = st.lists(st.integers(-16, 16), max_size=12)


def step(text):
    return parse_program(text, Domain.DEEPCODER).steps[-1]


def ev(text, **env):
    return dc_eval_step(step(text), {k: normalize(v) for k, v in env.items()})


# worked traces


def test_task1_trace():
    p = parse_program("x1 = Sort x0\nx2 = Zip (max) x0 x1", Domain.DEEPCODER)
    assert dc_eval_program(p, {"x0": [42, -48]}) == [(-48, 42), (42, 42)]
    assert dc_eval_program(p, {"x0": [-35, -21]})[-1] == (-35, -21)
    assert dc_eval_program(p, {"x0": [39, 32]})[-1] == (39, 39)


def test_task1_ground_truth():
    p = parse_program("x1 = Scanl1 (max) x0", Domain.DEEPCODER)
    assert dc_eval_program(p, {"x0": [42, -48]}) == [(42, 42)]
    assert dc_eval_program(p, {"x0": [39, 32]}) == [(39, 39)]


def test_task2_trace_first_example():
    p = parse_program(
        "x2 = Sort x1\n"
        "x3 = Scanl1 (-) x2\n"
        "x4 = Scanl1 (-) x3\n"
        "x5 = Zip (min) x1 x4\n"
        "x6 = Zip (max) x1 x5\n"
        "x7 = Zip (max) x2 x6",
        Domain.DEEPCODER,
    )
    assert dc_eval_program(p, {"x0": 1, "x1": [-2, -25, 1]}) == [
        (-25, -2, 1),
        (-25, -23, -24),
        (-25, -2, 22),
        (-25, -25, 1),
        (-2, -25, 1),
        (-2, -2, 1),
    ]


def test_empty_program_is_rejected():
    with pytest.raises(ProgramError):
        dc_eval_program(Program(Domain.DEEPCODER, [], ("x0",)), {"x0": [1]})


def test_step_error_is_tagged():
    p = parse_program("x1 = Filter (>0) x0\nx2 = Head x1", Domain.DEEPCODER)
    with pytest.raises(EmptyListError) as info:
        dc_eval_program(p, {"x0": [-1, -2]})
    assert info.value.step == 1


# semantics


@pytest.mark.parametrize("text,env,expected", [
    ("x1 = Reverse x0", {"x0": []}, ()),
    ("x1 = Sum x0", {"x0": []}, 0),
    ("x1 = Count (>0) x0", {"x0": []}, 0),
    ("x1 = Map (*2) x0", {"x0": []}, ()),
    ("x1 = Scanl1 (+) x0", {"x0": []}, ()),
    ("x1 = Head x0", {"x0": [3, 1]}, 3),
    ("x1 = Last x0", {"x0": [3, 1]}, 1),
    ("x1 = Minimum x0", {"x0": [3, -1, 2]}, -1),
    ("x1 = Maximum x0", {"x0": [3, -1, 2]}, 3),
    ("x2 = Access x0 x1", {"x0": 1, "x1": [7, 8, 9]}, 8),
    ("x2 = Take x0 x1", {"x0": 2, "x1": [7, 8, 9]}, (7, 8)),
    ("x2 = Take x0 x1", {"x0": 5, "x1": [7, 8, 9]}, (7, 8, 9)),
    ("x2 = Drop x0 x1", {"x0": 5, "x1": [7, 8, 9]}, ()),
    ("x2 = Drop x0 x1", {"x0": -1, "x1": [7, 8, 9]}, (7, 8, 9)),
    ("x1 = Map (/2) x0", {"x0": [-3, 3, -4]}, (-1, 1, -2)),
    ("x1 = Map (/3) x0", {"x0": [-7, 7]}, (-2, 2)),
    ("x1 = Map (/4) x0", {"x0": [-1, 9]}, (0, 2)),
    ("x1 = Map (**2) x0", {"x0": [-3, 4]}, (9, 16)),
    ("x1 = Map (*(-1)) x0", {"x0": [-3, 4]}, (3, -4)),
    ("x1 = Filter (%2==1) x0", {"x0": [-3, -2, 5]}, (-3, 5)),
    ("x1 = Filter (%2==0) x0", {"x0": [-3, -2, 5]}, (-2,)),
    ("x1 = Count (<0) x0", {"x0": [-3, -2, 5]}, 2),
    ("x1 = Scanl1 (max) x0", {"x0": [42, -48]}, (42, 42)),
    ("x1 = Scanl1 (-) x0", {"x0": [-25, -2, 1]}, (-25, -23, -24)),
    ("x2 = Zip (min) x0 x1", {"x0": [-2, -25, 1], "x1": [-25, -2, 22]}, (-25, -25, 1)),
    ("x1 = Sort x0", {"x0": [42, -48]}, (-48, 42)),
])
def test_step_semantics(text, env, expected):
    assert ev(text, **env) == expected


@pytest.mark.parametrize("text,env,error", [
    ("x1 = Head x0", {"x0": []}, EmptyListError),
    ("x1 = Last x0", {"x0": []}, EmptyListError),
    ("x1 = Minimum x0", {"x0": []}, EmptyListError),
    ("x1 = Maximum x0", {"x0": []}, EmptyListError),
    ("x2 = Access x0 x1", {"x0": 3, "x1": [1, 2, 3]}, IndexOutOfRange),
    ("x2 = Access x0 x1", {"x0": -1, "x1": [1, 2, 3]}, IndexOutOfRange),
    ("x1 = Map (**2) x0", {"x0": [17]}, ValueRangeError),
    ("x1 = Sum x0", {"x0": [200, 100]}, ValueRangeError),
    ("x1 = Sort x0", {"x0": 3}, ExecutionError),
])
def test_step_errors(text, env, error):
    with pytest.raises(error):
        ev(text, **env)


def test_inputs_outside_bounds_are_rejected():
    p = parse_program("x1 = Sort x0", Domain.DEEPCODER)
    with pytest.raises(ValueRangeError):
        dc_eval_program(p, {"x0": list(range(13))})
    with pytest.raises(ValueRangeError):
        dc_eval_program(p, {"x0": [300]})


# laws against independent folds

PAIR = {"+": lambda a, b: a + b, "-": lambda a, b: a - b, "*": lambda a, b: a * b, "min": min, "max": max}


def fold_scanl1(fn, xs):
    return tuple(itertools.accumulate(xs, PAIR[fn]))


@given(st.sampled_from(PAIR_LAMBDAS), small_lists)
def test_scanl1_law(fn, xs):
    expected = fold_scanl1(fn, xs)
    try:
        got = ev(f"x1 = Scanl1 ({fn}) x0", x0=xs)
    except ValueRangeError:
        assert any(abs(v) > 256 for v in expected)
        return
    assert got == expected
    if xs:
        assert got[0] == xs[0]
        for k in range(1, len(xs)):
            assert got[k] == PAIR[fn](got[k - 1], xs[k])


@given(st.sampled_from(PAIR_LAMBDAS), small_lists, small_lists)
def test_zip_law(fn, xs, ys):
    expected = tuple(functools.reduce(lambda acc, p: acc + (PAIR[fn](*p),), zip(xs, ys), ()))
    try:
        got = ev(f"x2 = Zip ({fn}) x0 x1", x0=xs, x1=ys)
    except ValueRangeError:
        assert any(abs(v) > 256 for v in expected)
        return
    assert got == expected
    assert len(got) == min(len(xs), len(ys))


@given(st.sampled_from(list(DcOp)), st.lists(st.integers(-40, 40), max_size=12), st.integers(-2, 6))
def test_evaluation_is_pure(op, xs, n):
    env = {"x0": n, "x1": tuple(xs), "x2": tuple(reversed(xs))}
    fn = op.lambdas[0] if op.lambdas else None
    args = tuple({Kind.INT: "x0", Kind.LIST: "x1"}[k] for k in op.arg_kinds)
    if op is DcOp.ZIP:
        args = ("x1", "x2")
    s = DcStep("x3", op, fn, args)
    snapshot = dict(env)
    try:
        first = dc_eval_step(s, env)
    except ExecutionError as exc:
        with pytest.raises(type(exc)):
            dc_eval_step(s, env)
    else:
        assert dc_eval_step(s, env) == first
    assert env == snapshot


# enumeration


def census(signature, allowed=None):
    """Count well-typed steps directly from the grammar tables."""
    ints = sum(k is Kind.INT for _, k in signature)
    lists = sum(k is Kind.LIST for _, k in signature)
    pool = {Kind.INT: ints, Kind.LIST: lists}
    lambda_counts = {
        DcOp.MAP: len(INT_LAMBDAS), DcOp.FILTER: len(BOOL_LAMBDAS), DcOp.COUNT: len(BOOL_LAMBDAS),
        DcOp.ZIP: len(PAIR_LAMBDAS), DcOp.SCANL1: len(PAIR_LAMBDAS),
    }
    total = 0
    for op in DcOp:
        if allowed is not None and op not in allowed:
            continue
        n = lambda_counts.get(op, 1)
        for k in op.arg_kinds:
            n *= pool[k]
        total += n
    return total


def test_enumerate_single_sort():
    got = list(dc_enumerate_steps([("x0", Kind.LIST)], {DcOp.SORT}))
    assert got == [DcStep("x1", DcOp.SORT, None, ("x0",))]


def test_enumerate_zip_pairs():
    got = list(dc_enumerate_steps([("x0", Kind.LIST), ("x1", Kind.LIST)], {DcOp.ZIP}))
    assert len(got) == 20
    assert [s.args for s in got[:4]] == [("x0", "x0"), ("x0", "x1"), ("x1", "x0"), ("x1", "x1")]
    assert [s.fn for s in got[::4]] == list(PAIR_LAMBDAS)


def test_enumerate_respects_types():
    assert list(dc_enumerate_steps([("x0", Kind.INT)], {DcOp.SORT})) == []


def test_enumerate_lambda_pairs():
    got = list(dc_enumerate_steps([("x0", Kind.LIST)], {(DcOp.SCANL1, "max"), (DcOp.MAP, "+1")}))
    assert [(s.op, s.fn) for s in got] == [(DcOp.MAP, "+1"), (DcOp.SCANL1, "max")]


def test_enumerate_empty_environment():
    with pytest.raises(ProgramError):
        list(dc_enumerate_steps([]))


@given(st.lists(st.sampled_from([Kind.INT, Kind.LIST]), min_size=1, max_size=5),
       st.one_of(st.none(), st.sets(st.sampled_from(list(DcOp)), min_size=1)))
def test_enumerator_matches_census(kinds, allowed):
    signature = [(f"x{k}", kind) for k, kind in enumerate(kinds)]
    got = list(dc_enumerate_steps(signature, allowed))
    assert len(got) == census(signature, allowed)
    assert len(set(got)) == len(got)
    env_kinds = dict(signature)
    rng = random.Random(len(got))
    env = {n: (rng.randint(0, 3) if k is Kind.INT else tuple(rng.randint(-9, 9) for _ in range(4)))
           for n, k in signature}
    for s in got:
        assert s.target == f"x{len(signature)}"
        assert tuple(env_kinds[a] for a in s.args) == s.op.arg_kinds
        try:
            dc_eval_step(s, env)
        except (EmptyListError, IndexOutOfRange, ValueRangeError):
            pass
