"""Interpreter and single-step enumerator for the list-manipulation DSL."""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping, Sequence

from . import kernels
from .errors import EmptyListError, ExecutionError, IndexOutOfRange, ProgramError, ValueRangeError
from .syntax import DcOp, DcStep, Domain, Program, var_name
from .values import Kind, Value, kind_of, normalize

MIN_INT = -256
MAX_INT = 256
MAX_LIST_LEN = 12

_PAIR_CODES = {"+": 0, "-": 1, "*": 2, "min": 3, "max": 4}


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // b
    return -q if a < 0 else q


INT_FUNCS = {
    "+1": lambda x: x + 1,
    "-1": lambda x: x - 1,
    "*2": lambda x: x * 2,
    "/2": lambda x: _trunc_div(x, 2),
    "*(-1)": lambda x: -x,
    "**2": lambda x: x * x,
    "*3": lambda x: x * 3,
    "/3": lambda x: _trunc_div(x, 3),
    "*4": lambda x: x * 4,
    "/4": lambda x: _trunc_div(x, 4),
}

BOOL_FUNCS = {
    ">0": lambda x: x > 0,
    "<0": lambda x: x < 0,
    "%2==0": lambda x: x % 2 == 0,
    "%2==1": lambda x: x % 2 == 1,
}


def _check_int(v: int) -> int:
    if not MIN_INT <= v <= MAX_INT:
        raise ValueRangeError(f"integer {v} outside [{MIN_INT}, {MAX_INT}]")
    return v


def _check_list(xs) -> tuple:
    if len(xs) > MAX_LIST_LEN:
        raise ValueRangeError(f"list of length {len(xs)} exceeds {MAX_LIST_LEN}")
    for v in xs:
        if not MIN_INT <= v <= MAX_INT:
            raise ValueRangeError(f"list element {v} outside [{MIN_INT}, {MAX_INT}]")
    return tuple(xs)


def _arg(env: Mapping[str, Value], name: str, kind: Kind):
    try:
        v = env[name]
    except KeyError:
        raise ProgramError(f"unbound variable {name}") from None
    if kind_of(v) is not kind:
        raise ExecutionError(f"{name} holds a {kind_of(v).value}, expected {kind.value}")
    return v


def _clamp(n: int, xs) -> int:
    return max(0, min(n, len(xs)))


def dc_eval_step(step: DcStep, env: Mapping[str, Value]) -> Value:
    """Value of one assignment's right-hand side; ``env`` is left untouched."""
    op = step.op
    args = [_arg(env, a, k) for a, k in zip(step.args, op.arg_kinds)]
    if op is DcOp.HEAD or op is DcOp.LAST or op is DcOp.MINIMUM or op is DcOp.MAXIMUM:
        xs = args[0]
        if not xs:
            raise EmptyListError(f"{op.value} of an empty list")
        if op is DcOp.HEAD:
            return xs[0]
        if op is DcOp.LAST:
            return xs[-1]
        return min(xs) if op is DcOp.MINIMUM else max(xs)
    if op is DcOp.ACCESS:
        n, xs = args
        if not 0 <= n < len(xs):
            raise IndexOutOfRange(f"Access {n} on a list of length {len(xs)}")
        return xs[n]
    if op is DcOp.SUM:
        return _check_int(sum(args[0]))
    if op is DcOp.TAKE:
        n, xs = args
        return xs[:_clamp(n, xs)]
    if op is DcOp.DROP:
        n, xs = args
        return xs[_clamp(n, xs):]
    if op is DcOp.REVERSE:
        return args[0][::-1]
    if op is DcOp.SORT:
        return tuple(sorted(args[0]))
    if op is DcOp.MAP:
        f = INT_FUNCS[step.fn]
        return _check_list([f(x) for x in args[0]])
    if op is DcOp.FILTER:
        f = BOOL_FUNCS[step.fn]
        return tuple(x for x in args[0] if f(x))
    if op is DcOp.COUNT:
        f = BOOL_FUNCS[step.fn]
        return sum(1 for x in args[0] if f(x))
    if op is DcOp.ZIP:
        return _check_list(kernels.zip_with(_PAIR_CODES[step.fn], args[0], args[1]))
    if op is DcOp.SCANL1:
        return _check_list(kernels.scanl1(_PAIR_CODES[step.fn], args[0]))
    raise AssertionError(op)


def dc_eval_program(program: Program, inputs: Mapping[str, Value]) -> list[Value]:
    """Run every assignment in order and return the assigned values.

    The last element is the program output. Step failures re-raise with
    ``exc.step`` set to the failing step index.
    """
    if program.domain is not Domain.DEEPCODER:
        raise ProgramError("not a DeepCoder program")
    if not program.steps:
        raise ProgramError("a program needs at least one step")
    missing = [name for name in program.inputs if name not in inputs]
    if missing:
        raise ProgramError(f"missing inputs: {missing}")
    env = {name: normalize(v) for name, v in inputs.items()}
    for name in program.inputs:
        v = env[name]
        if isinstance(v, tuple):
            _check_list(v)
        elif not isinstance(v, bool) and isinstance(v, int):
            _check_int(v)
    values = []
    for k, step in enumerate(program.steps):
        try:
            v = dc_eval_step(step, env)
        except ExecutionError as exc:
            exc.step = k
            raise
        env[step.target] = v
        values.append(v)
    return values


def _lambda_choices(op: DcOp, allowed) -> list:
    """Lambdas of ``op`` permitted by ``allowed`` (``None`` = everything)."""
    fns = op.lambdas or (None,)
    if allowed is None:
        return list(fns)
    return [fn for fn in fns if op in allowed or (op, fn) in allowed]


def dc_enumerate_steps(
    env_signature: Sequence[tuple[str, Kind]],
    allowed: Iterable | None = None,
    target: str | None = None,
) -> Iterator[DcStep]:
    """Every well-typed single step over ``env_signature``, each exactly once.

    ``allowed`` holds operations (all lambdas) and/or ``(op, lambda)`` pairs;
    ``None`` allows the whole grammar. Order: operation, lambda, then
    arguments lexicographically by environment position.
    """
    if not env_signature:
        raise ProgramError("empty environment")
    if allowed is not None:
        allowed = set(allowed)
    if target is None:
        target = var_name(len(env_signature))
    by_kind = {
        kind: [name for name, k in env_signature if k is kind] for kind in (Kind.INT, Kind.LIST)
    }
    for op in DcOp:
        fns = _lambda_choices(op, allowed)
        if not fns:
            continue
        pools = [by_kind[k] for k in op.arg_kinds]
        if not all(pools):
            continue
        for fn in fns:
            for args in itertools.product(*pools):
                yield DcStep(target, op, fn, args)

