"""Syntax trees for the list (DeepCoder) and string (RobustFill) DSLs.

Only structure lives here; the interpreters are in :mod:`.deepcoder` and
:mod:`.robustfill`, the textual form in :mod:`.text`.
"""

from __future__ import annotations

import enum
import re
import string
from dataclasses import dataclass
from typing import Union

from .errors import ProgramError
from .values import Kind


class Domain(str, enum.Enum):
    DEEPCODER = "deepcoder"
    ROBUSTFILL = "robustfill"


_VAR_RE = re.compile(r"x(0|[1-9][0-9]*)\Z")


def var_name(index: int) -> str:
    return f"x{index}"


def var_index(name: str) -> int:
    m = _VAR_RE.match(name)
    if not m:
        raise ProgramError(f"bad variable name {name!r}")
    return int(m.group(1))


# ---------------------------------------------------------------------------
# DeepCoder


class DcOp(str, enum.Enum):
    HEAD = "Head"
    LAST = "Last"
    ACCESS = "Access"
    MINIMUM = "Minimum"
    MAXIMUM = "Maximum"
    SUM = "Sum"
    TAKE = "Take"
    DROP = "Drop"
    REVERSE = "Reverse"
    SORT = "Sort"
    MAP = "Map"
    FILTER = "Filter"
    COUNT = "Count"
    ZIP = "Zip"
    SCANL1 = "Scanl1"

    @property
    def lambdas(self) -> tuple[str, ...]:
        return _OP_LAMBDAS.get(self, ())

    @property
    def arg_kinds(self) -> tuple[Kind, ...]:
        return _OP_ARGS[self]

    @property
    def result_kind(self) -> Kind:
        return _OP_RESULT[self]

    @property
    def higher_order(self) -> bool:
        return self in HIGHER_ORDER_OPS


INT_LAMBDAS = ("+1", "-1", "*2", "/2", "*(-1)", "**2", "*3", "/3", "*4", "/4")
BOOL_LAMBDAS = (">0", "<0", "%2==0", "%2==1")
PAIR_LAMBDAS = ("+", "-", "*", "min", "max")

FIRST_ORDER_OPS = (
    DcOp.HEAD, DcOp.LAST, DcOp.ACCESS, DcOp.MINIMUM, DcOp.MAXIMUM,
    DcOp.SUM, DcOp.TAKE, DcOp.DROP, DcOp.REVERSE, DcOp.SORT,
)
HIGHER_ORDER_OPS = (DcOp.MAP, DcOp.FILTER, DcOp.COUNT, DcOp.ZIP, DcOp.SCANL1)

_L, _I = Kind.LIST, Kind.INT
_OP_ARGS = {
    DcOp.HEAD: (_L,), DcOp.LAST: (_L,), DcOp.ACCESS: (_I, _L),
    DcOp.MINIMUM: (_L,), DcOp.MAXIMUM: (_L,), DcOp.SUM: (_L,),
    DcOp.TAKE: (_I, _L), DcOp.DROP: (_I, _L), DcOp.REVERSE: (_L,), DcOp.SORT: (_L,),
    DcOp.MAP: (_L,), DcOp.FILTER: (_L,), DcOp.COUNT: (_L,),
    DcOp.ZIP: (_L, _L), DcOp.SCANL1: (_L,),
}
_OP_RESULT = {
    DcOp.HEAD: _I, DcOp.LAST: _I, DcOp.ACCESS: _I, DcOp.MINIMUM: _I, DcOp.MAXIMUM: _I,
    DcOp.SUM: _I, DcOp.TAKE: _L, DcOp.DROP: _L, DcOp.REVERSE: _L, DcOp.SORT: _L,
    DcOp.MAP: _L, DcOp.FILTER: _L, DcOp.COUNT: _I, DcOp.ZIP: _L, DcOp.SCANL1: _L,
}
_OP_LAMBDAS = {
    DcOp.MAP: INT_LAMBDAS,
    DcOp.FILTER: BOOL_LAMBDAS,
    DcOp.COUNT: BOOL_LAMBDAS,
    DcOp.ZIP: PAIR_LAMBDAS,
    DcOp.SCANL1: PAIR_LAMBDAS,
}


@dataclass(frozen=True)
class DcStep:
    """One assignment ``target = op (fn) args...``."""

    target: str
    op: DcOp
    fn: str | None
    args: tuple[str, ...]

    def __post_init__(self):
        op = DcOp(self.op)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "args", tuple(self.args))
        var_index(self.target)
        for a in self.args:
            var_index(a)
        if op.lambdas:
            if self.fn not in op.lambdas:
                raise ProgramError(f"{op.value} needs one of {op.lambdas}, got {self.fn!r}")
        elif self.fn is not None:
            raise ProgramError(f"{op.value} takes no lambda")
        if len(self.args) != len(op.arg_kinds):
            raise ProgramError(
                f"{op.value} takes {len(op.arg_kinds)} argument(s), got {len(self.args)}"
            )

    def retarget(self, target: str) -> DcStep:
        return DcStep(target, self.op, self.fn, self.args)


# ---------------------------------------------------------------------------
# RobustFill


class RegexType(str, enum.Enum):
    NUMBER = "NUMBER"
    WORD = "WORD"
    ALPHANUM = "ALPHANUM"
    ALL_CAPS = "ALL_CAPS"
    PROPER_CASE = "PROPER_CASE"
    LOWER = "LOWER"
    DIGIT = "DIGIT"
    CHAR = "CHAR"


class Case(str, enum.Enum):
    ALL_CAPS = "ALL_CAPS"
    PROPER_CASE = "PROPER_CASE"
    LOWER = "LOWER"


class Boundary(str, enum.Enum):
    START = "START"
    END = "END"


# Delimiters exactly as listed in the grammar; the regex-token set adds space.
DELIMITERS = "&,.?!@()[]%#$\"´"
REGEX_DELIMITERS = DELIMITERS + " "
CHARACTERS = string.ascii_uppercase + string.ascii_lowercase + string.digits + DELIMITERS

REGEXES: tuple = tuple(RegexType) + tuple(REGEX_DELIMITERS)
INDICES = tuple(range(-5, 0)) + tuple(range(1, 6))
POSITIONS = tuple(range(-100, 0)) + tuple(range(1, 101))

Regex = Union[RegexType, str]


def _check_regex(r) -> Regex:
    if isinstance(r, RegexType):
        return r
    if isinstance(r, str) and r in RegexType.__members__:
        return RegexType(r)
    if isinstance(r, str) and len(r) == 1 and r in REGEX_DELIMITERS:
        return r
    raise ProgramError(f"not a regex token: {r!r}")


def _check_index(i) -> int:
    if not isinstance(i, int) or i not in INDICES:
        raise ProgramError(f"index must be in -5..-1 or 1..5, got {i!r}")
    return i


def _check_char(c, allowed=CHARACTERS) -> str:
    if not isinstance(c, str) or len(c) != 1 or c not in allowed:
        raise ProgramError(f"not a DSL character: {c!r}")
    return c


class RfExpr:
    """Marker base for RobustFill expressions."""

    __slots__ = ()


class Substring(RfExpr):
    __slots__ = ()


class Modification(RfExpr):
    __slots__ = ()


@dataclass(frozen=True)
class SubStr(Substring):
    k1: int
    k2: int

    def __post_init__(self):
        for k in (self.k1, self.k2):
            if not isinstance(k, int) or k not in POSITIONS:
                raise ProgramError(f"position must be nonzero in -100..100, got {k!r}")


@dataclass(frozen=True)
class GetSpan(Substring):
    r1: Regex
    i1: int
    b1: Boundary
    r2: Regex
    i2: int
    b2: Boundary

    def __post_init__(self):
        object.__setattr__(self, "r1", _check_regex(self.r1))
        object.__setattr__(self, "r2", _check_regex(self.r2))
        _check_index(self.i1)
        _check_index(self.i2)
        object.__setattr__(self, "b1", Boundary(self.b1))
        object.__setattr__(self, "b2", Boundary(self.b2))


@dataclass(frozen=True)
class _RegexIndex:
    r: Regex
    i: int

    def __post_init__(self):
        object.__setattr__(self, "r", _check_regex(self.r))
        _check_index(self.i)


@dataclass(frozen=True)
class GetUpto(_RegexIndex, Substring):
    pass


@dataclass(frozen=True)
class GetFrom(_RegexIndex, Substring):
    pass


@dataclass(frozen=True)
class GetToken(_RegexIndex, Substring):
    pass


@dataclass(frozen=True)
class ToCase(Modification):
    case: Case

    def __post_init__(self):
        object.__setattr__(self, "case", Case(self.case))


@dataclass(frozen=True)
class Replace(Modification):
    c1: str
    c2: str

    def __post_init__(self):
        _check_char(self.c1, REGEX_DELIMITERS)
        _check_char(self.c2, REGEX_DELIMITERS)


@dataclass(frozen=True)
class Trim(Modification):
    pass


@dataclass(frozen=True)
class GetFirst(_RegexIndex, Modification):
    pass


@dataclass(frozen=True)
class GetAll(Modification):
    r: Regex

    def __post_init__(self):
        object.__setattr__(self, "r", _check_regex(self.r))


@dataclass(frozen=True)
class Substitute(Modification):
    r: Regex
    i: int
    c: str

    def __post_init__(self):
        object.__setattr__(self, "r", _check_regex(self.r))
        _check_index(self.i)
        _check_char(self.c)


@dataclass(frozen=True)
class SubstituteAll(Modification):
    r: Regex
    c: str

    def __post_init__(self):
        object.__setattr__(self, "r", _check_regex(self.r))
        _check_char(self.c)


@dataclass(frozen=True)
class Remove(_RegexIndex, Modification):
    pass


@dataclass(frozen=True)
class RemoveAll(Modification):
    r: Regex

    def __post_init__(self):
        object.__setattr__(self, "r", _check_regex(self.r))


@dataclass(frozen=True)
class Compose(RfExpr):
    """``outer(inner)``: a modification applied to another expression's result."""

    outer: Modification
    inner: RfExpr

    def __post_init__(self):
        if not isinstance(self.outer, Modification):
            raise ProgramError("Compose needs a modification on the outside")
        if not isinstance(self.inner, (Modification, Substring)):
            raise ProgramError("Compose wraps a modification or a substring expression")


@dataclass(frozen=True)
class ConstStr(RfExpr):
    c: str

    def __post_init__(self):
        _check_char(self.c)


SUBSTRING_FAMILIES = (SubStr, GetSpan, GetUpto, GetFrom, GetToken)
MODIFICATION_FAMILIES = (
    ToCase, Replace, Trim, GetFirst, GetAll, Substitute, SubstituteAll, Remove, RemoveAll,
)
RF_FAMILIES = SUBSTRING_FAMILIES + MODIFICATION_FAMILIES + (Compose, ConstStr)

# Concept sets used by the compositional splits.
SUBSTRING_CONCEPT = frozenset(SUBSTRING_FAMILIES)
NON_SUBSTRING_CONCEPT = frozenset(MODIFICATION_FAMILIES + (ConstStr,))

Subprogram = Union[DcStep, RfExpr]


# ---------------------------------------------------------------------------
# Programs


@dataclass(frozen=True)
class Program:
    """A domain-tagged sequence of steps.

    DeepCoder programs read the inputs ``x0 .. x{n-1}`` and assign
    ``x{n}, x{n+1}, ...`` in order. RobustFill programs read a single input
    string and concatenate the results of their steps.
    """

    domain: Domain
    steps: tuple
    inputs: tuple[str, ...] = ("x0",)

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain(self.domain))
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if self.domain is Domain.DEEPCODER:
            _check_dc_scoping(self.inputs, self.steps)
        else:
            if len(self.inputs) != 1:
                raise ProgramError("RobustFill programs take exactly one input")
            for step in self.steps:
                if not isinstance(step, RfExpr):
                    raise ProgramError(f"not a RobustFill expression: {step!r}")

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def output_var(self) -> str | None:
        if self.domain is Domain.DEEPCODER and self.steps:
            return self.steps[-1].target
        return None


def _check_dc_scoping(inputs, steps):
    for k, name in enumerate(inputs):
        if var_index(name) != k:
            raise ProgramError(f"inputs must be named x0..x{len(inputs) - 1}")
    bound = set(inputs)
    for k, step in enumerate(steps):
        if not isinstance(step, DcStep):
            raise ProgramError(f"not a DeepCoder step: {step!r}")
        expected = var_name(len(inputs) + k)
        if step.target != expected:
            raise ProgramError(f"step {k} must assign {expected}, not {step.target}")
        for a in step.args:
            if a not in bound:
                raise ProgramError(f"unbound variable {a} in step {k}")
        bound.add(step.target)


def rf_concept(expr: RfExpr) -> str:
    """``"substring"``, ``"non-substring"`` or ``"compose"``."""
    if isinstance(expr, Compose):
        return "compose"
    if isinstance(expr, Substring):
        return "substring"
    return "non-substring"
