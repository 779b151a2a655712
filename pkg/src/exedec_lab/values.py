"""Runtime values, I/O examples and task specifications.

Values are plain immutable Python objects:

* ``int``   -- integer
* ``bool``  -- boolean
* ``tuple`` -- list of integers
* ``str``   -- character string

Because ``True == 1`` in Python, equality between values must go through
:func:`values_equal`, which refuses to compare across variants.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Union

from .errors import SpecError

Value = Union[int, bool, tuple, str]


class Kind(enum.Enum):
    INT = "int"
    BOOL = "bool"
    LIST = "list"
    STR = "str"


def kind_of(value: Value) -> Kind:
    if isinstance(value, bool):
        return Kind.BOOL
    if isinstance(value, int):
        return Kind.INT
    if isinstance(value, tuple):
        return Kind.LIST
    if isinstance(value, str):
        return Kind.STR
    raise SpecError(f"not a DSL value: {value!r}")


def normalize(value) -> Value:
    """Coerce list payloads to tuples and validate the variant."""
    if isinstance(value, list):
        value = tuple(value)
    if isinstance(value, tuple):
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
            raise SpecError(f"integer lists may only hold integers: {value!r}")
        return value
    kind_of(value)
    return value


def values_equal(a: Value, b: Value) -> bool:
    return kind_of(a) is kind_of(b) and a == b


def value_key(value: Value):
    """Hashable key that keeps variants apart (``True`` and ``1`` differ)."""
    return (kind_of(value).value, value)


def format_value(value: Value) -> str:
    if isinstance(value, tuple):
        return "[" + ", ".join(str(x) for x in value) + "]"
    if isinstance(value, str):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class Example:
    """One input/output pair. ``inputs`` keeps insertion order."""

    inputs: tuple[tuple[str, Value], ...]
    output: Value

    def __init__(self, inputs: Mapping[str, Value] | Iterable[tuple[str, Value]], output: Value):
        items = inputs.items() if isinstance(inputs, Mapping) else inputs
        pairs = tuple((str(name), normalize(v)) for name, v in items)
        names = [name for name, _ in pairs]
        if len(set(names)) != len(names):
            raise SpecError(f"duplicate input names: {names}")
        object.__setattr__(self, "inputs", pairs)
        object.__setattr__(self, "output", normalize(output))

    @property
    def env(self) -> dict[str, Value]:
        return dict(self.inputs)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.inputs)

    def with_input(self, name: str, value: Value) -> Example:
        return Example(self.inputs + ((name, value),), self.output)

    def with_output(self, output: Value) -> Example:
        return Example(self.inputs, output)


@dataclass(frozen=True)
class TaskSpec:
    examples: tuple[Example, ...]

    def __init__(self, examples: Iterable[Example]):
        examples = tuple(examples)
        if not examples:
            raise SpecError("a task specification needs at least one example")
        names = examples[0].names
        kinds = [kind_of(v) for _, v in examples[0].inputs]
        for ex in examples[1:]:
            if ex.names != names:
                raise SpecError(f"inconsistent input names: {ex.names} vs {names}")
            if [kind_of(v) for _, v in ex.inputs] != kinds:
                raise SpecError("inconsistent input variants across examples")
        object.__setattr__(self, "examples", examples)

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    @property
    def input_names(self) -> tuple[str, ...]:
        return self.examples[0].names

    @property
    def outputs(self) -> tuple[Value, ...]:
        return tuple(ex.output for ex in self.examples)

    def signature(self) -> list[tuple[str, Kind]]:
        return [(name, kind_of(v)) for name, v in self.examples[0].inputs]

    def column(self, name: str) -> tuple[Value, ...]:
        return tuple(ex.env[name] for ex in self.examples)

    def with_outputs(self, outputs: Sequence[Value]) -> TaskSpec:
        if len(outputs) != len(self.examples):
            raise SpecError(f"expected {len(self.examples)} outputs, got {len(outputs)}")
        return TaskSpec(ex.with_output(o) for ex, o in zip(self.examples, outputs))


def spec_satisfied(spec: TaskSpec, values: Sequence[Value]) -> bool:
    """True iff ``values[i]`` equals the i-th example output for every i."""
    if len(values) != len(spec.examples):
        raise SpecError(f"{len(values)} values for {len(spec.examples)} examples")
    return all(values_equal(normalize(v), ex.output) for v, ex in zip(values, spec.examples))
