"""Task corpora for the compositional-generalization categories.

A category fixes, per domain and split, the allowed program lengths and which
operations may appear at which step. ``sample_program`` builds a program that
meets the category and runs cleanly on a set of probe inputs,
``generate_examples`` draws inputs for a fixed program, and ``build_corpus``
produces a deterministic, de-duplicated list of tasks.

Concepts
--------
DeepCoder: concept A is every first-order operation plus ``Map``; concept B is
every higher-order operation (``Map`` belongs to both).
RobustFill: the substring concept is the substring families; the
non-substring concept is the modification families plus ``ConstStr``.
``Compose`` belongs to neither.
"""

from __future__ import annotations

import enum
import hashlib
import random
import string
from collections.abc import Sequence
from dataclasses import dataclass

from .deepcoder import dc_enumerate_steps, dc_eval_step
from .errors import BudgetExhausted, ExecutionError, SpecError
from .robustfill import rf_eval_expression, spans
from .syntax import (
    CHARACTERS, DELIMITERS, FIRST_ORDER_OPS, HIGHER_ORDER_OPS, INDICES, MODIFICATION_FAMILIES,
    REGEX_DELIMITERS, REGEXES, SUBSTRING_FAMILIES, Boundary, Case, Compose, ConstStr,
    DcOp, DcStep, Domain, GetSpan, Program, Replace, RfExpr, SubStr, Substitute,
    SubstituteAll, Substring, ToCase, Trim, var_name,
)
from .text import render_program
from .values import Example, Kind, TaskSpec, kind_of, value_key


class Category(str, enum.Enum):
    TRAIN_DISTRIBUTION = "train_distribution"
    LENGTH_GENERALIZATION = "length_generalization"
    COMPOSE_DIFFERENT_CONCEPTS = "compose_different_concepts"
    SWITCH_CONCEPT_ORDER = "switch_concept_order"
    COMPOSE_NEW_OPERATION = "compose_new_operation"
    ADD_OPERATION_FUNCTIONALITY = "add_operation_functionality"


class Split(str, enum.Enum):
    TRAIN = "train"
    TEST = "test"


CATEGORY_ALIASES = {
    "train": Category.TRAIN_DISTRIBUTION,
    "train-distribution": Category.TRAIN_DISTRIBUTION,
    "length": Category.LENGTH_GENERALIZATION,
    "compose-different-concepts": Category.COMPOSE_DIFFERENT_CONCEPTS,
    "switch-concept-order": Category.SWITCH_CONCEPT_ORDER,
    "compose-new-operation": Category.COMPOSE_NEW_OPERATION,
    "add-operation-functionality": Category.ADD_OPERATION_FUNCTIONALITY,
}


def parse_category(name: str) -> Category:
    key = name.strip().lower()
    if key in CATEGORY_ALIASES:
        return CATEGORY_ALIASES[key]
    try:
        return Category(key.replace("-", "_"))
    except ValueError:
        raise SpecError(f"unknown category {name!r}") from None


@dataclass(frozen=True)
class GenCategory:
    category: Category
    split: Split

    def __post_init__(self):
        object.__setattr__(self, "category", Category(self.category))
        object.__setattr__(self, "split", Split(self.split))

    def __str__(self) -> str:
        return f"{self.category.value}/{self.split.value}"


@dataclass(frozen=True)
class Task:
    task_id: str
    spec: TaskSpec
    ground_truth: Program
    category: GenCategory
    seed: int

    @property
    def domain(self) -> Domain:
        return self.ground_truth.domain


N_EXAMPLES = 3
DUPLICATE_PATIENCE = 50
PROGRAM_ATTEMPTS = 400
STEP_ATTEMPTS = 60

# ---------------------------------------------------------------------------
# DeepCoder concepts and predicates

DC_PAIRS = tuple((op, fn) for op in DcOp for fn in (op.lambdas or (None,)))
CONCEPT_A = frozenset(FIRST_ORDER_OPS) | {DcOp.MAP}
CONCEPT_B = frozenset(HIGHER_ORDER_OPS)
SCANL1_TRAIN_LAMBDAS = ("-", "min")
SCANL1_TEST_LAMBDAS = ("+", "*", "max")


def _pairs(ops=None, exclude=()) -> tuple:
    return tuple(p for p in DC_PAIRS if (ops is None or p[0] in ops) and p not in exclude)


_ALL = DC_PAIRS
_A = _pairs(CONCEPT_A)
_B = _pairs(CONCEPT_B)
_NO_SCANL1 = _pairs(set(DcOp) - {DcOp.SCANL1})
_SCANL1 = _pairs({DcOp.SCANL1})
_SCANL1_NEW = tuple((DcOp.SCANL1, fn) for fn in SCANL1_TEST_LAMBDAS)
_SCANL1_OLD_ONLY = tuple(p for p in DC_PAIRS if p not in _SCANL1_NEW)
_FIRST_ORDER_ONLY = _pairs(CONCEPT_A - CONCEPT_B)
_HIGHER_ORDER_ONLY = _pairs(CONCEPT_B - CONCEPT_A)


def _dc_in(step: DcStep, concept) -> bool:
    return step.op in concept


def dc_lengths(cat: GenCategory, stratum: bool = False) -> tuple[int, int]:
    c, test = cat.category, cat.split is Split.TEST
    if c is Category.LENGTH_GENERALIZATION and test:
        return (5, 5)
    if c is Category.COMPOSE_DIFFERENT_CONCEPTS and test:
        return (2, 4)
    if c is Category.SWITCH_CONCEPT_ORDER:
        return (2, 4)
    if c is Category.COMPOSE_NEW_OPERATION:
        return (1, 1) if stratum else (2, 4)
    return (1, 4)


def dc_predicate(program: Program, cat: GenCategory, stratum: bool = False) -> bool:
    """True iff ``program`` meets the DeepCoder rules of ``cat``."""
    steps = program.steps
    lo, hi = dc_lengths(cat, stratum)
    if not lo <= len(steps) <= hi:
        return False
    c, test = cat.category, cat.split is Split.TEST
    if c is Category.COMPOSE_DIFFERENT_CONCEPTS:
        in_a = all(_dc_in(s, CONCEPT_A) for s in steps)
        in_b = all(_dc_in(s, CONCEPT_B) for s in steps)
        return not (in_a or in_b) if test else (in_a or in_b)
    if c is Category.SWITCH_CONCEPT_ORDER:
        h = len(steps) // 2
        first, second = (CONCEPT_B, CONCEPT_A) if test else (CONCEPT_A, CONCEPT_B)
        return all(_dc_in(s, first) for s in steps[:h]) and all(_dc_in(s, second) for s in steps[h:])
    if c is Category.COMPOSE_NEW_OPERATION:
        has = any(s.op is DcOp.SCANL1 for s in steps)
        if test:
            return has
        if stratum:
            return all(s.op is DcOp.SCANL1 for s in steps)
        return not has
    if c is Category.ADD_OPERATION_FUNCTIONALITY:
        new = any(s.op is DcOp.SCANL1 and s.fn in SCANL1_TEST_LAMBDAS for s in steps)
        return new if test else not new
    return True


def _dc_position_pools(cat: GenCategory, n: int, rng: random.Random, stratum: bool) -> list[tuple]:
    c, test = cat.category, cat.split is Split.TEST
    if c is Category.COMPOSE_DIFFERENT_CONCEPTS:
        if not test:
            return [rng.choice((_A, _B))] * n
        pools = [_ALL] * n
        p, q = rng.sample(range(n), 2)
        pools[p], pools[q] = _FIRST_ORDER_ONLY, _HIGHER_ORDER_ONLY
        return pools
    if c is Category.SWITCH_CONCEPT_ORDER:
        h = n // 2
        first, second = (_B, _A) if test else (_A, _B)
        return [first] * h + [second] * (n - h)
    if c is Category.COMPOSE_NEW_OPERATION:
        if stratum:
            return [_SCANL1]
        if not test:
            return [_NO_SCANL1] * n
        pools = [_ALL] * n
        pools[rng.randrange(n)] = _SCANL1
        return pools
    if c is Category.ADD_OPERATION_FUNCTIONALITY:
        if not test:
            return [_SCANL1_OLD_ONLY] * n
        pools = [_ALL] * n
        pools[rng.randrange(n)] = _SCANL1_NEW
        return pools
    return [_ALL] * n


# ---------------------------------------------------------------------------
# DeepCoder inputs

DC_SIGNATURES = ((Kind.LIST,), (Kind.LIST, Kind.LIST), (Kind.INT, Kind.LIST))
DC_LIST_LEN = (1, 8)
DC_ELEM_RANGE = (-50, 50)
DC_INT_RANGE = (0, 5)


def dc_random_input(kind: Kind, rng: random.Random):
    if kind is Kind.INT:
        return rng.randint(*DC_INT_RANGE)
    return tuple(rng.randint(*DC_ELEM_RANGE) for _ in range(rng.randint(*DC_LIST_LEN)))


def _dc_random_env(signature, rng) -> dict:
    return {var_name(k): dc_random_input(kind, rng) for k, kind in enumerate(signature)}


def _dc_vector_key(values) -> tuple:
    return tuple(value_key(v) for v in values)


def _dc_build(pools, signature, envs, rng) -> list[DcStep] | None:
    """Chain of steps drawn from ``pools`` that runs on ``envs`` without no-ops."""
    names = [var_name(k) for k in range(len(signature))]
    kinds = dict(zip(names, signature))
    envs = [dict(e) for e in envs]
    seen = {_dc_vector_key([e[n] for e in envs]) for n in names}
    steps = []
    for k, pool in enumerate(pools):
        target = var_name(len(names))
        prev = steps[-1].target if steps else None
        for _ in range(STEP_ATTEMPTS):
            op, fn = rng.choice(pool)
            arg_kinds = op.arg_kinds
            if prev is not None and kinds[prev] not in arg_kinds:
                continue
            args = []
            for kind in arg_kinds:
                choices = [n for n in names if kinds[n] is kind]
                if not choices:
                    break
                args.append(rng.choice(choices))
            else:
                if prev is not None and prev not in args:
                    slots = [j for j, kind in enumerate(arg_kinds) if kind is kinds[prev]]
                    args[rng.choice(slots)] = prev
                step = DcStep(target, op, fn, tuple(args))
                try:
                    values = [dc_eval_step(step, e) for e in envs]
                except ExecutionError:
                    continue
                key = _dc_vector_key(values)
                if key in seen:
                    continue
                seen.add(key)
                for e, v in zip(envs, values):
                    e[target] = v
                names.append(target)
                kinds[target] = kind_of(values[0])
                steps.append(step)
                break
        else:
            return None
    return steps


# ---------------------------------------------------------------------------
# RobustFill concepts and predicates

SUBSTRING_SET = frozenset(SUBSTRING_FAMILIES)
NON_SUBSTRING_SET = frozenset(MODIFICATION_FAMILIES) | {ConstStr}
ALL_RF = SUBSTRING_SET | NON_SUBSTRING_SET | {Compose}
RF_NO_COMPOSE = SUBSTRING_SET | NON_SUBSTRING_SET


def _rf_is(expr, concept) -> bool:
    return type(expr) in concept


def _substring_inside(expr) -> bool:
    return isinstance(expr, Compose) and isinstance(expr.inner, Substring)


def rf_lengths(cat: GenCategory, stratum: bool = False) -> tuple[int, int]:
    c, test = cat.category, cat.split is Split.TEST
    if c is Category.LENGTH_GENERALIZATION and test:
        return (7, 10)
    if c in (Category.COMPOSE_DIFFERENT_CONCEPTS, Category.SWITCH_CONCEPT_ORDER):
        return (2, 6)
    if c is Category.COMPOSE_NEW_OPERATION:
        return (1, 1) if stratum else (2, 6)
    return (1, 6)


def rf_predicate(program: Program, cat: GenCategory, stratum: bool = False) -> bool:
    """True iff ``program`` meets the RobustFill rules of ``cat``."""
    steps = program.steps
    lo, hi = rf_lengths(cat, stratum)
    if not lo <= len(steps) <= hi:
        return False
    c, test = cat.category, cat.split is Split.TEST
    if c is Category.COMPOSE_DIFFERENT_CONCEPTS:
        if any(isinstance(s, Compose) for s in steps):
            return False
        in_s = all(_rf_is(s, SUBSTRING_SET) for s in steps)
        in_n = all(_rf_is(s, NON_SUBSTRING_SET) for s in steps)
        return not (in_s or in_n) if test else (in_s or in_n)
    if c is Category.SWITCH_CONCEPT_ORDER:
        h = len(steps) // 2
        first, second = (NON_SUBSTRING_SET, SUBSTRING_SET) if test else (SUBSTRING_SET, NON_SUBSTRING_SET)
        return all(_rf_is(s, first) for s in steps[:h]) and all(_rf_is(s, second) for s in steps[h:])
    if c is Category.COMPOSE_NEW_OPERATION:
        has = any(isinstance(s, Compose) for s in steps)
        if test:
            return has
        if stratum:
            return all(isinstance(s, Compose) for s in steps)
        return not has
    if c is Category.ADD_OPERATION_FUNCTIONALITY:
        inside = any(_substring_inside(s) for s in steps)
        return inside if test else not inside
    return True


# Position pools for RobustFill: (families, compose inner kind) per step.
_ANY_INNER = "any"
_MOD_INNER = "mod"
_SUB_INNER = "sub"


def _rf_position_pools(cat: GenCategory, n: int, rng: random.Random, stratum: bool) -> list[tuple]:
    c, test = cat.category, cat.split is Split.TEST
    if c is Category.COMPOSE_DIFFERENT_CONCEPTS:
        if not test:
            return [(rng.choice((SUBSTRING_SET, NON_SUBSTRING_SET)), None)] * n
        pools = [(RF_NO_COMPOSE, None)] * n
        p, q = rng.sample(range(n), 2)
        pools[p], pools[q] = (SUBSTRING_SET, None), (NON_SUBSTRING_SET, None)
        return pools
    if c is Category.SWITCH_CONCEPT_ORDER:
        h = n // 2
        first, second = (NON_SUBSTRING_SET, SUBSTRING_SET) if test else (SUBSTRING_SET, NON_SUBSTRING_SET)
        return [(first, None)] * h + [(second, None)] * (n - h)
    if c is Category.COMPOSE_NEW_OPERATION:
        if stratum:
            return [(frozenset({Compose}), _ANY_INNER)]
        if not test:
            return [(RF_NO_COMPOSE, None)] * n
        pools = [(ALL_RF, _ANY_INNER)] * n
        pools[rng.randrange(n)] = (frozenset({Compose}), _ANY_INNER)
        return pools
    if c is Category.ADD_OPERATION_FUNCTIONALITY:
        if not test:
            return [(ALL_RF, _MOD_INNER)] * n
        pools = [(ALL_RF, _ANY_INNER)] * n
        pools[rng.randrange(n)] = (frozenset({Compose}), _SUB_INNER)
        return pools
    return [(ALL_RF, _ANY_INNER)] * n


# ---------------------------------------------------------------------------
# RobustFill inputs and random expressions

RF_MAX_INPUT_LEN = 20
_RF_ORDER = (SUBSTRING_FAMILIES + MODIFICATION_FAMILIES + (Compose, ConstStr))


def rf_random_input(rng: random.Random) -> str:
    """Printable text built from words, numbers and delimiters, 1-20 characters."""
    parts = []
    for j in range(rng.randint(1, 5)):
        if j:
            parts.append(rng.choice((" ", " ", " ", ", ", ".", "-", "/", " (", ") ", ": ")))
        kind = rng.random()
        if kind < 0.55:
            word = "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(2, 7)))
            style = rng.random()
            if style < 0.5:
                word = word.capitalize()
            elif style < 0.65:
                word = word.upper()
            parts.append(word)
        elif kind < 0.85:
            parts.append(str(rng.randint(0, 10 ** rng.randint(1, 4) - 1)))
        else:
            parts.append(rng.choice(DELIMITERS))
    s = "".join(parts)[:RF_MAX_INPUT_LEN].strip(" ") or rng.choice(string.ascii_letters)
    return s


def _live_regexes(strings: Sequence[str]) -> list:
    return [r for r in REGEXES if all(spans(r, s) for s in strings)]


def _random_family_member(cls, rng: random.Random, live: list):
    r_pool = live or list(REGEXES)

    def ri():
        return rng.choice(r_pool), rng.choice(INDICES)

    if cls is SubStr:
        # favour small positions; large ones clamp to the ends anyway
        def pos():
            k = rng.choice((1, 2, 3, 4, 5, 6, 8, 10, 100)) if rng.random() < 0.8 else rng.randint(1, 100)
            return k if rng.random() < 0.5 else -k
        return SubStr(pos(), pos())
    if cls is GetSpan:
        r1, i1 = ri()
        r2, i2 = ri()
        return GetSpan(r1, i1, rng.choice(list(Boundary)), r2, i2, rng.choice(list(Boundary)))
    if cls is ToCase:
        return ToCase(rng.choice(list(Case)))
    if cls is Replace:
        return Replace(rng.choice(REGEX_DELIMITERS), rng.choice(REGEX_DELIMITERS))
    if cls is Trim:
        return Trim()
    if cls is ConstStr:
        return ConstStr(rng.choice(CHARACTERS))
    if cls is Substitute:
        r, i = ri()
        return Substitute(r, i, rng.choice(CHARACTERS))
    if cls is SubstituteAll:
        return SubstituteAll(rng.choice(r_pool), rng.choice(CHARACTERS))
    params = [f for f in cls.__dataclass_fields__]
    if params == ["r", "i"]:
        return cls(*ri())
    return cls(rng.choice(r_pool))


def _random_rf_expr(families, inner_kind, rng, probes, live) -> RfExpr:
    cls = rng.choice([c for c in _RF_ORDER if c in families])
    if cls is not Compose:
        return _random_family_member(cls, rng, live)
    inner_pool = {
        _ANY_INNER: SUBSTRING_FAMILIES + MODIFICATION_FAMILIES,
        _MOD_INNER: MODIFICATION_FAMILIES,
        _SUB_INNER: SUBSTRING_FAMILIES,
    }[inner_kind]
    inner = _random_family_member(rng.choice(inner_pool), rng, live)
    outer = _random_family_member(rng.choice(MODIFICATION_FAMILIES), rng, live)
    return Compose(outer, inner)


def _visible_substitution(expr, outs) -> bool:
    """A Compose whose inner step substitutes ``c`` must show ``c`` (any case)."""
    if not isinstance(expr, Compose) or not isinstance(expr.inner, (Substitute, SubstituteAll)):
        return True
    c = expr.inner.c.lower()
    return any(c in o.lower() for o in outs)


def _rf_build(pools, probes, rng) -> list[RfExpr] | None:
    live = _live_regexes(probes)
    steps = []
    for families, inner_kind in pools:
        for _ in range(STEP_ATTEMPTS):
            expr = _random_rf_expr(families, inner_kind, rng, probes, live)
            try:
                outs = [rf_eval_expression(expr, s) for s in probes]
            except ExecutionError:
                continue
            if not any(outs) or not _visible_substitution(expr, outs):
                continue
            steps.append(expr)
            break
        else:
            return None
    return steps


# ---------------------------------------------------------------------------
# public sampling API


def _as_gencat(category, split=None) -> GenCategory:
    if isinstance(category, GenCategory):
        return category
    if isinstance(category, str) and not isinstance(category, Category):
        category = parse_category(category)
    return GenCategory(category, split or Split.TRAIN)


def _stratum_default(cat: GenCategory, rng: random.Random) -> bool:
    if cat.category is Category.COMPOSE_NEW_OPERATION and cat.split is Split.TRAIN:
        return rng.random() < 0.25
    return False


def _probe_inputs(domain: Domain, rng, n, signature=None):
    if domain is Domain.DEEPCODER:
        return [_dc_random_env(signature, rng) for _ in range(n)]
    return [rf_random_input(rng) for _ in range(n)]


def length_range(domain, cat: GenCategory, stratum: bool = False, lengths=None) -> tuple[int, int]:
    """Allowed program lengths, narrowed to ``lengths`` when given."""
    rule = dc_lengths if Domain(domain) is Domain.DEEPCODER else rf_lengths
    lo, hi = rule(cat, stratum)
    if lengths is not None:
        lo, hi = max(lo, lengths[0]), min(hi, lengths[1])
        if lo > hi:
            raise SpecError(f"no length in {lengths[0]}..{lengths[1]} is allowed for {cat}")
    return lo, hi


def _sample_with_probes(domain, cat, rng, stratum, probes, signature, lengths=None):
    predicate = dc_predicate if domain is Domain.DEEPCODER else rf_predicate
    lo, hi = length_range(domain, cat, stratum, lengths)
    n = rng.randint(lo, hi)
    if domain is Domain.DEEPCODER:
        steps = _dc_build(_dc_position_pools(cat, n, rng, stratum), signature, probes, rng)
        if steps is None:
            return None
        program = Program(domain, steps, tuple(var_name(k) for k in range(len(signature))))
    else:
        steps = _rf_build(_rf_position_pools(cat, n, rng, stratum), probes, rng)
        if steps is None:
            return None
        program = Program(domain, steps)
    return program if predicate(program, cat, stratum) else None


def sample_program(domain, category, rng: random.Random, split=None, stratum: bool | None = None,
                   probes=None) -> Program:
    """Random program meeting ``category`` that runs on probe inputs.

    ``stratum`` selects the single-step stratum of the ComposeNewOperation
    training split (drawn with probability 1/4 when not given).
    """
    domain = Domain(domain)
    cat = _as_gencat(category, split)
    if stratum is None:
        stratum = _stratum_default(cat, rng)
    for _ in range(PROGRAM_ATTEMPTS):
        if domain is Domain.DEEPCODER:
            signature = rng.choice(DC_SIGNATURES) if probes is None else _signature_of(probes[0])
        else:
            signature = None
        pr = probes if probes is not None else _probe_inputs(domain, rng, N_EXAMPLES, signature)
        program = _sample_with_probes(domain, cat, rng, stratum, pr, signature)
        if program is not None:
            return program
    raise BudgetExhausted(f"no {domain.value} program for {cat} within {PROGRAM_ATTEMPTS} attempts")


def _signature_of(env) -> tuple:
    return tuple(kind_of(v) for v in env.values())


def _run_outputs(program: Program, env):
    """Final output and per-step values of ``program`` on one input, or ``None``."""
    try:
        if program.domain is Domain.DEEPCODER:
            env = dict(env)
            values = []
            for step in program.steps:
                v = dc_eval_step(step, env)
                env[step.target] = v
                values.append(v)
            return values[-1], values
        values = [rf_eval_expression(e, env) for e in program.steps]
        return "".join(values), values
    except ExecutionError:
        return None


def is_constant(program: Program) -> bool:
    return program.domain is Domain.ROBUSTFILL and all(isinstance(s, ConstStr) for s in program.steps)


def _spec_ok(program: Program, inputs: list) -> TaskSpec | None:
    """Spec for ``inputs`` if the program runs, has no no-op step and varies."""
    runs = [_run_outputs(program, x) for x in inputs]
    if any(r is None for r in runs):
        return None
    if program.domain is Domain.DEEPCODER:
        seen = {_dc_vector_key([x[n] for x in inputs]) for n in program.inputs}
        for k in range(len(program)):
            key = _dc_vector_key([r[1][k] for r in runs])
            if key in seen:
                return None
            seen.add(key)
    else:
        for k in range(len(program)):
            if not any(r[1][k] for r in runs):
                return None
    outputs = [r[0] for r in runs]
    if not is_constant(program) and len({value_key(o) for o in outputs}) < 2:
        return None
    if program.domain is Domain.DEEPCODER:
        examples = [Example(x, o) for x, o in zip(inputs, outputs)]
    else:
        examples = [Example({"x0": x}, o) for x, o in zip(inputs, outputs)]
    return TaskSpec(examples)


def dc_identifiable(program: Program, spec: TaskSpec) -> bool:
    """True iff every step is the first enumerated step computing its values.

    The enumeration runs over the variables bound before the step, on the
    examples of ``spec``. When it fails, an earlier step in enumeration order
    is indistinguishable from the ground truth on these examples.
    """
    envs = [dict(ex.env) for ex in spec.examples]
    for step in program.steps:
        signature = [(n, kind_of(v)) for n, v in envs[0].items()]
        want = _dc_vector_key([dc_eval_step(step, env) for env in envs])
        for cand in dc_enumerate_steps(signature, target=step.target):
            if cand == step:
                break
            try:
                got = _dc_vector_key([dc_eval_step(cand, env) for env in envs])
            except ExecutionError:
                continue
            if got == want:
                return False
        for env in envs:
            env[step.target] = dc_eval_step(step, env)
    return True


def generate_examples(program: Program, rng: random.Random, n_examples: int = N_EXAMPLES,
                      attempts: int = 200) -> TaskSpec:
    """Draw ``n_examples`` inputs on which ``program`` runs, without no-op steps.

    Inputs that make a step fail are redrawn. At least two outputs differ
    unless the program ignores its input.
    """
    if program.domain is Domain.DEEPCODER:
        signature = [Kind.INT if _reads_as_int(program, n) else Kind.LIST for n in program.inputs]
    for _ in range(attempts):
        inputs = []
        for _ in range(n_examples):
            for _ in range(attempts):
                if program.domain is Domain.DEEPCODER:
                    x = _dc_random_env(signature, rng)
                else:
                    x = rf_random_input(rng)
                if _run_outputs(program, x) is not None:
                    inputs.append(x)
                    break
            else:
                raise BudgetExhausted("no executable input found")
        spec = _spec_ok(program, inputs)
        if spec is not None:
            return spec
    raise BudgetExhausted("could not draw a non-degenerate example set")


def _reads_as_int(program: Program, name: str) -> bool:
    for step in program.steps:
        for a, kind in zip(step.args, step.op.arg_kinds):
            if a == name:
                return kind is Kind.INT
    return False


def predicate(program: Program, cat: GenCategory, stratum: bool = False) -> bool:
    if program.domain is Domain.DEEPCODER:
        return dc_predicate(program, cat, stratum)
    return rf_predicate(program, cat, stratum)


def satisfies_category(program: Program, cat: GenCategory) -> bool:
    """Category check without knowing the stratum (either one may match)."""
    if cat.category is Category.COMPOSE_NEW_OPERATION and cat.split is Split.TRAIN:
        return predicate(program, cat, True) or predicate(program, cat, False)
    return predicate(program, cat)


# ---------------------------------------------------------------------------
# corpora


def derive_seed(*parts) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def task_id(seed: int, cat: GenCategory, program_text: str) -> str:
    raw = f"{seed}|{cat.category.value}|{cat.split.value}|{program_text}"
    return hashlib.sha1(raw.encode()).hexdigest()[:16]


def make_task(domain, cat: GenCategory, task_seed: int, stratum: bool,
              n_examples: int = N_EXAMPLES, lengths=None) -> Task:
    """One task from its own RNG stream."""
    domain = Domain(domain)
    rng = random.Random(task_seed)
    for _ in range(PROGRAM_ATTEMPTS):
        signature = rng.choice(DC_SIGNATURES) if domain is Domain.DEEPCODER else None
        inputs = _probe_inputs(domain, rng, n_examples, signature)
        program = _sample_with_probes(domain, cat, rng, stratum, inputs, signature, lengths)
        if program is None:
            continue
        spec = _spec_ok(program, inputs)
        if spec is None:
            continue
        if domain is Domain.DEEPCODER and not dc_identifiable(program, spec):
            continue
        text = render_program(program)
        return Task(task_id(task_seed, cat, text), spec, program, cat, task_seed)
    raise BudgetExhausted(f"no {domain.value} task for {cat} within {PROGRAM_ATTEMPTS} attempts")


def build_corpus(domain, category, split, count: int, seed: int,
                 n_examples: int = N_EXAMPLES, lengths: tuple[int, int] | None = None) -> list[Task]:
    """``count`` tasks, deterministic in ``seed``, de-duplicated by program text.

    Task ``i`` is drawn from an RNG seeded by ``(seed, domain, category,
    split, i, attempt)``; ``attempt`` moves on when the program repeats an
    earlier one. After ``DUPLICATE_PATIENCE`` repeats in a row the duplicate
    is kept, since some strata hold only a handful of distinct programs.
    In the ComposeNewOperation training split the first ``count // 4``
    tasks form the single-step stratum. ``lengths`` narrows the category's
    length range to ``(lo, hi)``; a range that misses a stratum is an error.
    """
    if count < 1:
        raise SpecError("count must be at least 1")
    domain = Domain(domain)
    cat = _as_gencat(category, split)
    n_stratum = count // 4 if (cat.category is Category.COMPOSE_NEW_OPERATION and cat.split is Split.TRAIN) else 0
    for stratum in {index < n_stratum for index in range(min(count, n_stratum + 1))}:
        length_range(domain, cat, stratum, lengths)
    seen: set[str] = set()
    tasks = []
    for index in range(count):
        stratum = index < n_stratum
        for attempt in range(DUPLICATE_PATIENCE + 1):
            task_seed = derive_seed(seed, domain.value, cat.category.value, cat.split.value, index, attempt)
            task = make_task(domain, cat, task_seed, stratum, n_examples, lengths)
            text = render_program(task.ground_truth)
            if text not in seen:
                break
        seen.add(text)
        tasks.append(task)
    return tasks
