import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_program
from exedec_lab.errors import ExecutionError, MatchError, ProgramError
from exedec_lab.robustfill import (
    RfSearch, family_members, order_key, prefix_distance, rf_enumerate_expressions, rf_eval_expression,
    rf_eval_program, rf_eval_steps,
)
from exedec_lab.syntax import (
    CHARACTERS, DELIMITERS, MODIFICATION_FAMILIES, SUBSTRING_CONCEPT, SUBSTRING_FAMILIES, Compose,
    ConstStr, Domain, GetSpan, Program, Substitute, SubstituteAll, Trim,
)
from exedec_lab.taskgen import rf_random_input
from exedec_lab.text import parse_program, parse_step, render_rf_expr

texts = st.text(alphabet="abcXYZ019 .,-()$", min_size=1, max_size=20)


def ev(expr, s):
    return rf_eval_expression(parse_step(expr, Domain.ROBUSTFILL), s)


@pytest.mark.parametrize("expr,s,expected", [
    ("ConstStr('a')", "anything", "a"),
    ("ToCase(ALL_CAPS)", "abc", "ABC"),
    ("GetToken(WORD, 1)", "hello world", "hello"),
    ("GetToken(WORD, -1)", "hello world", "world"),
    ("Replace('.', ' ')(GetFrom(DIGIT, 1))", "a1.b.c", " b c"),
    ("SubStr(1, 3)", "abcdef", "abc"),
    ("SubStr(-3, -1)", "abcdef", "def"),
    ("SubStr(2, 100)", "abcdef", "bcdef"),
    ("SubStr(-100, 2)", "abcdef", "ab"),
    ("GetUpto(NUMBER, 1)", "ab12cd34", "ab12"),
    ("GetFrom(NUMBER, 1)", "ab12cd34", "cd34"),
    ("GetFrom(NUMBER, -1)", "ab12cd34", ""),
    ("GetSpan(WORD, 1, START, NUMBER, 1, END)", "ab12cd34", "ab12"),
    ("ToCase(PROPER_CASE)", "hello WORLD", "Hello World"),
    ("Replace(' ', '.')", "a b c", "a.b.c"),
    ("Replace('#', '.')", "a b", "a b"),
    ("Trim()", "  a b  ", "a b"),
    ("GetFirst(WORD, 2)", "ab cd ef", "abcd"),
    ("GetFirst(WORD, -1)", "ab cd ef", "abcd"),
    ("GetAll(NUMBER)", "a1b22c", "1 22"),
    ("GetAll(WORD)", "Hi, there", "Hi there"),
    ("Substitute(NUMBER, 2, 'X')", "a1b22c", "a1bXc"),
    ("SubstituteAll(DIGIT, '#')", "a1b22", "a#b##"),
    ("Remove(WORD, 1)", "ab 12", " 12"),
    ("RemoveAll(' ')", "a b c", "abc"),
    ("GetToken(PROPER_CASE, 2)", "McDonald ABC Abc", "Donald"),
    ("GetToken(ALL_CAPS, 2)", "McDonald ABC", "D"),
    ("GetToken(ALL_CAPS, -1)", "McDonald ABC", "ABC"),
    ("GetToken(ALPHANUM, 2)", "ab1-c2 d", "c2"),
    ("GetToken(LOWER, 1)", "ABcd", "cd"),
    ("GetToken(CHAR, 2)", "a-b", "b"),
    ("GetToken('(', 1)", "f(x)", "("),
    ("ToCase(LOWER)(GetToken(WORD, -2))", "One Two Three", "two"),
])
def test_expression_semantics(expr, s, expected):
    assert ev(expr, s) == expected


@pytest.mark.parametrize("expr,s", [
    ("SubStr(4, 2)", "abcdef"),
    ("SubStr(1, 1)", ""),
    ("GetSpan(NUMBER, 2, START, WORD, 1, END)", "ab12cd34"),
    ("GetFirst(WORD, 4)", "ab cd ef"),
    ("GetToken(NUMBER, 1)", "abc"),
    ("SubstituteAll(DIGIT, '#')", "abc"),
    ("RemoveAll(DIGIT)", "abc"),
    ("Remove(WORD, -3)", "a b"),
])
def test_match_errors(expr, s):
    with pytest.raises(MatchError):
        ev(expr, s)


def test_program_concatenates():
    p = parse_program("Concat(ConstStr('a'), ConstStr('b'))", Domain.ROBUSTFILL)
    assert rf_eval_program(p, "") == "ab"


def test_program_error_is_tagged():
    p = parse_program("Concat(ConstStr('a'), GetToken(NUMBER, 1))", Domain.ROBUSTFILL)
    with pytest.raises(MatchError) as info:
        rf_eval_program(p, "abc")
    assert info.value.step == 1


def test_empty_program_is_rejected():
    with pytest.raises(ProgramError):
        rf_eval_program(Program(Domain.ROBUSTFILL, []), "x")


@given(st.integers(0, 10**9), texts)
def test_concatenation_law(seed, s):
    p = random_program(Domain.ROBUSTFILL, seed)
    try:
        whole = rf_eval_program(p, s)
    except ExecutionError as exc:
        with pytest.raises(type(exc)):
            [rf_eval_expression(e, s) for e in p.steps]
        return
    assert whole == "".join(rf_eval_expression(e, s) for e in p.steps)
    assert whole == "".join(rf_eval_steps(p, s))
    assert rf_eval_program(Program(Domain.ROBUSTFILL, p.steps[:1]), s) == rf_eval_expression(p.steps[0], s)


@given(st.integers(0, 10**9), texts)
def test_substring_outputs_are_contiguous(seed, s):
    p = random_program(Domain.ROBUSTFILL, seed)
    for e in p.steps:
        if type(e) not in SUBSTRING_CONCEPT:
            continue
        try:
            out = rf_eval_expression(e, s)
        except MatchError:
            continue
        assert out in s


@given(st.integers(0, 10**9), texts)
def test_compose_is_sequential_application(seed, s):
    p = random_program(Domain.ROBUSTFILL, seed)
    for e in p.steps:
        if not isinstance(e, Compose):
            continue
        try:
            inner = rf_eval_expression(e.inner, s)
            expected = rf_eval_expression(e.outer, inner)
        except MatchError:
            with pytest.raises(MatchError):
                rf_eval_expression(e, s)
            continue
        assert rf_eval_expression(e, s) == expected


# enumeration


def test_conststr_census():
    alnum = 26 + 26 + 10
    assert len(DELIMITERS) == 15
    assert len(CHARACTERS) == alnum + len(DELIMITERS) == 77
    got = list(rf_enumerate_expressions({ConstStr}))
    assert len(got) == 77
    assert len({render_rf_expr(e) for e in got}) == 77


def test_trim_census():
    assert list(rf_enumerate_expressions({Trim})) == [Trim()]


def test_empty_allowed_set():
    with pytest.raises(ProgramError):
        list(rf_enumerate_expressions(set()))


def test_max_candidates_and_order():
    got = list(rf_enumerate_expressions(SUBSTRING_CONCEPT, max_candidates=500))
    assert len(got) == 500
    keys = [order_key(e) for e in got]
    assert keys == sorted(keys)


def test_family_members_are_distinct():
    for cls in SUBSTRING_FAMILIES + MODIFICATION_FAMILIES:
        if cls is GetSpan:
            continue
        members = list(family_members(cls))
        assert len(set(members)) == len(members)


def test_substring_concept_excludes_compose():
    fams = {type(e) for e in rf_enumerate_expressions(SUBSTRING_CONCEPT, max_candidates=300_000)}
    assert fams <= set(SUBSTRING_CONCEPT)


# target-directed search versus brute force


def _outputs(expr, xs):
    try:
        return tuple(rf_eval_expression(expr, x) for x in xs)
    except MatchError:
        return None


def _is_prefix(outs, ts):
    return any(outs) and all(t.startswith(o) for o, t in zip(outs, ts))


def brute_force(xs, ts, with_getspan):
    """Minimal enumeration key per prefix-consistent output vector.

    Compose outers that insert a character only need characters present in
    the targets; an inner Substitute is tried with the target characters in
    either case, which is the search's documented restriction.
    """
    best = {}

    def offer(expr, outs, key):
        if outs is not None and _is_prefix(outs, ts):
            if outs not in best or key < best[outs]:
                best[outs] = key

    target_chars = {c for t in ts for c in t} & set(CHARACTERS)
    hint = {v for c in target_chars for v in (c, c.lower(), c.upper())} & set(CHARACTERS)
    inner_vectors = {}
    for cls in SUBSTRING_FAMILIES + MODIFICATION_FAMILIES:
        if cls is GetSpan and not with_getspan:
            continue
        for e in family_members(cls):
            outs = _outputs(e, xs)
            key = order_key(e)
            offer(e, outs, key)
            if cls in (Substitute, SubstituteAll) and e.c not in hint:
                continue
            if outs is not None and (outs not in inner_vectors or key < inner_vectors[outs][0]):
                inner_vectors[outs] = (key, e)
    for c in target_chars:
        offer(ConstStr(c), _outputs(ConstStr(c), xs), order_key(ConstStr(c)))
    for ocls in MODIFICATION_FAMILIES:
        chars = target_chars if ocls in (Substitute, SubstituteAll) else CHARACTERS
        for outer in family_members(ocls, chars):
            for vec, (ikey, inner) in inner_vectors.items():
                try:
                    outs = tuple(rf_eval_expression(outer, v) for v in vec)
                except MatchError:
                    continue
                offer(None, outs, order_key(Compose(outer, inner)))
    return best


SEARCH_CASES = [
    (("ab 12", "Cd 7", "x.y 3"), "Concat(GetToken(WORD, 1), ConstStr('#'), GetToken(NUMBER, 1))"),
    (("Ann Lee", "Bo Kim", "Cy Ng"), "Concat(ToCase(ALL_CAPS)(GetToken(WORD, -1)), ConstStr(','), SubStr(1, 1))"),
    (("a1.b2", "c3.d", "e.f45"), "Concat(RemoveAll(DIGIT), GetAll(NUMBER))"),
    (("x (y)", "(z) w", "p q"), "Concat(Replace(' ', '.')(GetUpto(WORD, 2)), Trim())"),
]


@pytest.mark.slow
@pytest.mark.parametrize("xs,program", SEARCH_CASES)
def test_search_matches_brute_force(xs, program):
    p = parse_program(program, Domain.ROBUSTFILL)
    ts = tuple(rf_eval_program(p, x) for x in xs)
    expected = brute_force(xs, ts, with_getspan=False)
    found = RfSearch(xs).run(ts)
    got = {outs: order_key(e) for e, outs in found}
    # soundness: every result evaluates to its vector, which prefixes the targets
    for e, outs in found:
        assert _outputs(e, xs) == outs
        assert _is_prefix(outs, ts)
    # completeness on the brute-forced fragment, with canonical representatives
    for outs, key in expected.items():
        assert outs in got, outs
        assert got[outs] <= key
    first = tuple(rf_eval_expression(p.steps[0], x) for x in xs)
    assert first in got


@given(st.lists(st.builds(lambda seed: rf_random_input(__import__("random").Random(seed)),
                          st.integers(0, 10**6)), min_size=3, max_size=3),
       st.integers(0, 10**9))
def test_search_results_are_sound(xs, seed):
    p = random_program(Domain.ROBUSTFILL, seed)
    try:
        ts = tuple(rf_eval_program(p, x) for x in xs)
    except MatchError:
        return
    found = RfSearch(xs).run(ts, beam=10)
    for e, outs in found:
        assert _outputs(e, xs) == outs
        assert _is_prefix(outs, ts)
    vectors = [outs for _, outs in found]
    assert len(set(vectors)) == len(vectors)


@pytest.mark.parametrize("xs,program", SEARCH_CASES)
def test_beam_pruning_keeps_the_closest(xs, program):
    p = parse_program(program, Domain.ROBUSTFILL)
    ts = tuple(rf_eval_program(p, x) for x in xs)

    def top(results, k):
        ranked = sorted(
            results,
            key=lambda r: (sum(prefix_distance(o, t) for o, t in zip(r[1], ts)), order_key(r[0])),
        )
        return ranked[:k]

    full = RfSearch(xs).run(ts)
    for beam in (1, 3, 10):
        assert top(RfSearch(xs).run(ts, beam=beam), beam) == top(full, beam)


def test_prefix_distance():
    assert prefix_distance("ab", "abcd") == 0.5
    assert prefix_distance("abcd", "abcd") == 0.0
    assert prefix_distance("", "") == 0.0


def test_search_budget_marks_exhaustion():
    search = RfSearch(("ab 12", "cd 34", "ef 56"), budget=1)
    search.run(("AB", "CD", "EF"))
    assert search.exhausted


@pytest.mark.slow
def test_search_covers_every_getspan_class():
    xs, program = SEARCH_CASES[1]
    ts = tuple(rf_eval_program(parse_program(program, Domain.ROBUSTFILL), x) for x in xs)
    got = {outs: order_key(e) for e, outs in RfSearch(xs).run(ts)}
    seen = 0
    for e in family_members(GetSpan):
        outs = _outputs(e, xs)
        if outs is not None and _is_prefix(outs, ts):
            seen += 1
            assert got[outs] <= order_key(e)
    assert seen
