"""Interpreter, enumerator and target-directed search for the string DSL.

Token semantics
---------------
Regex tokens match maximal runs, scanned left to right without overlap:

==============  ==========================================
NUMBER          ``[0-9]+``
WORD            ``[A-Za-z]+``
ALPHANUM        ``[A-Za-z0-9]+``
ALL_CAPS        ``[A-Z]+``
PROPER_CASE     ``[A-Z][a-z]+``
LOWER           ``[a-z]+``
DIGIT           ``[0-9]``
CHAR            one letter, digit, delimiter or space
delimiter ``d`` the literal character ``d``
==============  ==========================================

Occurrence index ``i`` counts from 1 at the left and from -1 at the right;
a missing occurrence raises :class:`MatchError`.

* ``SubStr(k1, k2)``: positive positions are 1-based from the left, negative
  ones 1-based from the right (-1 is the last character). Both are clamped
  into the string; the inclusive span is returned, ``k1`` past ``k2`` is an
  error.
* ``GetSpan(r1, i1, b1, r2, i2, b2)``: text between boundary ``b1`` of the
  ``i1``-th ``r1`` match and boundary ``b2`` of the ``i2``-th ``r2`` match.
* ``GetUpto(r, i)`` / ``GetFrom(r, i)``: text up to / after the end of the
  ``i``-th match. ``GetToken(r, i)``: the match itself.
* ``GetFirst(r, i)``: the first ``i`` matches concatenated (negative ``i``:
  all but the last ``-i``). ``GetAll(r)``: all matches joined by a space.
* ``Substitute``/``Remove`` act on one match, ``SubstituteAll``/``RemoveAll``
  on every match and need at least one. ``Replace(c1, c2)`` swaps every
  ``c1`` for ``c2`` and is total. ``Trim()`` strips surrounding spaces.
* ``ToCase(PROPER_CASE)`` is :meth:`str.title`.

``Replace`` and ``SubstituteAll`` coincide when the regex is a single
delimiter; both are kept, as the grammar lists both.
"""

from __future__ import annotations

import functools
import heapq
import re
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import fields

from . import kernels
from .errors import ExecutionError, MatchError, ProgramError
from .syntax import (
    CHARACTERS, INDICES, MODIFICATION_FAMILIES, POSITIONS, REGEX_DELIMITERS, REGEXES,
    RF_FAMILIES, SUBSTRING_FAMILIES, Boundary, Case, Compose, ConstStr, Domain, GetAll,
    GetFirst, GetFrom, GetSpan, GetToken, GetUpto, Modification, Program, RegexType, Remove,
    RemoveAll, Replace, RfExpr, SubStr, Substitute, SubstituteAll, ToCase, Trim,
)

_CHAR_CLASS = "A-Za-z0-9" + re.escape(REGEX_DELIMITERS)

_PATTERNS = {
    RegexType.NUMBER: re.compile(r"[0-9]+"),
    RegexType.WORD: re.compile(r"[A-Za-z]+"),
    RegexType.ALPHANUM: re.compile(r"[A-Za-z0-9]+"),
    RegexType.ALL_CAPS: re.compile(r"[A-Z]+"),
    RegexType.PROPER_CASE: re.compile(r"[A-Z][a-z]+"),
    RegexType.LOWER: re.compile(r"[a-z]+"),
    RegexType.DIGIT: re.compile(r"[0-9]"),
    RegexType.CHAR: re.compile(f"[{_CHAR_CLASS}]"),
}
for _d in REGEX_DELIMITERS:
    _PATTERNS[_d] = re.compile(re.escape(_d))


@functools.lru_cache(maxsize=1 << 17)
def spans(r, s: str) -> tuple[tuple[int, int], ...]:
    return tuple(m.span() for m in _PATTERNS[r].finditer(s))


@functools.lru_cache(maxsize=1 << 14)
def all_spans(s: str) -> tuple:
    """Match spans of every regex token on ``s``, in ``REGEXES`` order."""
    return tuple(spans(r, s) for r in REGEXES)


def _pick(found, i: int, what) -> tuple[int, int]:
    n = len(found)
    if i > 0:
        if i > n:
            raise MatchError(f"no occurrence {i} of {what}")
        return found[i - 1]
    if -i > n:
        raise MatchError(f"no occurrence {i} of {what}")
    return found[i]


def _normalize_position(k: int, n: int) -> int:
    p = k - 1 if k > 0 else n + k
    return min(max(p, 0), n - 1)


def _substr(e: SubStr, s: str) -> str:
    if not s:
        raise MatchError("SubStr of an empty string")
    a = _normalize_position(e.k1, len(s))
    b = _normalize_position(e.k2, len(s))
    if a > b:
        raise MatchError(f"SubStr start {e.k1} lies after end {e.k2}")
    return s[a:b + 1]


def _boundary(r, i, b, s) -> int:
    span = _pick(spans(r, s), i, r)
    return span[0] if b is Boundary.START else span[1]


def _getspan(e: GetSpan, s: str) -> str:
    p1 = _boundary(e.r1, e.i1, e.b1, s)
    p2 = _boundary(e.r2, e.i2, e.b2, s)
    if p1 > p2:
        raise MatchError("GetSpan boundaries out of order")
    return s[p1:p2]


def _getupto(e: GetUpto, s: str) -> str:
    return s[:_pick(spans(e.r, s), e.i, e.r)[1]]


def _getfrom(e: GetFrom, s: str) -> str:
    return s[_pick(spans(e.r, s), e.i, e.r)[1]:]


def _gettoken(e: GetToken, s: str) -> str:
    a, b = _pick(spans(e.r, s), e.i, e.r)
    return s[a:b]


def _tocase(e: ToCase, s: str) -> str:
    if e.case is Case.ALL_CAPS:
        return s.upper()
    if e.case is Case.LOWER:
        return s.lower()
    return s.title()


def _replace(e: Replace, s: str) -> str:
    return s.replace(e.c1, e.c2)


def _trim(e: Trim, s: str) -> str:
    return s.strip(" ")


def _getfirst(e: GetFirst, s: str) -> str:
    found = spans(e.r, s)
    if (e.i > 0 and len(found) < e.i) or (e.i < 0 and len(found) <= -e.i):
        raise MatchError(f"fewer matches of {e.r} than GetFirst needs")
    return "".join(s[a:b] for a, b in found[:e.i])


def _getall(e: GetAll, s: str) -> str:
    found = spans(e.r, s)
    if not found:
        raise MatchError(f"no match of {e.r}")
    return " ".join(s[a:b] for a, b in found)


def _substitute(e: Substitute, s: str) -> str:
    a, b = _pick(spans(e.r, s), e.i, e.r)
    return s[:a] + e.c + s[b:]


def _substitute_all(e: SubstituteAll, s: str) -> str:
    if not spans(e.r, s):
        raise MatchError(f"no match of {e.r}")
    return _PATTERNS[e.r].sub(lambda m: e.c, s)


def _remove(e: Remove, s: str) -> str:
    a, b = _pick(spans(e.r, s), e.i, e.r)
    return s[:a] + s[b:]


def _remove_all(e: RemoveAll, s: str) -> str:
    if not spans(e.r, s):
        raise MatchError(f"no match of {e.r}")
    return _PATTERNS[e.r].sub("", s)


def _compose(e: Compose, s: str) -> str:
    return rf_eval_expression(e.outer, rf_eval_expression(e.inner, s))


def _const(e: ConstStr, s: str) -> str:
    return e.c


_EVAL = {
    SubStr: _substr, GetSpan: _getspan, GetUpto: _getupto, GetFrom: _getfrom,
    GetToken: _gettoken, ToCase: _tocase, Replace: _replace, Trim: _trim,
    GetFirst: _getfirst, GetAll: _getall, Substitute: _substitute,
    SubstituteAll: _substitute_all, Remove: _remove, RemoveAll: _remove_all,
    Compose: _compose, ConstStr: _const,
}


def rf_eval_expression(expr: RfExpr, s: str) -> str:
    return _EVAL[type(expr)](expr, s)


def rf_eval_program(program: Program, s: str) -> str:
    """Concatenate the results of every step applied to the input ``s``."""
    if program.domain is not Domain.ROBUSTFILL:
        raise ProgramError("not a RobustFill program")
    if not program.steps:
        raise ProgramError("a program needs at least one step")
    return "".join(rf_eval_steps(program, s))


def rf_eval_steps(program: Program, s: str) -> list[str]:
    """Per-step results of ``program`` on ``s``."""
    out = []
    for k, expr in enumerate(program.steps):
        try:
            out.append(rf_eval_expression(expr, s))
        except ExecutionError as exc:
            exc.step = k
            raise
    return out


# ---------------------------------------------------------------------------
# enumeration

_FIELD_NAMES: dict = {}


def _fast(cls, *values):
    """Build an expression from parameters already known to be valid."""
    names = _FIELD_NAMES.get(cls)
    if names is None:
        names = _FIELD_NAMES[cls] = tuple(f.name for f in fields(cls))
    obj = object.__new__(cls)
    for name, v in zip(names, values):
        object.__setattr__(obj, name, v)
    return obj


def family_members(cls, chars: str = CHARACTERS) -> Iterator[RfExpr]:
    """All expressions of one non-Compose family in canonical order."""
    if cls is SubStr:
        for k1 in POSITIONS:
            for k2 in POSITIONS:
                yield _fast(SubStr, k1, k2)
    elif cls is GetSpan:
        ends = [(r, i, b) for r in REGEXES for i in INDICES for b in Boundary]
        for r1, i1, b1 in ends:
            for r2, i2, b2 in ends:
                yield _fast(GetSpan, r1, i1, b1, r2, i2, b2)
    elif cls in (GetUpto, GetFrom, GetToken, GetFirst, Remove):
        for r in REGEXES:
            for i in INDICES:
                yield _fast(cls, r, i)
    elif cls is ToCase:
        for a in Case:
            yield _fast(ToCase, a)
    elif cls is Replace:
        for c1 in REGEX_DELIMITERS:
            for c2 in REGEX_DELIMITERS:
                yield _fast(Replace, c1, c2)
    elif cls is Trim:
        yield Trim()
    elif cls in (GetAll, RemoveAll):
        for r in REGEXES:
            yield _fast(cls, r)
    elif cls is Substitute:
        for r in REGEXES:
            for i in INDICES:
                for c in chars:
                    yield _fast(Substitute, r, i, c)
    elif cls is SubstituteAll:
        for r in REGEXES:
            for c in chars:
                yield _fast(SubstituteAll, r, c)
    elif cls is ConstStr:
        for c in chars:
            yield _fast(ConstStr, c)
    else:
        raise ProgramError(f"not an expression family: {cls!r}")


def _normalize_allowed(allowed) -> list:
    if allowed is None:
        return list(RF_FAMILIES)
    flat = set()
    for item in allowed:
        if isinstance(item, (set, frozenset, list, tuple)):
            flat.update(item)
        else:
            flat.add(item)
    return [cls for cls in RF_FAMILIES if cls in flat]


def rf_enumerate_expressions(allowed: Iterable | None = None, max_candidates: int | None = None) -> Iterator[RfExpr]:
    """Deterministic stream of expressions drawn from the ``allowed`` families.

    ``allowed`` holds expression classes (``SubStr``, ``Compose``, ...) or
    concept sets such as :data:`~exedec_lab.syntax.SUBSTRING_CONCEPT`.
    """
    families = _normalize_allowed(allowed)
    if not families:
        raise ProgramError("allowed concept set is empty")
    produced = 0
    for cls in families:
        if cls is Compose:
            members = (
                Compose(outer, inner)
                for ocls in MODIFICATION_FAMILIES
                for outer in family_members(ocls)
                for icls in SUBSTRING_FAMILIES + MODIFICATION_FAMILIES
                for inner in family_members(icls)
            )
        else:
            members = family_members(cls)
        for expr in members:
            if max_candidates is not None and produced >= max_candidates:
                return
            produced += 1
            yield expr


# ---------------------------------------------------------------------------
# canonical ordering

_FAMILY_RANK = {cls: k for k, cls in enumerate(RF_FAMILIES)}
_POS_RANK = {k: j for j, k in enumerate(POSITIONS)}
_REGEX_RANK = {r: j for j, r in enumerate(REGEXES)}
_INDEX_RANK = {i: j for j, i in enumerate(INDICES)}
_CHAR_RANK = {c: j for j, c in enumerate(CHARACTERS)}
_DELIM_RANK = {c: j for j, c in enumerate(REGEX_DELIMITERS)}
_ENUM_RANK = {**{b: j for j, b in enumerate(Boundary)}, **{a: j for j, a in enumerate(Case)}}


def _param_rank(name, value):
    if name in ("k1", "k2"):
        return _POS_RANK[value]
    if name in ("r", "r1", "r2"):
        return _REGEX_RANK[value]
    if name in ("i", "i1", "i2"):
        return _INDEX_RANK[value]
    if name in ("c1", "c2"):
        return _DELIM_RANK[value]
    if name == "c":
        return _CHAR_RANK[value]
    return _ENUM_RANK[value]


@functools.lru_cache(maxsize=1 << 16)
def order_key(expr: RfExpr) -> tuple:
    """Sort key reproducing :func:`rf_enumerate_expressions` order."""
    if isinstance(expr, Compose):
        return (_FAMILY_RANK[Compose], order_key(expr.outer), order_key(expr.inner))
    return (_FAMILY_RANK[type(expr)],) + tuple(
        _param_rank(f.name, getattr(expr, f.name)) for f in fields(expr)
    )


# ---------------------------------------------------------------------------
# target-directed search


def _try(expr, s):
    try:
        return rf_eval_expression(expr, s)
    except MatchError:
        return None


class _Classes:
    """Observational-equivalence classes: output vector -> cheapest expression."""

    def __init__(self):
        self.best: dict[tuple[str, ...], tuple[tuple, RfExpr]] = {}

    def add(self, expr, outs, key=None):
        key = key if key is not None else order_key(expr)
        cur = self.best.get(outs)
        if cur is None or key < cur[0]:
            self.best[outs] = (key, expr)

    def items(self):
        return [(expr, outs, key) for outs, (key, expr) in self.best.items()]


@functools.lru_cache(maxsize=64)
def _input_tables(xs: tuple[str, ...]):
    """Position tables that depend only on the inputs."""
    starts: dict[tuple, int] = {}
    ends: dict[tuple, int] = {}
    if all(xs):
        for k in POSITIONS:
            vec = tuple(_normalize_position(k, len(x)) for x in xs)
            starts.setdefault(vec, k)
            ends.setdefault(vec, k)
    bounds: dict[tuple, tuple] = {}
    for r in REGEXES:
        per_ex = [spans(r, x) for x in xs]
        if not all(per_ex):
            continue
        for i in INDICES:
            try:
                picked = [_pick(found, i, r) for found in per_ex]
            except MatchError:
                continue
            for b in Boundary:
                vec = tuple(p[0] if b is Boundary.START else p[1] for p in picked)
                bounds.setdefault(vec, (r, i, b))
    return starts, ends, bounds


@functools.lru_cache(maxsize=64)
def _substring_classes(xs: tuple[str, ...]) -> tuple:
    """Every distinct substring-family output vector on ``xs`` (unpruned)."""
    starts, ends, bounds = _input_tables(xs)
    classes = _Classes()
    for svec, k1 in starts.items():
        for evec, k2 in ends.items():
            if all(a <= b for a, b in zip(svec, evec)):
                classes.add(SubStr(k1, k2), tuple(x[a:b + 1] for x, a, b in zip(xs, svec, evec)))
    blist = list(bounds.items())
    for p1, (r1, i1, b1) in blist:
        for p2, (r2, i2, b2) in blist:
            if all(a <= b for a, b in zip(p1, p2)):
                outs = tuple(x[a:b] for x, a, b in zip(xs, p1, p2))
                classes.add(GetSpan(r1, i1, b1, r2, i2, b2), outs)
    for cls in (GetUpto, GetFrom, GetToken):
        for r in REGEXES:
            for i in INDICES:
                expr = cls(r, i)
                outs = [_try(expr, x) for x in xs]
                if None not in outs:
                    classes.add(expr, tuple(outs))
    return tuple(classes.items())


def _is_prefix_vec(outs, ts) -> bool:
    return all(t.startswith(o) for o, t in zip(outs, ts))


def _char_hint(ts) -> str:
    """Characters that may appear in an output given the targets (any case)."""
    seen = set()
    for t in ts:
        for ch in t:
            seen.add(ch.lower())
            seen.add(ch.upper())
    return "".join(c for c in CHARACTERS if c in seen)


_PLAIN_MODIFICATIONS = tuple(c for c in MODIFICATION_FAMILIES if c not in (Substitute, SubstituteAll))


@functools.lru_cache(maxsize=64)
def _plain_modification_classes(xs: tuple[str, ...]) -> tuple:
    """Distinct output vectors of the modifications without a free character."""
    classes = _Classes()
    for cls in _PLAIN_MODIFICATIONS:
        for expr in family_members(cls):
            outs = []
            for x in xs:
                o = _try(expr, x)
                if o is None:
                    break
                outs.append(o)
            else:
                classes.add(expr, tuple(outs))
    return tuple(classes.items())


@functools.lru_cache(maxsize=256)
def _substitution_sites(xs: tuple[str, ...]) -> tuple:
    """Per regex: the (index, spans) picks valid on every input, and split pieces."""
    sites = []
    for r in REGEXES:
        per_ex = [spans(r, x) for x in xs]
        if not all(per_ex):
            continue
        picks = []
        for i in INDICES:
            try:
                picks.append((i, tuple(_pick(found, i, r) for found in per_ex)))
            except MatchError:
                continue
        pieces = tuple(tuple(_PATTERNS[r].split(x)) for x in xs)
        sites.append((r, tuple(picks), pieces))
    return tuple(sites)


def _substitution_classes(xs: tuple[str, ...], chars: str) -> list:
    classes = _Classes()
    for r, picks, _ in _substitution_sites(xs):
        for i, ab in picks:
            for c in chars:
                outs = tuple(x[:a] + c + x[b:] for x, (a, b) in zip(xs, ab))
                classes.add(_fast(Substitute, r, i, c), outs)
    for r, _, pieces in _substitution_sites(xs):
        for c in chars:
            classes.add(_fast(SubstituteAll, r, c), tuple(c.join(p) for p in pieces))
    return classes.items()


def _modification_classes(xs: tuple[str, ...], chars: str) -> list:
    """Every distinct modification output vector on ``xs``.

    Substitute and SubstituteAll only try replacement characters in ``chars``.
    """
    return list(_plain_modification_classes(xs)) + _substitution_classes(xs, chars)


def prefix_distance(o: str, t: str) -> float:
    """Normalized edit distance from a prefix ``o`` of ``t`` to ``t``."""
    return (len(t) - len(o)) / len(t) if t else 0.0


class _Bound:
    """Running ``beam``-th smallest summed distance among candidates found."""

    _EPS = 1e-9

    def __init__(self, beam: int | None, ts):
        self.beam = beam
        self.ts = ts
        self.heap: list[float] = []

    def offer(self, outs, found: _Classes):
        if self.beam is None or outs in found.best or not any(outs):
            return
        d = sum(prefix_distance(o, t) for o, t in zip(outs, self.ts))
        if len(self.heap) < self.beam:
            heapq.heappush(self.heap, -d)
        elif d < -self.heap[0]:
            heapq.heapreplace(self.heap, -d)

    def hopeless(self, partial: float) -> bool:
        """True when a candidate already this far off cannot enter the beam."""
        return len(self.heap) == self.beam and partial > -self.heap[0] + self._EPS


class RfSearch:
    """Finds single expressions whose outputs prefix the targets on every example.

    Results are deduplicated by output vector (observational equivalence);
    within a class the earliest expression in enumeration order is kept.
    ``budget`` caps the number of Compose pairings examined; when it runs out
    the search stops early and sets ``exhausted``.
    """

    def __init__(self, inputs: Sequence[str], allowed=None, budget: int | None = None):
        self.xs = tuple(inputs)
        self.families = _normalize_allowed(allowed)
        if not self.families:
            raise ProgramError("allowed concept set is empty")
        self.budget = budget
        self.exhausted = False

    def run(self, targets: Sequence[str], beam: int | None = None) -> list[tuple[RfExpr, tuple[str, ...]]]:
        """Prefix-consistent expressions in enumeration order.

        With ``beam`` set, Compose candidates that cannot rank among the
        ``beam`` closest (by :func:`prefix_distance`) are not explored; every
        candidate that could is still returned.
        """
        xs, ts = self.xs, tuple(targets)
        fams = set(self.families)
        found = _Classes()
        bound = _Bound(beam, ts)
        self.exhausted = False

        direct = []
        if fams & set(SUBSTRING_FAMILIES):
            direct += _substring_classes(xs)
        if fams & set(_PLAIN_MODIFICATIONS):
            direct += _plain_modification_classes(xs)
        if Substitute in fams or SubstituteAll in fams:
            direct += _substitution_classes(xs, _forced_chars(xs, ts))
        if ConstStr in fams:
            firsts = {t[:1] for t in ts}
            c = firsts.pop() if len(firsts) == 1 else ""
            if c and c in _CHAR_RANK:
                const = _fast(ConstStr, c)
                direct.append((const, tuple(c for _ in ts), order_key(const)))
        for expr, outs, key in direct:
            if type(expr) in fams and _is_prefix_vec(outs, ts):
                bound.offer(outs, found)
                found.add(expr, outs, key)
        if Compose in fams:
            self._compose(xs, ts, found, bound)

        return [
            (expr, outs)
            for expr, outs, key in sorted(found.items(), key=lambda item: item[2])
            if any(outs)
        ]

    def _compose(self, xs, ts, found: _Classes, bound: _Bound):
        # An outer Replace that changes nothing reproduces its inner class,
        # which the direct families already cover when they are allowed.
        covered = set(SUBSTRING_FAMILIES + MODIFICATION_FAMILIES) <= set(self.families)
        rank = _FAMILY_RANK[Compose]
        spent = 0
        t0 = ts[0]
        for s0, group, trie in _inner_groups(xs, _char_hint(ts)):
            # no modification more than doubles a string (GetAll(CHAR) comes closest)
            if t0 and bound.hopeless(prefix_distance(t0[:2 * len(s0)], t0)):
                continue
            for outer, out0 in _outer_candidates(s0, t0):
                if self.budget is not None and spent >= self.budget:
                    self.exhausted = True
                    return
                d0 = prefix_distance(out0, t0)
                if bound.hopeless(d0):
                    continue
                spent += len(group)
                if outer is None:
                    for expr, outs, key in group:
                        self._unchanged_replace(s0, expr, outs, key, ts, found, covered, bound)
                    continue
                okey = order_key(outer)
                for (expr, _, key), res in _walk(outer, trie, ts, 1, [out0], d0, bound):
                    bound.offer(res, found)
                    found.add(_fast(Compose, outer, expr), res, (rank, okey, key))

    @staticmethod
    def _unchanged_replace(s0, expr, outs, key, ts, found, covered, bound):
        """Replace(d1, d2) applied where ``d1`` does not occur on example 0."""
        rank = _FAMILY_RANK[Compose]
        for d1 in REGEX_DELIMITERS:
            if d1 in s0:
                continue
            hits = [(s, t) for s, t in zip(outs, ts) if d1 in s]
            if not hits:
                if not covered and _is_prefix_vec(outs, ts):
                    outer = _fast(Replace, d1, REGEX_DELIMITERS[0])
                    bound.offer(outs, found)
                    found.add(_fast(Compose, outer, expr), outs, (rank, order_key(outer), key))
                    covered = True
                continue
            s, t = hits[0]
            p = s.index(d1)
            if p >= len(t) or t[p] not in _DELIM_RANK:
                continue
            outer = _fast(Replace, d1, t[p])
            res = tuple(s.replace(d1, t[p]) for s in outs)
            if _is_prefix_vec(res, ts):
                bound.offer(res, found)
                found.add(_fast(Compose, outer, expr), res, (rank, order_key(outer), key))


def _walk(outer, node, ts, j, res, dist, bound):
    """Inner classes below ``node`` whose outer outputs prefix ``ts[j:]``."""
    if j == len(ts):
        yield node, tuple(res)
        return
    t = ts[j]
    for s, child in node.items():
        o = _try(outer, s)
        if o is None or not t.startswith(o):
            continue
        d = dist + prefix_distance(o, t)
        if bound.hopeless(d):
            continue
        res.append(o)
        yield from _walk(outer, child, ts, j + 1, res, d, bound)
        res.pop()


@functools.lru_cache(maxsize=64)
def _inner_groups(xs: tuple[str, ...], hint: str) -> tuple:
    """Inner classes for Compose grouped by example-0 output.

    Each group carries a trie over the outputs on the remaining examples, so
    an outer modification is evaluated once per distinct string.
    """
    inner: dict[tuple, tuple] = {}
    for item in list(_substring_classes(xs)) + _modification_classes(xs, hint):
        kept = inner.get(item[1])
        if kept is None or item[2] < kept[2]:
            inner[item[1]] = item
    groups: dict[str, list] = {}
    for item in inner.values():
        groups.setdefault(item[1][0], []).append(item)
    out = []
    for s0, items in groups.items():
        trie: dict = {}
        for item in items:
            node = trie
            outs = item[1]
            for s in outs[1:-1]:
                node = node.setdefault(s, {})
            if len(outs) > 1:
                node[outs[-1]] = item
            else:
                trie = item
        out.append((s0, tuple(items), trie))
    # long strings first: good candidates early tighten the beam bound
    out.sort(key=lambda g: -len(g[0]))
    return tuple(out)


def _forced_chars(xs, ts) -> str:
    """Replacement characters worth trying for Substitute/SubstituteAll on inputs."""
    chars = set()
    for x, t in zip(xs, ts):
        lcp = kernels.common_prefix(x, t)
        for r_spans in all_spans(x):
            for a, _ in r_spans:
                if a <= lcp and a < len(t):
                    chars.add(t[a])
    return "".join(c for c in CHARACTERS if c in chars)


# Prebuilt outer modifications without a free character, shared by all searches.
_GET_FIRST = {(r, i): _fast(GetFirst, r, i) for r in REGEXES for i in INDICES}
_REMOVE = {(r, i): _fast(Remove, r, i) for r in REGEXES for i in INDICES}
_GET_ALL = {r: _fast(GetAll, r) for r in REGEXES}
_REMOVE_ALL = {r: _fast(RemoveAll, r) for r in REGEXES}
_TO_CASE = {a: _fast(ToCase, a) for a in Case}
_TRIM = Trim()


@functools.lru_cache(maxsize=1 << 15)
def _outer_table(s: str):
    """Everything about outer modifications of ``s`` that does not depend on a target.

    Returns ``(fixed, sites, firsts, replace_at)``: ``fixed`` maps an output
    string to the modifications producing it; ``sites`` lists single-match
    spans ``(r, i, a, b)`` for Substitute; ``firsts`` lists ``(r, a0,
    pieces)`` for SubstituteAll; ``replace_at`` lists ``(d1, first index)``
    for the delimiters present in ``s``.
    """
    fixed: dict[str, list] = {}

    def put(expr, o):
        fixed.setdefault(o, []).append(expr)

    put(_TO_CASE[Case.ALL_CAPS], s.upper())
    put(_TO_CASE[Case.PROPER_CASE], s.title())
    put(_TO_CASE[Case.LOWER], s.lower())
    put(_TRIM, s.strip(" "))
    present = [d for d in REGEX_DELIMITERS if d in s]
    if len(present) < len(REGEX_DELIMITERS):
        put(None, s)
    sites = []
    firsts = []
    for r, found in zip(REGEXES, all_spans(s)):
        if not found:
            continue
        n = len(found)
        toks = [s[a:b] for a, b in found]
        for i in INDICES:
            if (i > 0 and n >= i) or (i < 0 and n > -i):
                put(_GET_FIRST[r, i], "".join(toks[:i]))
        put(_GET_ALL[r], " ".join(toks))
        for i in INDICES:
            if (i > 0 and i > n) or (i < 0 and -i > n):
                continue
            a, b = found[i - 1] if i > 0 else found[i]
            put(_REMOVE[r, i], s[:a] + s[b:])
            sites.append((r, i, a, b))
        put(_REMOVE_ALL[r], _PATTERNS[r].sub("", s))
        firsts.append((r, found[0][0], tuple(_PATTERNS[r].split(s))))
    replace_at = tuple((d, s.index(d)) for d in present)
    return fixed, tuple(sites), tuple(firsts), replace_at


def _outer_candidates(s: str, t: str) -> list[tuple[Modification | None, str]]:
    """Modifications ``m`` with ``m(s)`` a prefix of ``t``, plus ``m(s)``.

    ``None`` stands for every ``Replace(d1, d2)`` whose ``d1`` is absent from
    ``s``; the caller resolves ``d1`` and ``d2`` against the other examples.
    Free characters (Substitute's ``c``, Replace's ``c2``) are read off ``t``.
    """
    fixed, sites, firsts, replace_at = _outer_table(s)
    out = []
    # no modification more than doubles a string
    for k in range(min(len(t), 2 * len(s)) + 1):
        prefix = t[:k]
        exprs = fixed.get(prefix)
        if exprs:
            out.extend((expr, prefix) for expr in exprs)
    n_t = len(t)
    starts = t.startswith
    for d1, p in replace_at:
        if p < n_t and t[p] in _DELIM_RANK:
            o = s.replace(d1, t[p])
            if starts(o):
                out.append((_fast(Replace, d1, t[p]), o))
    lcp = kernels.common_prefix(s, t)
    for r, i, a, b in sites:
        if a <= lcp and a < n_t and t[a] in _CHAR_RANK:
            o = s[:a] + t[a] + s[b:]
            if starts(o):
                out.append((_fast(Substitute, r, i, t[a]), o))
    for r, a, pieces in firsts:
        if a <= lcp and a < n_t and t[a] in _CHAR_RANK:
            o = t[a].join(pieces)
            if starts(o):
                out.append((_fast(SubstituteAll, r, t[a]), o))
    return out
