"""Canonical text form of programs.

DeepCoder programs print one assignment per line::

    x1 = Sort x0
    x2 = Zip (max) x0 x1

RobustFill programs print as a single ``Concat(...)`` call::

    Concat(GetToken(WORD, 1), ConstStr('.'), ToCase(LOWER)(GetToken(WORD, -1)))

``parse_program(render_program(p), p.domain) == p`` for every valid program.
"""

from __future__ import annotations

import re
from dataclasses import fields

from .errors import ParseError, ProgramError
from .syntax import (
    BOOL_LAMBDAS, INT_LAMBDAS, PAIR_LAMBDAS, REGEX_DELIMITERS,
    Boundary, Case, Compose, ConstStr, DcOp, DcStep, Domain, GetAll, GetFirst, GetFrom,
    GetSpan, GetToken, GetUpto, Program, RegexType, Remove, RemoveAll, Replace, RfExpr,
    SubStr, Substitute, SubstituteAll, ToCase, Trim, var_index, var_name,
)

_ALL_LAMBDAS = set(INT_LAMBDAS) | set(BOOL_LAMBDAS) | set(PAIR_LAMBDAS)

# ---------------------------------------------------------------------------
# rendering


def render_dc_step(step: DcStep) -> str:
    parts = [step.target, "=", step.op.value]
    if step.fn is not None:
        parts.append(f"({step.fn})")
    parts.extend(step.args)
    return " ".join(parts)


def _render_param(value) -> str:
    if isinstance(value, (RegexType, Case, Boundary)):
        return value.value
    if isinstance(value, str):
        return f"'{value}'"
    return str(value)


def render_rf_expr(expr: RfExpr) -> str:
    if isinstance(expr, Compose):
        return f"{render_rf_expr(expr.outer)}({render_rf_expr(expr.inner)})"
    params = ", ".join(_render_param(getattr(expr, f.name)) for f in fields(expr))
    return f"{type(expr).__name__}({params})"


def render_step(step) -> str:
    if isinstance(step, DcStep):
        return render_dc_step(step)
    return render_rf_expr(step)


def render_program(program: Program) -> str:
    if program.domain is Domain.DEEPCODER:
        return "\n".join(render_dc_step(s) for s in program.steps)
    return "Concat(" + ", ".join(render_rf_expr(e) for e in program.steps) + ")"


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<char>'(?:[^'])')
  | (?P<int>-?[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),=])
    """,
    re.VERBOSE,
)


class _Tokens:
    def __init__(self, text: str, line: int = 1):
        self.toks: list[tuple[str, str, int]] = []
        self.line = line
        self.end_col = len(text) + 1
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group(), pos + 1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "", self.end_col)

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None):
        tok = self.next()
        if tok[0] != kind or (text is not None and tok[1] != text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", self.line, tok[2])
        return tok

    def error(self, message: str):
        return ParseError(message, self.line, self.peek()[2])


# ---------------------------------------------------------------------------
# DeepCoder parsing

_DC_LINE_RE = re.compile(r"\s*(\S+)\s*=\s*(\S+)\s*(.*)$")


def parse_dc_step(line: str, bound: set[str] | None = None, lineno: int = 1) -> DcStep:
    """Parse one ``x<k> = Op [(lambda)] args`` line.

    With ``bound`` given, argument variables must be members of it.
    """
    m = _DC_LINE_RE.match(line)
    if not m:
        raise ParseError("expected an assignment 'x<k> = Op ...'", lineno, 1)
    target = m.group(1)
    try:
        var_index(target)
    except ProgramError:
        raise ParseError(f"bad target variable {target!r}", lineno, m.start(1) + 1) from None
    op_name = m.group(2)
    try:
        op = DcOp(op_name)
    except ValueError:
        raise ParseError(f"unknown operation {op_name!r}", lineno, m.start(2) + 1) from None
    rest, offset = m.group(3), m.start(3)
    fn, fn_col = None, offset + 1
    if rest.startswith("("):
        depth = 0
        for j, ch in enumerate(rest):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0:
                break
        else:
            raise ParseError("unbalanced parenthesis in lambda", lineno, offset + 1)
        fn = rest[1:j].replace(" ", "")
        if fn not in _ALL_LAMBDAS:
            raise ParseError(f"unknown lambda ({fn})", lineno, offset + 1)
        rest, offset = rest[j + 1:], offset + j + 1
    if op.lambdas and fn is None:
        raise ParseError(f"{op.value} requires a lambda", lineno, m.start(2) + 1)
    if fn is not None and fn not in op.lambdas:
        raise ParseError(f"lambda ({fn}) does not fit {op.value}", lineno, fn_col)
    args = []
    for am in re.finditer(r"\S+", rest):
        name = am.group()
        col = offset + am.start() + 1
        try:
            var_index(name)
        except ProgramError:
            raise ParseError(f"unknown identifier {name!r}", lineno, col) from None
        if bound is not None and name not in bound:
            raise ParseError(f"unbound variable {name}", lineno, col)
        args.append(name)
    if len(args) != len(op.arg_kinds):
        raise ParseError(
            f"{op.value} takes {len(op.arg_kinds)} argument(s), got {len(args)}", lineno, m.start(2) + 1
        )
    return DcStep(target, op, fn, tuple(args))


def _parse_deepcoder(text: str) -> Program:
    lines = [(n, ln) for n, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not lines:
        return Program(Domain.DEEPCODER, (), ())
    first = _DC_LINE_RE.match(lines[0][1])
    try:
        n_inputs = var_index(first.group(1)) if first else None
    except ProgramError:
        n_inputs = None
    if n_inputs is None or n_inputs < 1:
        raise ParseError("first assignment must target x<k> with k >= 1", lines[0][0], 1)
    inputs = tuple(var_name(k) for k in range(n_inputs))
    bound = set(inputs)
    steps = []
    for k, (lineno, line) in enumerate(lines):
        step = parse_dc_step(line, bound, lineno)
        expected = var_name(n_inputs + k)
        if step.target != expected:
            raise ParseError(f"expected assignment to {expected}, found {step.target}", lineno, 1)
        bound.add(step.target)
        steps.append(step)
    return Program(Domain.DEEPCODER, tuple(steps), inputs)


# ---------------------------------------------------------------------------
# RobustFill parsing

_RF_CLASSES = {
    cls.__name__: cls
    for cls in (SubStr, GetSpan, GetUpto, GetFrom, GetToken, ToCase, Replace, Trim,
                GetFirst, GetAll, Substitute, SubstituteAll, Remove, RemoveAll, ConstStr)
}

# parameter kind per field name
_PARAM_KINDS = {
    "k1": "int", "k2": "int", "i": "int", "i1": "int", "i2": "int",
    "r": "regex", "r1": "regex", "r2": "regex",
    "b1": "boundary", "b2": "boundary", "case": "case",
    "c": "char", "c1": "char", "c2": "char",
}


def _parse_param(toks: _Tokens, kind: str):
    tok = toks.next()
    typ, text, col = tok
    if kind == "int" and typ == "int":
        return int(text)
    if kind == "char" and typ == "char":
        return text[1]
    if kind == "regex":
        if typ == "char" and text[1] in REGEX_DELIMITERS:
            return text[1]
        if typ == "name" and text in RegexType.__members__:
            return RegexType(text)
    if kind == "boundary" and typ == "name" and text in Boundary.__members__:
        return Boundary(text)
    if kind == "case" and typ == "name" and text in Case.__members__:
        return Case(text)
    raise ParseError(f"expected a {kind} parameter, found {text or 'end of input'!r}", toks.line, col)


def _parse_rf_expr(toks: _Tokens) -> RfExpr:
    typ, name, col = toks.expect("name")
    cls = _RF_CLASSES.get(name)
    if cls is None:
        raise ParseError(f"unknown identifier {name!r}", toks.line, col)
    toks.expect("punct", "(")
    values = []
    flds = fields(cls)
    for j, f in enumerate(flds):
        if j:
            if toks.peek()[1] == ")":
                raise ParseError(
                    f"{name} takes {len(flds)} parameter(s), got {j}", toks.line, toks.peek()[2]
                )
            toks.expect("punct", ",")
        values.append(_parse_param(toks, _PARAM_KINDS[f.name]))
    if toks.peek()[1] == ",":
        raise ParseError(f"{name} takes {len(flds)} parameter(s)", toks.line, toks.peek()[2])
    toks.expect("punct", ")")
    try:
        expr = cls(*values)
    except ProgramError as exc:
        raise ParseError(str(exc), toks.line, col) from None
    if toks.peek()[1] == "(":
        toks.next()
        inner = _parse_rf_expr(toks)
        toks.expect("punct", ")")
        try:
            expr = Compose(expr, inner)
        except ProgramError as exc:
            raise ParseError(str(exc), toks.line, col) from None
    return expr


def parse_rf_expr(text: str) -> RfExpr:
    toks = _Tokens(text)
    expr = _parse_rf_expr(toks)
    if toks.peek()[0] != "eof":
        raise toks.error(f"trailing input {toks.peek()[1]!r}")
    return expr


def _parse_robustfill(text: str) -> Program:
    if "\n" in text.strip():
        raise ParseError("RobustFill programs are a single line", 1, 1)
    toks = _Tokens(text.strip())
    toks.expect("name", "Concat")
    toks.expect("punct", "(")
    steps = []
    if toks.peek()[1] != ")":
        steps.append(_parse_rf_expr(toks))
        while toks.peek()[1] == ",":
            toks.next()
            steps.append(_parse_rf_expr(toks))
    toks.expect("punct", ")")
    if toks.peek()[0] != "eof":
        raise toks.error(f"trailing input {toks.peek()[1]!r}")
    return Program(Domain.ROBUSTFILL, tuple(steps), ("x0",))


def parse_program(text: str, domain) -> Program:
    domain = Domain(domain)
    if domain is Domain.DEEPCODER:
        return _parse_deepcoder(text)
    return _parse_robustfill(text)


def parse_step(text: str, domain, bound=None) -> DcStep | RfExpr:
    """Parse a single subprogram (one assignment line or one expression)."""
    domain = Domain(domain)
    if domain is Domain.DEEPCODER:
        return parse_dc_step(text.strip(), bound)
    return parse_rf_expr(text.strip())

