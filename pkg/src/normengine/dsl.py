"""Surface syntax for norm programs: parser, serializer and static checks.

A program is a sequence of clauses, each ending with a period::

    #property stop, bump, follow.          % declarations
    holds(stop, b_narrator, 1).            % fact
    @bump_not_stop holds(combine(bump, V), W, T) => -holds(stop, W, T).
    @follow_back holds(combine(follow, V), W, T) : holds(combine(follow, V), W, T-1).
    @shock_follow shock_body : holds(combine(follow, V), W, T) [holds(control, W, T-1)].

``=>`` is a material implication, ``Body : Head.`` a normal default and
``Body : Head [Constraint].`` a semi-normal default.  ``-`` is classical
negation and ``not`` (body only) negation as failure.  Variables start with
an upper-case letter or underscore; everything else is lower-cased.
The normative grammar lives in ``docs/grammar.ebnf``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum

from .terms import (
    Atom,
    Combine,
    Constant,
    Literal,
    MODALITIES,
    Not,
    Number,
    StateExpr,
    TermError,
    Variable,
    apply_substitution,
    combine,
    is_ground,
    property_name,
    variables,
)

BUILTIN_PREDICATES = {
    "holds": 3,
    "must": 3,
    "able_to": 3,
    "incompatible": 2,
    "action": 1,
    "pcb": 2,
    "available": 4,
    "an": 3,
    "dan": 3,
    "subject": 2,
    "object": 2,
    "qualif_n": 2,
    "qualif_v": 2,
    "compl_n": 3,
    "compl_v": 3,
    "support": 2,
}

DEFAULT_KERNEL = frozenset({
    Constant("stop"),
    Constant("control"),
    Constant("run_slowly_enough"),
    Constant("start"),
    Constant("move_back"),
    Combine(Constant("disruptive_factor"), Variable("C")),
})

RESERVED = {"not", "true", "combine"}


class RuleKind(str, Enum):
    IMPLICATION = "implication"
    NORMAL = "normal-default"
    SEMI_NORMAL = "semi-normal-default"


@dataclass(frozen=True)
class Rule:
    kind: RuleKind
    body: tuple
    head: Literal
    constraint: Literal | None = None
    label: str = ""
    span: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        if (self.kind is RuleKind.SEMI_NORMAL) != (self.constraint is not None):
            raise ValueError("a constraint is required for, and only for, semi-normal defaults")

    @property
    def is_default(self) -> bool:
        return self.kind is not RuleKind.IMPLICATION

    @property
    def positive_body(self) -> tuple[Literal, ...]:
        return tuple(b for b in self.body if isinstance(b, Literal))

    @property
    def naf_body(self) -> tuple[Literal, ...]:
        return tuple(b.literal for b in self.body if isinstance(b, Not))

    @property
    def justifications(self) -> tuple[Literal, ...]:
        """Literals that must stay consistent for the rule to fire."""
        if self.kind is RuleKind.IMPLICATION:
            return ()
        if self.constraint is None:
            return (self.head,)
        return (self.head, self.constraint)

    def substitute(self, s, max_state=None) -> "Rule":
        return replace(
            self,
            body=tuple(apply_substitution(b, s, max_state) for b in self.body),
            head=apply_substitution(self.head, s, max_state),
            constraint=None if self.constraint is None else apply_substitution(self.constraint, s, max_state),
        )

    def __str__(self):
        body = ", ".join(map(str, self.body))
        if self.kind is RuleKind.IMPLICATION:
            text = f"{body} => {self.head}"
        else:
            text = f"{body} : {self.head}" if body else f": {self.head}"
            if self.constraint is not None:
                text += f" [{self.constraint}]"
        return f"@{self.label} {text}." if self.label else f"{text}."


@dataclass(frozen=True)
class Program:
    facts: tuple[Literal, ...] = ()
    static_facts: tuple[Literal, ...] = ()
    rules: tuple[Rule, ...] = ()
    properties: frozenset[str] = frozenset()
    predicates: frozenset[tuple[str, int]] = frozenset()
    kernel: frozenset | None = None

    @property
    def schemas(self) -> tuple[Literal, ...]:
        """Incompatibility facts that still contain variables."""
        return tuple(f for f in self.static_facts if not is_ground(f))

    def arity(self, predicate: str) -> int | None:
        if predicate in BUILTIN_PREDICATES:
            return BUILTIN_PREDICATES[predicate]
        for name, n in self.predicates:
            if name == predicate:
                return n
        return None

    def extend(self, other: "Program") -> "Program":
        """Concatenate clauses and union declarations (labels must stay unique)."""
        kernel = self.kernel if other.kernel is None else other.kernel
        return Program(
            facts=self.facts + other.facts,
            static_facts=self.static_facts + other.static_facts,
            rules=self.rules + other.rules,
            properties=self.properties | other.properties,
            predicates=self.predicates | other.predicates,
            kernel=kernel,
        )

    def with_facts(self, facts) -> "Program":
        modal = tuple(f for f in facts if f.atom.is_modal)
        other = tuple(f for f in facts if not f.atom.is_modal)
        return replace(self, facts=self.facts + modal, static_facts=self.static_facts + other)


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str
    message: str
    span: tuple[int, int]

    def __str__(self):
        line, col = self.span
        return f"{line}:{col}: {self.severity}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(map(str, diagnostics)))


# -- lexer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<implies>=>)
  | (?P<directive>\#[a-z]+)
  | (?P<label>@[A-Za-z0-9_]+)
  | (?P<number>[0-9]+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<punct>[(),.:\[\]+\-/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: tuple[int, int]


class _SyntaxError(Exception):
    def __init__(self, message, span):
        super().__init__(message)
        self.span = span


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise _SyntaxError(f"unexpected character {text[pos]!r}", (line, pos - line_start + 1))
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident":
                chunk = chunk.lower()
            tokens.append(Token(kind if kind != "punct" else chunk, chunk, (line, pos - line_start + 1)))
        newlines = chunk.count("\n") if kind in ("ws", "comment") else 0
        if newlines:
            line += newlines
            line_start = pos + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", (line, pos - line_start + 1)))
    return tokens


# -- parser --------------------------------------------------------------

class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind, what=None) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise _SyntaxError(f"expected {what or repr(kind)}, found {found!r}", self.tok.span)
        return self.advance()

    def recover(self):
        while self.tok.kind not in (".", "eof"):
            self.advance()
        self.advance()

    # clauses

    def clause(self):
        t = self.tok
        if t.kind == "directive":
            return self.declaration()
        label = None
        if t.kind == "label":
            label = self.advance().text[1:]
        start = self.tok.span if label is None else t.span
        body = []
        if self.tok.kind not in (":", "implies"):
            if self.tok.kind == "ident" and self.tok.text == "true":
                self.advance()
                if self.tok.kind not in (":", "implies"):
                    raise _SyntaxError("'true' may only stand for an empty rule body", t.span)
            else:
                body.append(self.body_literal())
                while self.tok.kind == ",":
                    self.advance()
                    body.append(self.body_literal())
        if self.tok.kind == ".":
            self.advance()
            if len(body) != 1 or isinstance(body[0][0], Not):
                raise _SyntaxError("a fact is a single literal", start)
            if label is not None:
                raise _SyntaxError("labels apply to rules only", start)
            return ("fact", body[0][0], body[0][1])
        if self.tok.kind == "implies":
            self.advance()
            head, hspan = self.literal()
            self.expect(".", "'.'")
            if not body:
                raise _SyntaxError("an implication needs a body", start)
            return ("rule", Rule(RuleKind.IMPLICATION, tuple(b for b, _ in body), head, None, label or "", start), body, hspan)
        if self.tok.kind == ":":
            self.advance()
            head, hspan = self.literal()
            constraint = None
            if self.tok.kind == "[":
                self.advance()
                constraint, _ = self.literal()
                self.expect("]", "']'")
            self.expect(".", "'.'")
            kind = RuleKind.NORMAL if constraint is None else RuleKind.SEMI_NORMAL
            return ("rule", Rule(kind, tuple(b for b, _ in body), head, constraint, label or "", start), body, hspan)
        found = self.tok.text or "end of input"
        raise _SyntaxError(f"expected ',', '.', '=>' or ':', found {found!r}", self.tok.span)

    def declaration(self):
        t = self.advance()
        items = []
        if t.text == "#property":
            items.append(self.expect("ident", "property name").text)
            while self.tok.kind == ",":
                self.advance()
                items.append(self.expect("ident", "property name").text)
        elif t.text == "#predicate":
            items.append(self.signature())
            while self.tok.kind == ",":
                self.advance()
                items.append(self.signature())
        elif t.text == "#kernel":
            items.append(self.term()[0])
            while self.tok.kind == ",":
                self.advance()
                items.append(self.term()[0])
        else:
            raise _SyntaxError(f"unknown directive {t.text}", t.span)
        self.expect(".", "'.'")
        return ("decl", t.text, items, t.span)

    def signature(self):
        name = self.expect("ident", "predicate name").text
        self.expect("/", "'/'")
        arity = int(self.expect("number", "arity").text)
        return (name, arity)

    def body_literal(self):
        if self.tok.kind == "ident" and self.tok.text == "not":
            self.advance()
            lit, span = self.literal()
            return Not(lit), span
        return self.literal()

    def literal(self):
        positive = True
        span = self.tok.span
        if self.tok.kind == "-":
            self.advance()
            positive = False
        atom, aspan = self.atom()
        return Literal(atom, positive), span

    def atom(self):
        t = self.expect("ident", "predicate name")
        if t.text in RESERVED:
            raise _SyntaxError(f"{t.text!r} is reserved", t.span)
        args = []
        if self.tok.kind == "(":
            self.advance()
            args.append(self.term()[0])
            while self.tok.kind == ",":
                self.advance()
                args.append(self.term()[0])
            self.expect(")", "',' or ')'")
        try:
            return Atom(t.text, tuple(args)), t.span
        except TermError as e:
            raise _SyntaxError(str(e), t.span) from None

    def term(self):
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Number(int(t.text)), t.span
        if t.kind == "var":
            self.advance()
            if self.tok.kind in ("+", "-"):
                sign = 1 if self.advance().kind == "+" else -1
                n = self.expect("number", "state offset")
                try:
                    return StateExpr(Variable(t.text), sign * int(n.text)), t.span
                except TermError as e:
                    raise _SyntaxError(str(e), n.span) from None
            return Variable(t.text), t.span
        if t.kind == "ident":
            self.advance()
            if t.text == "combine":
                self.expect("(", "'('")
                base = self.term()[0]
                self.expect(",", "','")
                arg = self.term()[0]
                self.expect(")", "')'")
                try:
                    return combine(base, arg), t.span
                except TermError as e:
                    raise _SyntaxError(str(e), t.span) from None
            if self.tok.kind == "(":
                raise _SyntaxError(f"compound terms other than combine are not supported ({t.text})", t.span)
            return Constant(t.text), t.span
        found = t.text or "end of input"
        raise _SyntaxError(f"expected a term, found {found!r}", t.span)


def parse_program(text: str) -> Program:
    """Parse and statically check a program.

    Raises :class:`ParseError` carrying every error diagnostic found; the
    parser resynchronises at the next period so one bad clause does not hide
    the others.
    """
    diagnostics: list[ParseDiagnostic] = []
    try:
        tokens = tokenize(text)
    except _SyntaxError as e:
        raise ParseError([ParseDiagnostic("error", str(e), e.span)]) from None

    parser = _Parser(tokens)
    clauses = []
    while parser.tok.kind != "eof":
        try:
            clauses.append(parser.clause())
        except _SyntaxError as e:
            diagnostics.append(ParseDiagnostic("error", str(e), e.span))
            parser.recover()

    properties: set[str] = set()
    predicates: set[tuple[str, int]] = set()
    kernel = None
    for c in clauses:
        if c[0] != "decl":
            continue
        _, directive, items, span = c
        if directive == "#property":
            properties.update(items)
        elif directive == "#predicate":
            for name, arity in items:
                if name in BUILTIN_PREDICATES or name in RESERVED:
                    diagnostics.append(ParseDiagnostic("error", f"cannot redeclare built-in predicate {name}", span))
                elif any(n == name and a != arity for n, a in predicates):
                    diagnostics.append(ParseDiagnostic("error", f"conflicting arities declared for {name}", span))
                predicates.add((name, arity))
        else:
            kernel = frozenset(items) if kernel is None else kernel | frozenset(items)

    program = Program(properties=frozenset(properties), predicates=frozenset(predicates), kernel=kernel)
    facts, static_facts, rules = [], [], []
    labels: set[str] = set()
    ordinal = 0
    for c in clauses:
        if c[0] == "fact":
            _, lit, span = c
            errs = _check_literal(program, lit, span)
            if not errs and not is_ground(lit):
                if lit.atom.predicate != "incompatible":
                    errs.append(ParseDiagnostic("error", f"fact {lit} is not ground (only incompatible schemas may hold variables)", span))
                elif any(isinstance(a, Variable) for a in lit.atom.args):
                    errs.append(ParseDiagnostic("error", f"incompatible schema {lit} may only use variables inside combine", span))
            diagnostics.extend(errs)
            (facts if lit.atom.is_modal else static_facts).append(lit)
        elif c[0] == "rule":
            _, rule, body, hspan = c
            ordinal += 1
            if not rule.label:
                rule = replace(rule, label=f"r{ordinal}")
            if rule.label in labels:
                diagnostics.append(ParseDiagnostic("error", f"duplicate rule label {rule.label}", rule.span))
            labels.add(rule.label)
            for b, span in body:
                diagnostics.extend(_check_literal(program, b.literal if isinstance(b, Not) else b, span))
            diagnostics.extend(_check_literal(program, rule.head, hspan))
            if rule.constraint is not None:
                diagnostics.extend(_check_literal(program, rule.constraint, rule.span))
            diagnostics.extend(_check_range(rule))
            rules.append(rule)

    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        raise ParseError(sorted(errors, key=lambda d: d.span))
    return replace(program, facts=tuple(facts), static_facts=tuple(static_facts), rules=tuple(rules))


def _check_literal(program: Program, lit: Literal, span) -> list[ParseDiagnostic]:
    atom = lit.atom
    arity = program.arity(atom.predicate)
    if arity is None:
        return [ParseDiagnostic("error", f"undeclared predicate {atom.predicate}/{len(atom.args)}", span)]
    if arity != len(atom.args):
        return [ParseDiagnostic("error", f"{atom.predicate} expects {arity} arguments, got {len(atom.args)}", span)]
    if atom.is_modal:
        name = property_name(atom.prop)
        if isinstance(atom.prop, (Number, StateExpr)):
            return [ParseDiagnostic("error", f"{atom.prop} is not a property", span)]
        if name is not None and name not in program.properties:
            return [ParseDiagnostic("error", f"undeclared property {name}", span)]
    return []


def _check_range(rule: Rule) -> list[ParseDiagnostic]:
    bound: set[str] = set()
    for b in rule.positive_body:
        bound |= variables(b)
    loose = variables(rule.head)
    for b in rule.naf_body:
        loose |= variables(b)
    if rule.constraint is not None:
        loose |= variables(rule.constraint)
    missing = sorted(loose - bound)
    if missing:
        return [ParseDiagnostic("error", f"rule {rule.label} is not range-restricted: {', '.join(missing)} not bound by the body", rule.span)]
    return []


# -- serializer --------------------------------------------------------------

HEADER = "% normengine program"


def serialize_program(p: Program) -> str:
    """Canonical text: a header, sorted declarations, then one clause per line."""
    lines = [HEADER]
    if p.properties:
        lines.append(f"#property {', '.join(sorted(p.properties))}.")
    if p.predicates:
        lines.append(f"#predicate {', '.join(f'{n}/{a}' for n, a in sorted(p.predicates))}.")
    if p.kernel is not None:
        lines.append(f"#kernel {', '.join(sorted(map(str, p.kernel)))}.")
    lines.extend(f"{f}." for f in p.facts)
    lines.extend(f"{f}." for f in p.static_facts)
    lines.extend(str(r) for r in p.rules)
    return "\n".join(lines) + "\n"


# -- validation -------------------------------------------------------------

def _compatible(a, b) -> bool:
    """True when two (possibly non-ground) properties can denote the same value."""
    if isinstance(a, (Variable, StateExpr)) or isinstance(b, (Variable, StateExpr)):
        return True
    if isinstance(a, Combine) and isinstance(b, Combine):
        return _compatible(a.base, b.base) and _compatible(a.arg, b.arg)
    return a == b


def in_kernel(prop, kernel=DEFAULT_KERNEL) -> bool:
    if isinstance(prop, Variable):
        return True
    return any(_compatible(k, prop) for k in kernel)


def validate_program(p: Program) -> list[ParseDiagnostic]:
    """Kernel check for duties plus warnings for unused declarations."""
    kernel = DEFAULT_KERNEL if p.kernel is None else p.kernel
    out: list[ParseDiagnostic] = []
    for r in p.rules:
        if r.head.atom.predicate == "must" and not in_kernel(r.head.atom.prop, kernel):
            out.append(ParseDiagnostic(
                "error",
                f"rule {r.label} concludes a duty on {r.head.atom.prop}, which is not a kernel property",
                r.span or (1, 1),
            ))
    for f in p.facts:
        if f.atom.predicate == "must" and not in_kernel(f.atom.prop, kernel):
            out.append(ParseDiagnostic("error", f"duty fact {f} is outside the kernel", (1, 1)))

    used_preds: set[str] = set()
    used_names: set[str] = set()

    def visit(term):
        if isinstance(term, Constant):
            used_names.add(term.name)
        elif isinstance(term, Combine):
            visit(term.base)
            visit(term.arg)

    def visit_literal(lit):
        used_preds.add(lit.atom.predicate)
        for a in lit.atom.args:
            visit(a)

    for f in p.facts + p.static_facts:
        visit_literal(f)
    for r in p.rules:
        for b in r.body:
            visit_literal(b.literal if isinstance(b, Not) else b)
        visit_literal(r.head)
        if r.constraint is not None:
            visit_literal(r.constraint)
    for k in p.kernel or ():
        visit(k)
    for name in sorted(p.properties - used_names):
        out.append(ParseDiagnostic("warning", f"property {name} is declared but never used", (1, 1)))
    for name, arity in sorted(p.predicates):
        if name not in used_preds:
            out.append(ParseDiagnostic("warning", f"predicate {name}/{arity} is declared but never used", (1, 1)))
    return out


def parse_literal(text: str) -> Literal:
    """A single literal such as ``must(stop, a, 1)`` or ``-holds(P, X, T)``.

    A trailing period is optional; variables are allowed (for patterns).
    """
    try:
        parser = _Parser(tokenize(text))
        lit, _ = parser.literal()
        if parser.tok.kind == ".":
            parser.advance()
        if parser.tok.kind != "eof":
            raise _SyntaxError(f"unexpected {parser.tok.text!r} after literal", parser.tok.span)
    except _SyntaxError as e:
        raise ParseError([ParseDiagnostic("error", str(e), e.span)]) from None
    return lit


def load_program(path) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())


__all__ = [
    "BUILTIN_PREDICATES",
    "DEFAULT_KERNEL",
    "MODALITIES",
    "ParseDiagnostic",
    "ParseError",
    "Program",
    "Rule",
    "RuleKind",
    "load_program",
    "parse_literal",
    "parse_program",
    "serialize_program",
    "tokenize",
    "validate_program",
]
