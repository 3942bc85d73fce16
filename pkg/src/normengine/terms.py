"""Terms, reified atoms, literals and substitutions.

Every value here is an immutable, hashable dataclass, so structural equality
is plain ``==`` and values can be shared freely between runs.

Properties are ordinary terms: an atomic property such as ``stop`` is a
:class:`Constant`, and complex properties are built with :func:`combine`.
States are :class:`Number` values (numbered from 1) or, inside rules,
a :class:`Variable` possibly shifted by one (:class:`StateExpr`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

MODALITIES = ("holds", "must", "able_to")
MAX_COMBINE_DEPTH = 2
MAX_STATE_OFFSET = 1

NARRATOR = "b_narrator"


class TermError(ValueError):
    """Raised when a term, property or atom cannot be constructed."""


class UnboundVariable(TermError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name}")
        self.name = name


class StateOutOfRange(Exception):
    """State arithmetic produced a value outside the allowed range.

    Grounding treats this as "discard the instance", not as an error.
    """

    def __init__(self, value: int):
        super().__init__(f"state {value} out of range")
        self.value = value


@dataclass(frozen=True, slots=True)
class Constant:
    name: str

    def __post_init__(self):
        if not self.name:
            raise TermError("empty constant name")

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __post_init__(self):
        if not self.name:
            raise TermError("empty variable name")

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Number:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True, slots=True)
class StateExpr:
    """``base + offset`` where ``base`` is a state variable (``T+1``, ``T-1``)."""

    base: Variable
    offset: int

    def __post_init__(self):
        if self.offset == 0 or abs(self.offset) > MAX_STATE_OFFSET:
            raise TermError(f"state offset must be +1 or -1, got {self.offset}")

    def __str__(self):
        sign = "+" if self.offset > 0 else "-"
        return f"{self.base}{sign}{abs(self.offset)}"


@dataclass(frozen=True, slots=True)
class Combine:
    base: "Term"
    arg: "Term"

    def __str__(self):
        return f"combine({self.base}, {self.arg})"

    @property
    def depth(self) -> int:
        return 1 + (self.base.depth if isinstance(self.base, Combine) else 0)


Term = Union[Constant, Variable, Number, StateExpr, Combine]


def combine(base, arg) -> Combine:
    """Build the complex property ``Combine(base, arg)``.

    ``base`` must be a property (constant, variable or combine); nesting
    deeper than two levels is refused.
    """
    if not isinstance(base, (Constant, Variable, Combine)):
        raise TermError(f"combine base must be a property, got {base}")
    if isinstance(arg, Combine):
        raise TermError(f"combine argument must be a simple term, got {arg}")
    if isinstance(base, Combine) and base.depth >= MAX_COMBINE_DEPTH:
        raise TermError(f"combine nesting deeper than {MAX_COMBINE_DEPTH}: {base}")
    return Combine(base, arg)


def property_name(prop) -> str | None:
    """Outermost atomic name of a property, or None when it is a variable."""
    while isinstance(prop, Combine):
        prop = prop.base
    if isinstance(prop, Constant):
        return prop.name
    return None


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: str
    args: tuple

    def __post_init__(self):
        if self.predicate in MODALITIES and len(self.args) != 3:
            raise TermError(f"{self.predicate} takes (property, agent, state), got {len(self.args)} arguments")

    @property
    def is_modal(self) -> bool:
        return self.predicate in MODALITIES

    @property
    def prop(self):
        return self.args[0]

    @property
    def agent(self):
        return self.args[1]

    @property
    def state(self):
        return self.args[2]

    def __str__(self):
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(map(str, self.args))})"


@dataclass(frozen=True, slots=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self):
        return str(self.atom) if self.positive else f"-{self.atom}"


@dataclass(frozen=True, slots=True)
class Not:
    """Negation as failure over a literal; only meaningful in rule bodies."""

    literal: Literal

    def __str__(self):
        return f"not {self.literal}"


def holds(prop, agent, state) -> Literal:
    return Literal(Atom("holds", (prop, agent, state)))


def must(prop, agent, state) -> Literal:
    return Literal(Atom("must", (prop, agent, state)))


def able_to(prop, agent, state) -> Literal:
    return Literal(Atom("able_to", (prop, agent, state)))


def static(predicate: str, *args) -> Literal:
    return Literal(Atom(predicate, tuple(args)))


def complement(lit: Literal) -> Literal:
    return Literal(lit.atom, not lit.positive)


def neg(lit: Literal) -> Literal:
    return complement(lit)


# -- variables and substitution ------------------------------------------------

def term_vars(term) -> set[str]:
    if isinstance(term, Variable):
        return {term.name}
    if isinstance(term, StateExpr):
        return {term.base.name}
    if isinstance(term, Combine):
        return term_vars(term.base) | term_vars(term.arg)
    return set()


def variables(item) -> set[str]:
    """Variable names occurring in a term, atom, literal or NAF literal."""
    if isinstance(item, Not):
        return variables(item.literal)
    if isinstance(item, Literal):
        return variables(item.atom)
    if isinstance(item, Atom):
        out: set[str] = set()
        for a in item.args:
            out |= term_vars(a)
        return out
    return term_vars(item)


def is_ground(item) -> bool:
    return not variables(item)


Substitution = Mapping[str, Term]


def substitute_term(term, s: Substitution, max_state: int | None = None):
    if isinstance(term, Variable):
        try:
            return s[term.name]
        except KeyError:
            raise UnboundVariable(term.name) from None
    if isinstance(term, StateExpr):
        try:
            base = s[term.base.name]
        except KeyError:
            raise UnboundVariable(term.base.name) from None
        if not isinstance(base, Number):
            raise TermError(f"state arithmetic on non-numeric value {base}")
        value = base.value + term.offset
        if value < 1 or (max_state is not None and value > max_state):
            raise StateOutOfRange(value)
        return Number(value)
    if isinstance(term, Combine):
        return Combine(substitute_term(term.base, s, max_state), substitute_term(term.arg, s, max_state))
    return term


def apply_substitution(item, s: Substitution, max_state: int | None = None):
    """Replace every variable of ``item`` using ``s``.

    Works on terms, atoms, literals, NAF literals and rules (anything with a
    ``substitute`` method).  Raises :class:`UnboundVariable` for a variable
    missing from ``s`` and :class:`StateOutOfRange` when state arithmetic
    leaves ``[1, max_state]``.
    """
    if isinstance(item, Not):
        return Not(apply_substitution(item.literal, s, max_state))
    if isinstance(item, Literal):
        return Literal(apply_substitution(item.atom, s, max_state), item.positive)
    if isinstance(item, Atom):
        return Atom(item.predicate, tuple(substitute_term(a, s, max_state) for a in item.args))
    if hasattr(item, "substitute"):
        return item.substitute(s, max_state)
    return substitute_term(item, s, max_state)


# -- matching ---------------------------------------------------------------

def match_term(pattern, value, s: dict) -> dict | None:
    """One-way match of ``pattern`` against ground ``value``, extending ``s``."""
    if isinstance(pattern, Variable):
        bound = s.get(pattern.name)
        if bound is None:
            s = dict(s)
            s[pattern.name] = value
            return s
        return s if bound == value else None
    if isinstance(pattern, StateExpr):
        if not isinstance(value, Number):
            return None
        bound = s.get(pattern.base.name)
        if bound is None:
            base = value.value - pattern.offset
            if base < 1:
                return None
            s = dict(s)
            s[pattern.base.name] = Number(base)
            return s
        if isinstance(bound, Number) and bound.value + pattern.offset == value.value:
            return s
        return None
    if isinstance(pattern, Combine):
        if not isinstance(value, Combine):
            return None
        s2 = match_term(pattern.base, value.base, s)
        return None if s2 is None else match_term(pattern.arg, value.arg, s2)
    return s if pattern == value else None


def match_atom(pattern: Atom, value: Atom, s: dict) -> dict | None:
    if pattern.predicate != value.predicate or len(pattern.args) != len(value.args):
        return None
    for p, v in zip(pattern.args, value.args):
        s = match_term(p, v, s)
        if s is None:
            return None
    return s


def match_literal(pattern: Literal, value: Literal, s: dict | None = None) -> dict | None:
    if pattern.positive != value.positive:
        return None
    return match_atom(pattern.atom, value.atom, {} if s is None else s)


# -- ordering and rendering ----------------------------------------------------

def term_key(term) -> tuple:
    if isinstance(term, Number):
        return (0, term.value)
    if isinstance(term, Constant):
        return (1, term.name)
    if isinstance(term, Variable):
        return (2, term.name)
    if isinstance(term, StateExpr):
        return (3, term.base.name, term.offset)
    return (4, term_key(term.base), term_key(term.arg))


def literal_key(lit: Literal) -> tuple:
    return (lit.atom.predicate, tuple(term_key(a) for a in lit.atom.args), not lit.positive)


def render_symbol(name: str) -> str:
    if name == NARRATOR:
        return "B"
    return "_".join(part[:1].upper() + part[1:] for part in name.split("_"))


def render_term(term) -> str:
    if isinstance(term, Constant):
        return render_symbol(term.name)
    if isinstance(term, Combine):
        return f"Combine({render_term(term.base)}, {render_term(term.arg)})"
    return str(term)


_MODAL_NAMES = {"holds": "Holds", "must": "Must", "able_to": "AbleTo", "an": "An", "dan": "DAn"}


def pretty(item) -> str:
    """Human-oriented rendering, e.g. ``-Holds(Stop, A, 2)``."""
    if isinstance(item, Not):
        return f"not {pretty(item.literal)}"
    if isinstance(item, Literal):
        return pretty(item.atom) if item.positive else f"-{pretty(item.atom)}"
    if isinstance(item, Atom):
        name = _MODAL_NAMES.get(item.predicate, render_symbol(item.predicate))
        if not item.args:
            return name
        return f"{name}({', '.join(render_term(a) for a in item.args)})"
    return render_term(item)
