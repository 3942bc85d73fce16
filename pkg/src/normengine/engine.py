"""Grounding and stratum-by-stratum forward chaining with default checks.

The run is deterministic: strata are visited in evaluation order; inside a
stratum, implications are closed first, then defaults are scanned by
(rule label, substitution) and every applicable one fires.  The two steps
repeat until a scan fires nothing.  Conclusions are never retracted; an
attempt to insert the complement of a known literal aborts the run.
"""

from __future__ import annotations

import json
import os
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator

from .dsl import Program, Rule, RuleKind
from .stratify import StratumAssignment, key_of
from .terms import (
    Atom,
    Combine,
    Literal,
    Not,
    Number,
    StateOutOfRange,
    apply_substitution,
    complement,
    is_ground,
    literal_key,
    match_literal,
    match_term,
    term_key,
    variables,
)

DEFAULT_INSTANCE_CAP = 100_000
CAP_ENV = "NORMENGINE_INSTANCE_CAP"

INPUT_FACT = "input-fact"


class GroundingError(RuntimeError):
    pass


class InconsistencyError(RuntimeError):
    """Raised when a derivation clashes with an existing literal."""

    def __init__(self, existing: "TraceNode", attempted: "TraceNode"):
        self.existing = existing
        self.attempted = attempted
        super().__init__(f"{attempted.literal} (by {attempted.rule or attempted.origin}) contradicts "
                         f"{existing.literal} (by {existing.rule or existing.origin})")


def instance_cap() -> int:
    value = os.environ.get(CAP_ENV)
    return int(value) if value else DEFAULT_INSTANCE_CAP


@dataclass(frozen=True)
class GroundRule:
    rule: Rule  # fully ground copy of the source rule
    substitution: tuple  # ((var, value), ...) sorted by variable name
    position: tuple[int, int]

    @property
    def label(self) -> str:
        return self.rule.label

    @property
    def kind(self) -> RuleKind:
        return self.rule.kind

    @property
    def is_default(self) -> bool:
        return self.rule.is_default

    def __str__(self):
        binding = ", ".join(f"{k}={v}" for k, v in self.substitution)
        return f"{self.rule} {{{binding}}}"


@dataclass(frozen=True)
class GroundProgram:
    facts: tuple[Literal, ...]
    instances: tuple[GroundRule, ...]
    t_max: int
    agents: tuple
    properties: tuple

    @property
    def defaults(self) -> tuple[GroundRule, ...]:
        return tuple(i for i in self.instances if i.is_default)

    @property
    def implications(self) -> tuple[GroundRule, ...]:
        return tuple(i for i in self.instances if not i.is_default)

    def atoms(self) -> set:
        out = {f.atom for f in self.facts}
        for i in self.instances:
            r = i.rule
            out.update((b.literal if isinstance(b, Not) else b).atom for b in r.body)
            out.add(r.head.atom)
            if r.constraint is not None:
                out.add(r.constraint.atom)
        return out


def _max_state(literals: Iterable[Literal]) -> int:
    best = 0

    def visit(t):
        nonlocal best
        if isinstance(t, Number):
            best = max(best, t.value)
        elif isinstance(t, Combine):
            visit(t.base)
            visit(t.arg)

    for lit in literals:
        for a in lit.atom.args:
            visit(a)
    return best


class _Index:
    def __init__(self, literals=()):
        self.by_pred = defaultdict(list)
        self.members = set()
        for lit in literals:
            self.add(lit)

    def add(self, lit) -> bool:
        if lit in self.members:
            return False
        self.members.add(lit)
        self.by_pred[(lit.atom.predicate, lit.positive)].append(lit)
        return True

    def candidates(self, pattern: Literal):
        return self.by_pred.get((pattern.atom.predicate, pattern.positive), ())


def _matches(body: tuple[Literal, ...], index: _Index, s: dict | None = None) -> Iterator[dict]:
    s = {} if s is None else s
    if not body:
        yield s
        return
    first, rest = body[0], body[1:]
    for cand in list(index.candidates(first)):
        s2 = match_literal(first, cand, s)
        if s2 is not None:
            yield from _matches(rest, index, s2)


def _instantiate(rule: Rule, s: dict, max_state) -> Rule | None:
    try:
        return rule.substitute(s, max_state)
    except StateOutOfRange:
        return None


def _schema_instances(schema: Literal, values) -> list[Literal]:
    options = []
    for arg in schema.atom.args:
        if is_ground(arg):
            options.append([arg])
        else:
            options.append([v for v in values if match_term(arg, v, {}) is not None])
    out = []

    def rec(i, s, args):
        if i == len(options):
            out.append(Literal(Atom(schema.atom.predicate, tuple(args)), schema.positive))
            return
        for v in options[i]:
            s2 = match_term(schema.atom.args[i], v, s)
            if s2 is not None:
                rec(i + 1, s2, args + [v])

    rec(0, {}, [])
    return out


def _subst_key(s: dict) -> tuple:
    return tuple((k, term_key(s[k])) for k in sorted(s))


def ground(p: Program, s: StratumAssignment, cap: int | None = None) -> GroundProgram:
    """Instantiate every rule over the finite domain drawn from the facts.

    Substitutions are taken from an over-approximation of the derivable
    literals (justifications and negation as failure ignored), so only
    instances whose body could ever hold are produced.  State arithmetic that
    leaves ``[1, t_max]`` drops the instance.
    """
    cap = instance_cap() if cap is None else cap
    facts = [f for f in p.facts + p.static_facts if is_ground(f)]
    schemas = list(p.schemas)
    if not facts and any(not is_ground(r.head) or any(variables(b) for b in r.body) for r in p.rules):
        raise GroundingError("empty domain: the program has rules with variables but no facts")
    t_max = _max_state(facts)
    max_state = t_max if t_max >= 1 else None

    possible = _Index(facts)
    seen_schema_facts: set[Literal] = set()
    while True:
        changed = True
        while changed:
            changed = False
            for r in p.rules:
                for sub in list(_matches(r.positive_body, possible)):
                    inst = _instantiate(r, sub, max_state)
                    if inst is not None and possible.add(inst.head):
                        changed = True
        props = sorted({l.atom.prop for l in possible.members if l.atom.is_modal}, key=term_key)
        new = []
        for sch in schemas:
            for lit in _schema_instances(sch, props):
                if lit not in seen_schema_facts:
                    seen_schema_facts.add(lit)
                    new.append(lit)
        if not new:
            break
        for lit in new:
            facts.append(lit)
            possible.add(lit)

    ordered = sorted(enumerate(p.rules), key=lambda ir: (s.position(key_of(ir[1].head)), ir[0]))
    instances = []
    for _, r in ordered:
        pos = s.position(key_of(r.head))
        subs = {_subst_key(sub): sub for sub in _matches(r.positive_body, possible)}
        for k in sorted(subs):
            inst = _instantiate(r, subs[k], max_state)
            if inst is None:
                continue
            instances.append(GroundRule(inst, tuple((name, subs[k][name]) for name in sorted(subs[k])), pos))
            if len(instances) > cap:
                raise GroundingError(f"grounding exceeded the instance cap of {cap}")

    agents = sorted({l.atom.agent for l in possible.members if l.atom.is_modal}, key=term_key)
    properties = sorted({l.atom.prop for l in possible.members if l.atom.is_modal}, key=term_key)
    return GroundProgram(tuple(facts), tuple(instances), t_max, tuple(agents), tuple(properties))


# -- evaluation ------------------------------------------------------------

@dataclass(frozen=True)
class TraceNode:
    id: int
    literal: Literal
    origin: str
    rule: str | None
    premises: tuple[int, ...]
    checked: tuple  # justifications / NAF literals verified at firing time
    stratum: tuple[int, int]
    step: int

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "literal": str(self.literal),
            "origin": self.origin,
            "rule": self.rule,
            "premises": list(self.premises),
            "checked": [str(c) for c in self.checked],
            "stratum": list(self.stratum),
            "step": self.step,
        }


class Database:
    """Ground literals of a finished run, with their derivation trace."""

    def __init__(self, nodes: list[TraceNode]):
        self.nodes = tuple(nodes)
        self._by_literal = {n.literal: n for n in nodes}
        self._index = defaultdict(list)
        for n in nodes:
            a = n.literal.atom
            state = a.state if a.is_modal else None
            self._index[(a.predicate, key_of(n.literal).name, state)].append(n.literal)
        self.consistent = True

    def __contains__(self, lit) -> bool:
        return lit in self._by_literal

    def __iter__(self):
        return (n.literal for n in self.nodes)

    def __len__(self):
        return len(self.nodes)

    @property
    def literals(self) -> frozenset:
        return frozenset(self._by_literal)

    def node(self, lit: Literal) -> TraceNode:
        return self._by_literal[lit]

    def derived(self) -> list[Literal]:
        """Literals produced by rules, in derivation order."""
        return [n.literal for n in self.nodes if n.origin != INPUT_FACT]

    def lookup(self, predicate: str, name: str, state=None) -> list[Literal]:
        return list(self._index.get((predicate, name, state), ()))

    def trace_json(self) -> list[dict]:
        return [n.to_json() for n in self.nodes]


def run_stratified(g: GroundProgram, s: StratumAssignment) -> Database:
    """Evaluate the ground program stratum by stratum; see the module docstring."""
    db: dict[Literal, TraceNode] = {}
    nodes: list[TraceNode] = []

    def insert(lit, origin, rule, premises, checked, pos):
        node = TraceNode(len(nodes), lit, origin, rule, tuple(db[p].id for p in premises), tuple(checked), pos, len(nodes))
        clash = db.get(complement(lit))
        if clash is not None:
            raise InconsistencyError(clash, node)
        db[lit] = node
        nodes.append(node)

    for f in g.facts:
        if f not in db:
            insert(f, INPUT_FACT, None, (), (), s.position(key_of(f)))

    by_pos = defaultdict(list)
    for inst in g.instances:
        by_pos[inst.position].append(inst)

    def body_holds(inst):
        r = inst.rule
        return all(b in db for b in r.positive_body) and all(n not in db for n in r.naf_body)

    for pos in sorted(by_pos):
        insts = by_pos[pos]
        impls = [i for i in insts if not i.is_default]
        defaults = sorted((i for i in insts if i.is_default), key=lambda i: (i.label, _ground_key(i)))
        while True:
            changed = True
            while changed:
                changed = False
                for i in impls:
                    if i.rule.head not in db and body_holds(i):
                        insert(i.rule.head, i.kind.value, i.label, i.rule.positive_body,
                               [Not(n) for n in i.rule.naf_body], pos)
                        changed = True
            fired = False
            for d in defaults:
                r = d.rule
                if r.head in db or not body_holds(d):
                    continue
                if any(complement(j) in db for j in r.justifications):
                    continue
                insert(r.head, d.kind.value, d.label, r.positive_body,
                       list(r.justifications) + [Not(n) for n in r.naf_body], pos)
                fired = True
            if not fired:
                break
    return Database(nodes)


def _ground_key(inst: GroundRule):
    return tuple((k, term_key(v)) for k, v in inst.substitution)


def query(db: Database, pattern: Literal) -> list[Literal]:
    """Ground literals of ``db`` matching ``pattern``, in canonical order."""
    return sorted((l for l in db if match_literal(pattern, l) is not None), key=literal_key)


def trace_dumps(db: Database) -> str:
    return json.dumps({"schema_version": 1, "nodes": db.trace_json()}, indent=2)
