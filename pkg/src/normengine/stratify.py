"""Predicate dependency graph and (layer, sub-layer) stratification.

Layers are fixed by modality: static relations (0), factual ``holds`` (1),
duties ``must`` (2), capacities ``able_to`` plus ``available`` (3) and
anomalies (4).  Inside a layer, sub-layers are the longest-path levels of the
condensed dependency graph, so predicates with no dependency between them
share a sub-layer.

A weak edge lets body and head share a position; a strict edge (semi-normal
constraint, negation as failure) requires the source to come strictly
earlier.  Positions are compared as ``(layer, sublayer)`` tuples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

import networkx as nx

from .dsl import Program, Rule, RuleKind
from .terms import Literal, Not, property_name

LAYERS = {"static": 0, "holds": 1, "must": 2, "able_to": 3, "anomaly": 4}
LAYER_NAMES = {v: k for k, v in LAYERS.items()}
WILDCARD = "_"

WEAK = "weak"
STRICT = "strict"

BODY_AFTER_HEAD = "body-after-head"
CONSTRAINT_NOT_EARLIER = "constraint-not-earlier"
CYCLIC_STRICT = "cyclic-strict-dependency"


class PredicateKey(NamedTuple):
    modality: str
    name: str

    def __str__(self):
        return self.name if self.modality in ("holds", "static", "anomaly") else f"{self.modality}:{self.name}"


def key_of(lit) -> PredicateKey:
    if isinstance(lit, Not):
        lit = lit.literal
    atom = lit.atom if isinstance(lit, Literal) else lit
    if atom.is_modal:
        return PredicateKey(atom.predicate, property_name(atom.prop) or WILDCARD)
    if atom.predicate in ("an", "dan"):
        return PredicateKey("anomaly", atom.predicate)
    return PredicateKey("static", atom.predicate)


def layer_of(key: PredicateKey) -> int:
    if key == ("static", "available"):
        return LAYERS["able_to"]
    return LAYERS[key.modality]


def overlaps(a: PredicateKey, b: PredicateKey) -> bool:
    return a.modality == b.modality and (a.name == b.name or WILDCARD in (a.name, b.name))


@dataclass(frozen=True)
class StratificationDiagnostic:
    rules: tuple[str, ...]
    condition: str
    explanation: str

    def __str__(self):
        return f"{self.condition} [{', '.join(self.rules)}]: {self.explanation}"


class StratificationError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(map(str, self.diagnostics)))


@dataclass
class DependencyGraph:
    nodes: list[PredicateKey] = field(default_factory=list)
    # (src, dst) -> WEAK | STRICT; STRICT wins when both apply
    edges: dict[tuple[PredicateKey, PredicateKey], str] = field(default_factory=dict)
    # (src, dst) -> labels of rules inducing the edge
    origins: dict[tuple[PredicateKey, PredicateKey], list[str]] = field(default_factory=dict)
    # (implication label, default label, implication body key, head key)
    refutations: list[tuple[str, str, PredicateKey, PredicateKey]] = field(default_factory=list)

    def add_node(self, key):
        if key not in self._index:
            self._index[key] = len(self.nodes)
            self.nodes.append(key)

    def add_edge(self, src, dst, kind, label):
        if self.edges.get((src, dst)) != STRICT:
            self.edges[(src, dst)] = kind
        self.origins.setdefault((src, dst), []).append(label)

    def __post_init__(self):
        self._index = {k: i for i, k in enumerate(self.nodes)}

    def appearance(self, key) -> int:
        return self._index[key]


def _literals_of(rule: Rule):
    yield from (b.literal if isinstance(b, Not) else b for b in rule.body)
    if rule.constraint is not None:
        yield rule.constraint
    yield rule.head


def dependency_graph(p: Program) -> DependencyGraph:
    """Edges body -> head for every rule; self-edges are kept."""
    g = DependencyGraph()
    for r in p.rules:
        for lit in _literals_of(r):
            g.add_node(key_of(lit))
    for f in p.facts + p.static_facts:
        g.add_node(key_of(f))

    producers = {key_of(r.head) for r in p.rules} | {key_of(f) for f in p.facts + p.static_facts}

    def sources(key):
        # a wildcard node only feeds other keys when some clause can produce it
        return [n for n in g.nodes if n == key or (overlaps(n, key) and (n.name != WILDCARD or n in producers))]

    for r in p.rules:
        head = key_of(r.head)
        for b in r.body:
            kind = STRICT if isinstance(b, Not) else WEAK
            for src in sources(key_of(b)):
                g.add_edge(src, head, kind, r.label)
        if r.constraint is not None:
            for src in sources(key_of(r.constraint)):
                g.add_edge(src, head, STRICT, r.label)

    # An implication able to refute a default's conclusion must be saturated
    # before that default is tried: its body depends strictly on the head.
    for d in p.rules:
        if not d.is_default:
            continue
        dkey = key_of(d.head)
        for i in p.rules:
            if i.is_default or i.head.positive == d.head.positive or not overlaps(key_of(i.head), dkey):
                continue
            for b in i.positive_body:
                for src in sources(key_of(b)):
                    g.refutations.append((i.label, d.label, src, dkey))
    return g


@dataclass(frozen=True)
class StratumAssignment:
    layer: dict
    sublayer: dict
    order: tuple  # ((layer, sublayer), (keys...)) in evaluation order

    def position(self, key: PredicateKey) -> tuple[int, int]:
        if key in self.sublayer:
            return (self.layer[key], self.sublayer[key])
        candidates = [self.position(k) for k in self.sublayer if overlaps(k, key)]
        return max(candidates) if candidates else (layer_of(key), 0)

    def effective_position(self, key: PredicateKey) -> tuple[int, int]:
        """Latest position of any stratum that may produce literals of ``key``."""
        candidates = [self.position(k) for k in self.sublayer if overlaps(k, key)]
        return max(candidates) if candidates else self.position(key)

    def keys_at(self, pos) -> tuple:
        for p, keys in self.order:
            if p == pos:
                return keys
        return ()

    def to_json(self) -> dict:
        return {
            "strata": [
                {
                    "layer": pos[0],
                    "sublayer": pos[1],
                    "modality_layer": LAYER_NAMES[pos[0]],
                    "predicates": [{"modality": k.modality, "name": k.name} for k in keys],
                }
                for pos, keys in self.order
            ]
        }

    def format_text(self) -> str:
        return "\n".join(f"L{l}.{s}: {', '.join(map(str, keys))}" for (l, s), keys in self.order)


def compute_strata(g: DependencyGraph) -> StratumAssignment:
    """Condense each modality layer and number its components by longest path.

    Raises :class:`StratificationError` when a strict dependency lies inside
    a strongly connected component: such a program would need retraction.
    """
    diagnostics = []
    layer = {k: layer_of(k) for k in g.nodes}
    sublayer = {}
    for lay in sorted(set(layer.values())):
        members = [k for k in g.nodes if layer[k] == lay]
        graph = nx.DiGraph()
        graph.add_nodes_from(members)
        graph.add_edges_from((s, d) for (s, d) in g.edges if layer[s] == lay and layer[d] == lay)
        comp_of = {}
        for comp in nx.strongly_connected_components(graph):
            cid = min(g.appearance(k) for k in comp)
            for k in comp:
                comp_of[k] = cid

        for (s, d), kind in g.edges.items():
            if kind == STRICT and s in comp_of and d in comp_of and comp_of[s] == comp_of[d]:
                comp = sorted((k for k in members if comp_of[k] == comp_of[s]), key=g.appearance)
                diagnostics.append(StratificationDiagnostic(
                    tuple(sorted(set(g.origins[(s, d)]))),
                    CYCLIC_STRICT,
                    f"{s} must precede {d} strictly, but both lie in the cycle {{{', '.join(map(str, comp))}}}",
                ))
        for impl, default, src, head in g.refutations:
            if src in comp_of and head in comp_of and comp_of[src] == comp_of[head]:
                diagnostics.append(StratificationDiagnostic(
                    (impl, default),
                    CYCLIC_STRICT,
                    f"implication {impl} can refute default {default} through {src}, which is recursive with {head}",
                ))

        dag = nx.DiGraph()
        dag.add_nodes_from(set(comp_of.values()))
        dag.add_edges_from(
            (comp_of[s], comp_of[d]) for (s, d) in graph.edges if comp_of[s] != comp_of[d]
        )
        level = {}
        for c in nx.lexicographical_topological_sort(dag):
            level[c] = 1 + max((level[p] for p in dag.predecessors(c)), default=0)
        for k in members:
            sublayer[k] = level[comp_of[k]]

    if diagnostics:
        raise StratificationError(_dedupe(diagnostics))

    positions = sorted({(layer[k], sublayer[k]) for k in g.nodes})
    order = tuple(
        (pos, tuple(sorted((k for k in g.nodes if (layer[k], sublayer[k]) == pos), key=g.appearance)))
        for pos in positions
    )
    return StratumAssignment(layer, sublayer, order)


def check_constraints(p: Program, s: StratumAssignment) -> list[StratificationDiagnostic]:
    """Body no later than head; constraint and NAF atoms strictly earlier."""
    out = []
    for r in p.rules:
        head = s.position(key_of(r.head))
        for b in r.body:
            pos = s.effective_position(key_of(b))
            if isinstance(b, Not):
                if not pos < head:
                    out.append(StratificationDiagnostic(
                        (r.label,), CONSTRAINT_NOT_EARLIER,
                        f"negated-as-failure {b.literal} at {_fmt(pos)} is not before head {r.head} at {_fmt(head)}",
                    ))
            elif pos > head:
                out.append(StratificationDiagnostic(
                    (r.label,), BODY_AFTER_HEAD,
                    f"body literal {b} at {_fmt(pos)} comes after head {r.head} at {_fmt(head)}",
                ))
        if r.kind is RuleKind.SEMI_NORMAL:
            pos = s.effective_position(key_of(r.constraint))
            if not pos < head:
                out.append(StratificationDiagnostic(
                    (r.label,), CONSTRAINT_NOT_EARLIER,
                    f"constraint {r.constraint} at {_fmt(pos)} is not before head {r.head} at {_fmt(head)}",
                ))
    return out


def stratify(p: Program) -> tuple[StratumAssignment, list[StratificationDiagnostic]]:
    """Build the graph, compute strata and check every rule against them."""
    s = compute_strata(dependency_graph(p))
    return s, check_constraints(p, s)


def _fmt(pos):
    return f"L{pos[0]}.{pos[1]}"


def _dedupe(diags):
    seen, out = set(), []
    for d in diags:
        if (d.rules, d.condition, d.explanation) not in seen:
            seen.add((d.rules, d.condition, d.explanation))
            out.append(d)
    return out


def diagnostics_json(diags) -> list[dict]:
    return [{"rules": list(d.rules), "condition": d.condition, "explanation": d.explanation} for d in diags]


def dumps(s: StratumAssignment, diags=()) -> str:
    doc = s.to_json()
    doc["diagnostics"] = diagnostics_json(diags)
    return json.dumps(doc, indent=2)
