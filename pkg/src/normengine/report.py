"""Anomaly selection, cause reports and derivation explanations."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .crash import domain_rules, linguistic_rules, load_fixture, map_linguistic
from .dsl import ParseError, Program, load_program, validate_program
from .engine import INPUT_FACT, Database, GroundProgram, ground, instance_cap, run_stratified
from .oracle import OracleLimitError, check_extension, reiter_extensions
from .stratify import StratificationError, StratumAssignment, stratify
from .terms import Atom, Combine, Literal, Number, match_literal, pretty, render_term, term_key

SCHEMA_VERSION = 1
SELECTION_RULE = ("primary anomaly = the An fact with the earliest state, ties broken by agent then "
                  "property; every other An and all DAn facts are listed as derived, by state")

FORM1, FORM2, DERIVED = "form1", "form2", "derived"

DUTY_PHRASES = {
    "stop": "stop",
    "control": "keep control",
    "run_slowly_enough": "run slowly enough",
    "start": "start",
    "move_back": "move back",
}


@dataclass(frozen=True)
class Anomaly:
    kind: str  # "an" | "dan"
    agent: object
    state: int
    property: object
    schema: str | None = None
    observation: Literal | None = None
    rule: str | None = None

    @property
    def literal(self) -> Literal:
        return Literal(Atom(self.kind, (self.agent, Number(self.state), self.property)))

    def sort_key(self):
        return (self.state, term_key(self.agent), term_key(self.property), self.kind)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "schema": self.schema,
            "agent": render_term(self.agent),
            "state": self.state,
            "property": str(self.property),
            "observation": None if self.observation is None else pretty(self.observation),
            "rule": self.rule,
            "literal": pretty(self.literal),
        }


@dataclass
class AnomalyReport:
    primary: Anomaly | None
    derived: list[Anomaly]
    cause_sentence: str
    consequences: list[str] = field(default_factory=list)
    source: str | None = None
    semantic_facts: list[Literal] = field(default_factory=list)
    derived_literals: list[Literal] = field(default_factory=list)
    oracle: dict | None = None
    trace_ref: list[dict] | None = None

    def to_json(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "selection_rule": SELECTION_RULE,
            "source": self.source,
            "semantic_facts": [pretty(f) for f in self.semantic_facts],
            "derived_literals": [pretty(l) for l in self.derived_literals],
            "primary": None if self.primary is None else self.primary.to_json(),
            "derived": [a.to_json() for a in self.derived],
            "cause_sentence": self.cause_sentence,
            "consequences": self.consequences,
        }
        if self.oracle is not None:
            doc["oracle"] = self.oracle
        if self.trace_ref is not None:
            doc["trace"] = self.trace_ref
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n"

    def format_text(self) -> str:
        lines = [f"Report: {self.source}" if self.source else "Report",
                 f"Selection rule: {SELECTION_RULE}.",
                 f"Cause: {self.cause_sentence}."]
        if self.primary is not None:
            lines.append(f"Primary anomaly: {_describe(self.primary)}")
        if self.derived:
            lines.append("Derived anomalies:")
            lines.extend(f"  {_describe(a)}" for a in self.derived)
            lines.extend(f"  - {c}." for c in self.consequences)
        else:
            lines.append("Derived anomalies: none")
        if self.oracle is not None:
            lines.append(f"Oracle: extension check {'passed' if self.oracle['is_extension'] else 'FAILED'}"
                         + ("" if self.oracle.get("extensions") is None else f" ({self.oracle['extensions']} extension(s))"))
        return "\n".join(lines) + "\n"


def _describe(a: Anomaly) -> str:
    extra = [a.schema or "input", f"rule {a.rule}" if a.rule else None,
             f"observed {pretty(a.observation)}" if a.observation is not None else None]
    return f"{pretty(a.literal)} [{'; '.join(x for x in extra if x)}]"


def select_primary(anomalies) -> tuple:
    """Split anomalies into (primary or None, derived list).

    Accepts :class:`Anomaly` records or ground ``an``/``dan`` literals.
    """
    records = [a if isinstance(a, Anomaly) else _from_literal(a) for a in anomalies]
    primaries = sorted((a for a in records if a.kind == "an"), key=Anomaly.sort_key)
    primary = primaries[0] if primaries else None
    derived = sorted((a for a in records if a is not primary), key=Anomaly.sort_key)
    return primary, derived


def _from_literal(lit: Literal, **extra) -> Anomaly:
    agent, state, prop = lit.atom.args
    return Anomaly(lit.atom.predicate, agent, state.value, prop, **extra)


def _duty_phrase(prop) -> str:
    return DUTY_PHRASES.get(str(prop), str(prop).replace("_", " "))


def cause_sentence(primary: Anomaly | None) -> str:
    if primary is None:
        return "no cause identified"
    agent = render_term(primary.agent)
    if isinstance(primary.property, Combine) and str(primary.property.base) == "disruptive_factor":
        return f"a disruptive factor ({primary.property.arg}) affected {agent}"
    return f"{agent} did not {_duty_phrase(primary.property)} in a situation in which it had to"


def consequence_sentence(a: Anomaly) -> str:
    agent = render_term(a.agent)
    if a.kind == "dan":
        return f"{agent} could not {_duty_phrase(a.property)} as a consequence"
    if isinstance(a.property, Combine) and str(a.property.base) == "disruptive_factor":
        return f"a disruptive factor ({a.property.arg}) also affected {agent} at state {a.state}"
    return f"{agent} also did not {_duty_phrase(a.property)} at state {a.state}"


def collect_anomalies(db: Database, program: Program) -> list[Anomaly]:
    rules = {r.label: r for r in program.rules}
    out = []
    for node in db.nodes:
        lit = node.literal
        if not lit.positive or lit.atom.predicate not in ("an", "dan"):
            continue
        if node.origin == INPUT_FACT:
            out.append(_from_literal(lit))
            continue
        rule = rules.get(node.rule)
        premises = [db.nodes[i].literal for i in node.premises]
        state = lit.atom.args[1].value
        if lit.atom.predicate == "dan":
            schema = DERIVED
        elif rule is not None and any(b.atom.predicate == "must" for b in rule.positive_body):
            schema = FORM1
        else:
            schema = FORM2
        if schema == FORM2:
            observation = next((p for p in premises if p.atom.predicate == "holds"), None)
        else:
            observation = next((p for p in premises if p.atom.predicate == "holds" and p.atom.state.value == state + 1), None)
        out.append(_from_literal(lit, schema=schema, observation=observation, rule=node.rule))
    return out


def build_report(db: Database, program: Program, semantic_facts=(), source=None) -> AnomalyReport:
    primary, derived = select_primary(collect_anomalies(db, program))
    return AnomalyReport(
        primary=primary,
        derived=derived,
        cause_sentence=cause_sentence(primary),
        consequences=[consequence_sentence(a) for a in derived],
        source=source,
        semantic_facts=list(semantic_facts),
        derived_literals=db.derived(),
    )


# -- explanations ------------------------------------------------------------

def explain(db: Database, pattern: Literal) -> str:
    """Indented derivation trees for every literal of ``db`` matching ``pattern``."""
    hits = [n for n in db.nodes if match_literal(pattern, n.literal) is not None]
    if not hits:
        return f"{pretty(pattern)}: not derived\n"
    lines: list[str] = []

    def walk(node, depth):
        pad = "  " * depth
        if node.origin == INPUT_FACT:
            lines.append(f"{pad}{pretty(node.literal)}  <- input-fact")
            return
        checks = ""
        if node.checked:
            checks = f"; checked {', '.join(pretty(c) for c in node.checked)}"
        lines.append(f"{pad}{pretty(node.literal)}  <- {node.origin} {node.rule} "
                     f"@ L{node.stratum[0]}.{node.stratum[1]}, step {node.step}{checks}")
        for pid in node.premises:
            walk(db.nodes[pid], depth + 1)

    for n in hits:
        walk(n, 0)
    return "\n".join(lines) + "\n"


# -- pipeline -------------------------------------------------------------------

@dataclass
class RunConfig:
    kb: str | os.PathLike | None = None
    facts: str | os.PathLike | None = None
    linguistic_kb: str | os.PathLike | None = None
    output_format: str = "text"
    trace: bool = False
    verify_oracle: bool = False
    cap: int | None = None

    def __post_init__(self):
        for p in (self.kb, self.facts, self.linguistic_kb):
            if p is not None and not Path(p).exists():
                raise FileNotFoundError(p)
        if self.cap is not None and self.cap < 1:
            raise ValueError("instance cap must be >= 1")


@dataclass
class PipelineRun:
    report: AnomalyReport
    program: Program
    strata: StratumAssignment
    ground: GroundProgram
    database: Database


def prepare_kb(kb: Program) -> Program:
    """Reject a rule base with validation errors or stratification problems."""
    errors = [d for d in validate_program(kb) if d.severity == "error"]
    if errors:
        raise ParseError(errors)
    _, diags = stratify(kb)
    if diags:
        raise StratificationError(diags)
    return kb


def run_pipeline(cfg: RunConfig) -> PipelineRun:
    """Linguistic facts -> semantic facts -> stratified run -> cause report.

    Raises :class:`ParseError` / :class:`StratificationError` for static
    problems and :class:`InconsistencyError` when the run clashes.
    """
    kb = prepare_kb(load_program(cfg.kb) if cfg.kb else domain_rules())
    lkb = load_program(cfg.linguistic_kb) if cfg.linguistic_kb else linguistic_rules()
    lf = load_fixture(cfg.facts)
    facts = map_linguistic(lf, lkb)
    program = kb.with_facts(facts)
    strata, diags = stratify(program)
    if diags:
        raise StratificationError(diags)
    g = ground(program, strata, cap=cfg.cap if cfg.cap is not None else instance_cap())
    db = run_stratified(g, strata)
    report = build_report(db, program, facts, source=Path(cfg.facts).name)
    if cfg.verify_oracle:
        report.oracle = {"is_extension": check_extension(db, g), "extensions": _count_extensions(g)}
    if cfg.trace:
        report.trace_ref = db.trace_json()
    return PipelineRun(report, program, strata, g, db)


def _count_extensions(g: GroundProgram) -> int | None:
    # None when the theory is beyond the enumerator's desk-scale limits
    try:
        return len(reiter_extensions(g))
    except OracleLimitError:
        return None
