"""Stratified default-logic engine for norm-based cause detection.

The pipeline turns linguistic facts from an accident report into semantic
``holds`` facts, runs a stratified rule base of norms over them and reports
the anomaly taken as the cause::

    >>> from normengine import RunConfig, run_pipeline, fixture_paths
    >>> fx = [p for p in fixture_paths() if p.name == "worked_example.nfx"][0]
    >>> run_pipeline(RunConfig(facts=str(fx))).report.cause_sentence
    'A did not stop in a situation in which it had to'
"""

__version__ = "0.1.0"

from .terms import (
    NARRATOR, Atom, Combine, Constant, Literal, Not, Number, StateExpr, TermError, Variable,
    able_to, combine, complement, holds, match_literal, must, pretty, static,
)
from .dsl import (
    ParseDiagnostic, ParseError, Program, Rule, RuleKind, load_program, parse_literal,
    parse_program, serialize_program, validate_program,
)
from .stratify import StratificationDiagnostic, StratificationError, StratumAssignment, dependency_graph, stratify
from .engine import (
    Database, GroundingError, GroundProgram, InconsistencyError, TraceNode, ground, query, run_stratified,
)
from .oracle import OracleLimitError, check_extension, reiter_extensions
from .crash import LinguisticFactSet, domain_rules, fixture_paths, linguistic_rules, load_fixture, map_linguistic
from .report import AnomalyReport, Anomaly, RunConfig, explain, run_pipeline, select_primary

__all__ = [
    "NARRATOR", "Anomaly", "AnomalyReport", "Atom", "Combine", "Constant", "Database", "GroundProgram",
    "GroundingError", "InconsistencyError", "LinguisticFactSet", "Literal", "Not", "Number", "OracleLimitError",
    "ParseDiagnostic", "ParseError", "Program", "Rule", "RuleKind", "RunConfig", "StateExpr",
    "StratificationDiagnostic", "StratificationError", "StratumAssignment", "TermError", "TraceNode", "Variable",
    "able_to", "check_extension", "combine", "complement", "dependency_graph", "domain_rules", "explain",
    "fixture_paths", "ground", "holds", "linguistic_rules", "load_fixture", "load_program", "map_linguistic",
    "match_literal", "must", "parse_literal", "parse_program", "pretty", "query", "reiter_extensions",
    "run_pipeline", "run_stratified", "select_primary", "serialize_program", "static", "stratify",
    "validate_program",
]
