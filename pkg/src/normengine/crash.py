"""Car-crash domain: shipped rule bases and the linguistic front end.

A report arrives as linguistic predicates (``subject``, ``object``,
``qualif_n``, ``qualif_v``, ``compl_n``, ``compl_v``, ``support``) in a
``.nfx`` file, listed in text order.  :func:`map_linguistic` collapses
support verbs, numbers the clauses, turns temporal connectives into state
changes, resolves nouns to agents and runs the linguistic rule base to get
the semantic ``holds`` facts consumed by :func:`domain_rules`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from importlib import resources

from .dsl import DEFAULT_KERNEL, Program, load_program, parse_program
from .engine import ground, run_stratified
from .stratify import StratificationError, stratify
from .terms import NARRATOR, Atom, Constant, Literal, Number

LINGUISTIC_PREDICATES = ("subject", "object", "qualif_n", "qualif_v", "compl_n", "compl_v", "support")
TEMPORAL_CONNECTIVES = frozenset({"lorsque", "quand", "puis", "alors"})
NARRATOR_WORDS = frozenset({"j", "je", "m", "me", "moi"})

KERNEL = DEFAULT_KERNEL


class UnmappedLexemeWarning(UserWarning):
    pass


def data_path(name: str):
    return resources.files("normengine").joinpath("data").joinpath(name)


def domain_rules() -> Program:
    """The shipped norm base (``crash.nkb``)."""
    return parse_program(data_path("crash.nkb").read_text(encoding="utf-8"))


def linguistic_rules() -> Program:
    return parse_program(data_path("linguistic.nkb").read_text(encoding="utf-8"))


def fixture_paths() -> list:
    folder = data_path("fixtures")
    return sorted((p for p in folder.iterdir() if p.name.endswith(".nfx")), key=lambda p: p.name)


@dataclass(frozen=True)
class LinguisticFactSet:
    """Linguistic atoms in text order, each tagged with its clause number.

    ``verbs[i]`` is the verb heading clause ``i + 1``.  ``semantic`` holds
    any ready-made semantic facts found in the same file.
    """

    atoms: tuple[Atom, ...] = ()
    clauses: tuple[int, ...] = ()
    verbs: tuple[str, ...] = ()
    semantic: tuple[Literal, ...] = ()

    @classmethod
    def from_literals(cls, literals) -> "LinguisticFactSet":
        ling, semantic = [], []
        for lit in literals:
            if lit.atom.predicate in LINGUISTIC_PREDICATES and lit.positive:
                ling.append(lit.atom)
            else:
                semantic.append(lit)
        atoms = collapse_support(ling)
        verbs: list[str] = []

        def clause_of(verb) -> int:
            if verb not in verbs:
                verbs.append(verb)
            return verbs.index(verb) + 1

        clauses, current = [], 1
        for a in atoms:
            args = [str(x) for x in a.args]
            if a.predicate in ("subject", "object", "qualif_v"):
                current = clause_of(args[0])
            elif a.predicate == "compl_v":
                current = clause_of(args[1])
                if args[0] in TEMPORAL_CONNECTIVES:
                    clause_of(args[2])
            clauses.append(current)
        return cls(tuple(atoms), tuple(clauses), tuple(verbs), tuple(semantic))

    def __len__(self):
        return len(self.atoms)


def load_fixture(path) -> LinguisticFactSet:
    with open(path, encoding="utf-8") as fh:
        p = parse_program(fh.read())
    return LinguisticFactSet.from_literals(p.facts + p.static_facts)


def collapse_support(atoms) -> list[Atom]:
    """Fold ``support(S, V)``: every mention of the support verb S becomes V."""
    alias = {str(a.args[0]): a.args[1] for a in atoms if a.predicate == "support"}
    out = []
    for a in atoms:
        if a.predicate == "support":
            continue
        if a.predicate in ("subject", "object", "qualif_v") and str(a.args[0]) in alias:
            a = Atom(a.predicate, (alias[str(a.args[0])],) + a.args[1:])
        elif a.predicate == "compl_v":
            args = list(a.args)
            for i in (1, 2):
                if str(args[i]) in alias:
                    args[i] = alias[str(args[i])]
            a = Atom(a.predicate, tuple(args))
        out.append(a)
    return out


def segment_states(lf: LinguisticFactSet) -> dict[int, int]:
    """Clause number -> state number.

    The first clause is state 1.  A clause linked to an earlier one by a
    temporal connective sits one state after it; any other clause shares the
    state of the clause before it.
    """
    states: dict[int, int] = {}
    links = {}
    for a in lf.atoms:
        if a.predicate == "compl_v" and str(a.args[0]) in TEMPORAL_CONNECTIVES:
            links.setdefault(str(a.args[2]), str(a.args[1]))
    for i, verb in enumerate(lf.verbs, start=1):
        earlier = links.get(verb)
        if i == 1:
            states[i] = 1
        elif earlier in lf.verbs[: i - 1]:
            states[i] = states[lf.verbs.index(earlier) + 1] + 1
        else:
            states[i] = states[i - 1]
    return states


def resolve_agents(lf: LinguisticFactSet) -> dict[str, str]:
    """Noun lexeme -> agent constant (narrator, single-letter vehicle names)."""
    nouns: list[str] = []
    for a in lf.atoms:
        args = [str(x) for x in a.args]
        if a.predicate in ("subject", "object"):
            nouns.append(args[1])
        elif a.predicate == "qualif_n":
            nouns.append(args[0])
    letters = {}
    for a in lf.atoms:
        if a.predicate == "qualif_n" and len(str(a.args[1])) == 1:
            letters.setdefault(str(a.args[0]), str(a.args[1]))
    agents = {}
    for n in nouns:
        if n in NARRATOR_WORDS:
            agents[n] = NARRATOR
        elif n in letters:
            agents[n] = letters[n]
        elif len(n) == 1:
            agents[n] = n
    return agents


def map_linguistic(lf: LinguisticFactSet, rules: Program | None = None) -> list[Literal]:
    """Semantic facts for a report, ordered by state then derivation."""
    if not lf.atoms:
        return list(lf.semantic)
    rules = linguistic_rules() if rules is None else rules
    known = {str(f.atom.args[0]) for f in rules.static_facts if f.atom.predicate == "verb_class"}
    for verb in lf.verbs:
        if verb not in known:
            warnings.warn(f"unmapped verb lexeme {verb!r} skipped", UnmappedLexemeWarning, stacklevel=2)

    states = segment_states(lf)
    helpers = [Literal(Atom("state_of", (Constant(v), Number(states[i])))) for i, v in enumerate(lf.verbs, start=1)]
    helpers += [Literal(Atom("agent_of", (Constant(n), Constant(a)))) for n, a in sorted(resolve_agents(lf).items())]
    program = rules.with_facts([Literal(a) for a in lf.atoms] + helpers)
    strata, diags = stratify(program)
    if diags:
        raise StratificationError(diags)
    db = run_stratified(ground(program, strata), strata)
    produced = [(n.literal.atom.state.value, n.step, n.literal) for n in db.nodes
                if n.origin != "input-fact" and n.literal.atom.predicate == "holds"]
    return [lit for _, _, lit in sorted(produced, key=lambda x: x[:2])] + list(lf.semantic)


__all__ = [
    "KERNEL",
    "LinguisticFactSet",
    "UnmappedLexemeWarning",
    "collapse_support",
    "data_path",
    "domain_rules",
    "fixture_paths",
    "linguistic_rules",
    "load_fixture",
    "load_program",
    "map_linguistic",
    "resolve_agents",
    "segment_states",
]
