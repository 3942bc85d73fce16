"""Brute-force Reiter extensions for small ground theories.

Implications act as inference rules (no contraposition) and a justification
is consistent with a literal set when its complement is absent.  A NAF body
literal ``not l`` is read as the justification "l is not believed".

Every extension is generated by the conclusions of some subset of the
defaults, so enumerating subsets and keeping the fixed points of the Reiter
operator is complete.  This is exponential and only meant for desk-scale
cross-checks of :func:`normengine.engine.run_stratified`.
"""

from __future__ import annotations

from .engine import Database, GroundProgram, GroundRule
from .terms import Literal, complement, literal_key

MAX_DEFAULTS = 12
MAX_ATOMS = 64


class OracleLimitError(ValueError):
    pass


def _is_defeasible(inst: GroundRule) -> bool:
    return inst.is_default or bool(inst.rule.naf_body)


def _consistent(lits) -> bool:
    return not any(complement(l) in lits for l in lits)


def _applicable(inst: GroundRule, context: frozenset) -> bool:
    r = inst.rule
    justs = r.justifications
    if any(complement(j) in justs for j in justs):
        return False
    if any(complement(j) in context for j in justs):
        return False
    return not any(n in context for n in r.naf_body)


def _fires(inst: GroundRule, current: set) -> bool:
    return all(b in current for b in inst.rule.positive_body)


def _close(base, implications) -> set:
    out = set(base)
    changed = True
    while changed:
        changed = False
        for i in implications:
            if i.rule.head not in out and _fires(i, out):
                out.add(i.rule.head)
                changed = True
    return out


def reiter_operator(context, g: GroundProgram) -> set:
    """Least set closed under facts, implications and the defaults whose
    justifications are consistent with ``context``."""
    context = frozenset(context)
    strict = [i for i in g.instances if not _is_defeasible(i)]
    usable = [i for i in g.instances if _is_defeasible(i) and _applicable(i, context)]
    out = set(g.facts)
    changed = True
    while changed:
        changed = False
        for i in strict + usable:
            if i.rule.head not in out and _fires(i, out):
                out.add(i.rule.head)
                changed = True
    return out


def check_extension(db, g: GroundProgram) -> bool:
    lits = frozenset(db.literals if isinstance(db, Database) else db)
    if not _consistent(lits):
        return False
    return reiter_operator(lits, g) == lits


def reiter_extensions(g: GroundProgram, max_defaults: int = MAX_DEFAULTS, max_atoms: int = MAX_ATOMS) -> list[frozenset]:
    """All consistent Reiter extensions of ``g``, in a canonical order."""
    defaults = [i for i in g.instances if _is_defeasible(i)]
    strict = [i for i in g.instances if not _is_defeasible(i)]
    if len(defaults) > max_defaults:
        raise OracleLimitError(f"{len(defaults)} defaults exceed the oracle limit of {max_defaults}")
    n_atoms = len(g.atoms())
    if n_atoms > max_atoms:
        raise OracleLimitError(f"{n_atoms} ground atoms exceed the oracle limit of {max_atoms}")

    found: dict[frozenset, None] = {}
    for mask in range(1 << len(defaults)):
        chosen = [d.rule.head for k, d in enumerate(defaults) if mask >> k & 1]
        candidate = frozenset(_close(list(g.facts) + chosen, strict))
        if candidate in found or not _consistent(candidate):
            continue
        if reiter_operator(candidate, g) == candidate:
            found[candidate] = None
    return sorted(found, key=lambda e: sorted(literal_key(l) for l in e))


def describe(extension) -> list[str]:
    return [str(l) for l in sorted(extension, key=literal_key)]


__all__ = ["MAX_ATOMS", "MAX_DEFAULTS", "OracleLimitError", "check_extension", "describe", "reiter_extensions", "reiter_operator"]
