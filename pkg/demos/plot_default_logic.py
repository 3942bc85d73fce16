"""
Defaults, extensions and the oracle
===================================

The engine commits to one extension of a default theory by firing defaults
in a fixed order.  The oracle enumerates every extension by brute force, so
small theories can be checked against it.
"""

from normengine import check_extension, ground, parse_program, reiter_extensions, run_stratified, stratify
from normengine.oracle import describe


def show(text):
    p = parse_program(text)
    s, diags = stratify(p)
    g = ground(p, s)
    db = run_stratified(g, s)
    print(text.strip())
    print("  engine:", describe(db.literals), "extension:", check_extension(db, g))
    for e in reiter_extensions(g):
        print("  oracle:", describe(e))


# Two normal defaults in conflict: two extensions, and the engine picks the
# one whose default comes first by label.
show("#predicate a/0. @d1 : a. @d2 : -a.")

# A semi-normal default also needs its constraint to stay consistent.
show("#predicate bird/0, flies/0, penguin/0. bird. -penguin. bird : flies [-penguin].")
show("#predicate bird/0, flies/0, penguin/0. bird. penguin. bird : flies [-penguin].")

# Negation as failure reads "not derived".
show("#predicate a/0, b/0. not a : b.")

###############################################################################
# A theory that cannot be evaluated without retraction
# ----------------------------------------------------
# Here ``c`` must be settled before ``b``, yet ``c`` follows from ``b``.

from normengine import StratificationError  # noqa: E402

try:
    stratify(parse_program("#predicate a/0, b/0, c/0. a : b [c]. b => c."))
except StratificationError as e:
    print(e)
