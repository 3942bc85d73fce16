"""
From a report to its cause
==========================

A driver writes: "J'etais a l'arret au feu rouge lorsque le vehicule A m'a
percute a l'arriere" (I was stopped at the red light when vehicle A hit me
from behind).  We follow it through every stage of the pipeline.
"""

from normengine import RunConfig, fixture_paths, parse_literal, pretty, run_pipeline
from normengine.crash import linguistic_rules, load_fixture, map_linguistic, segment_states
from normengine.report import explain

fixture = next(p for p in fixture_paths() if p.name == "worked_example.nfx")

# The input is nine shallow linguistic facts, in text order.
lf = load_fixture(fixture)
for atom in lf.atoms:
    print(atom)

# Two clauses joined by "lorsque": being stopped comes first, the bump after.
print(segment_states(lf))

# The linguistic rules turn them into semantic facts.  The narrator is B.
for fact in map_linguistic(lf, linguistic_rules()):
    print(pretty(fact))

###############################################################################
# Running the norms
# -----------------
# run_pipeline maps the facts, stratifies the rule base, grounds it and
# evaluates it stratum by stratum.

run = run_pipeline(RunConfig(facts=str(fixture)))
for lit in run.report.derived_literals:
    print(pretty(lit))

print(run.report.format_text())

###############################################################################
# Why must A stop at state 1?
# ---------------------------
# B was stopped, and A was following B.  The following relation itself was
# inferred at state 2 from the rear shock, then carried back to state 1.

print(explain(run.database, parse_literal("must(stop, a, 1)")))
