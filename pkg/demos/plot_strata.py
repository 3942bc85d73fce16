"""
Strata of the crash rule base
=============================

Predicates are grouped first by modality (facts, duties, capacities,
anomalies) and then ordered inside each layer by their dependencies.
"""

from normengine import domain_rules, stratify
from normengine.stratify import dependency_graph

kb = domain_rules()
s, diagnostics = stratify(kb)
print(s.format_text())
print("diagnostics:", diagnostics)

# Strict edges come from semi-normal constraints and negation as failure.
g = dependency_graph(kb)
for (src, dst), kind in sorted(g.edges.items(), key=lambda e: (str(e[0][0]), str(e[0][1]))):
    if kind == "strict":
        print(f"{src} -> {dst}  ({', '.join(sorted(set(g.origins[(src, dst)])))})")
