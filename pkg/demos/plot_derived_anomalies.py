"""
Primary and derived anomalies
=============================

When several anomalies are found, the earliest one is reported as the cause
and the others are listed as its consequences.
"""

from normengine import RunConfig, fixture_paths, run_pipeline

for name in ("disruptive_ice.nfx", "ice_rear_end.nfx", "two_vehicles.nfx", "stop_then_bump.nfx", "empty.nfx"):
    path = next(p for p in fixture_paths() if p.name == name)
    print(path.read_text(encoding="utf-8").splitlines()[0])
    print(run_pipeline(RunConfig(facts=str(path), verify_oracle=True)).report.format_text())

###############################################################################
# On ice, A could not brake: braking is unavailable to a vehicle caught by a
# disruptive factor.  So A's failure to stop is a derived anomaly (DAn), and
# the ice itself is the primary one.
