"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line that is printed at the end of the
pytest run.  ``python3 tests/test_acceptance.py`` prints the same lines
without pytest.
"""

import os
import subprocess
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from normengine import (  # noqa: E402
    InconsistencyError, RunConfig, StratificationError, check_extension, domain_rules, fixture_paths, ground,
    parse_program, pretty, reiter_extensions, run_pipeline, run_stratified, serialize_program, stratify,
)
from normengine.crash import data_path  # noqa: E402
from normengine.dsl import RuleKind  # noqa: E402
from normengine.stratify import CYCLIC_STRICT, PredicateKey  # noqa: E402

from theories import random_theory  # noqa: E402

RESULTS: list[str] = []

WORKED_EXPECTED = {
    "-Holds(Stop, A, 2)",
    "Holds(Combine(Follow, B), A, 2)",
    "Holds(Combine(Follow, B), A, 1)",
    "Must(Stop, A, 1)",
    "Available(Brake, Stop, A, 1)",
    "AbleTo(Stop, A, 1)",
    "An(A, 1, Stop)",
}


def _fixture(name):
    return next(p for p in fixture_paths() if p.name == name)


def record(number, title, ok, detail):
    RESULTS.append(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
    return ok


def criterion_1():
    start = time.perf_counter()
    report = run_pipeline(RunConfig(facts=str(_fixture("worked_example.nfx")))).report
    elapsed = time.perf_counter() - start
    derived = {pretty(l) for l in report.derived_literals}
    ok = (derived == WORKED_EXPECTED
          and report.cause_sentence == "A did not stop in a situation in which it had to"
          and elapsed < 1.0)
    return record(1, "worked example end to end", ok,
                  f"{len(derived)} derived literals, exact={derived == WORKED_EXPECTED}, {elapsed:.3f}s")


def criterion_2(wanted=200, max_seeds=20000):
    start = time.perf_counter()
    checked = agree_empty = failures = 0
    kinds = set()
    seed = 0
    while checked < wanted and seed < max_seeds:
        p = parse_program(random_theory(seed, max_defaults=8, max_atoms=20, naf=seed % 2 == 1))
        seed += 1
        try:
            s, diags = stratify(p)
        except StratificationError:
            continue
        if diags:
            continue
        g = ground(p, s)
        assert len(g.defaults) <= 8 and len(g.atoms()) <= 20
        extensions = reiter_extensions(g)
        try:
            db = run_stratified(g, s)
        except InconsistencyError:
            # only acceptable when the theory has no consistent extension
            if extensions:
                failures += 1
            else:
                agree_empty += 1
            continue
        checked += 1
        kinds.update(r.kind for r in p.rules if r.is_default)
        if not check_extension(db, g):
            failures += 1
    elapsed = time.perf_counter() - start
    mixed = {RuleKind.NORMAL, RuleKind.SEMI_NORMAL} <= kinds
    ok = checked >= wanted and failures == 0 and mixed and elapsed < 60
    return record(2, "engine output is a Reiter extension", ok,
                  f"{checked} theories checked, {failures} failures, {agree_empty} without extensions "
                  f"agreed, mixed kinds={mixed}, {elapsed:.2f}s")


def criterion_3():
    s, diags = stratify(domain_rules())
    pos = s.position
    H = lambda n: PredicateKey("holds", n)  # noqa: E731
    layers = [pos(H("stop"))[0], pos(PredicateKey("must", "stop"))[0],
              pos(PredicateKey("able_to", "_"))[0], pos(PredicateKey("anomaly", "an"))[0]]
    order = (max(pos(H("bump")), pos(H("shock"))) < pos(H("stop")) < pos(H("control")) < pos(H("follow")))
    ok = not diags and layers == [1, 2, 3, 4] and order
    holds_sub = sorted({p[1] for p, _ in s.order if p[0] == 1})
    return record(3, "stratification of the shipped rules", ok,
                  f"layers {layers}, bump/shock < stop < control < follow: {order}, "
                  f"{len(holds_sub)} holds sub-layers")


def criterion_4():
    try:
        stratify(parse_program("#predicate a/0, b/0, c/0. a : b [c]. b => c."))
        rejected = False
    except StratificationError as e:
        rejected = any(d.condition == CYCLIC_STRICT for d in e.diagnostics)
    _, kb_diags = stratify(domain_rules())
    ok = rejected and kb_diags == []
    return record(4, "non-stratifiable theory rejected", ok,
                  f"cycle rejected={rejected}, shipped rules diagnostics={len(kb_diags)}")


def criterion_5():
    paths = [str(p) for p in fixture_paths()]
    outputs = []
    for hashseed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        proc = subprocess.run([sys.executable, "-m", "normengine.cli", "run", "--format", "json", "--trace",
                               "--facts", *paths], capture_output=True, env=env, check=False)
        outputs.append(proc.stdout if proc.returncode == 0 else None)
    same = outputs[0] is not None and outputs[0] == outputs[1]
    golden = 0
    for p in fixture_paths():
        expected = Path(str(p)).with_suffix(".expected.json").read_text(encoding="utf-8")
        golden += run_pipeline(RunConfig(facts=str(p))).report.dumps() == expected
    ok = same and golden == len(paths)
    return record(5, "deterministic reports", ok,
                  f"{len(paths)} fixtures, byte-identical across runs={same}, golden matches {golden}/{len(paths)}")


def criterion_6():
    files = [data_path("crash.nkb"), data_path("linguistic.nkb")] + fixture_paths()
    good = 0
    for f in files:
        p = parse_program(f.read_text(encoding="utf-8"))
        good += parse_program(serialize_program(p)) == p
    return record(6, "parser round trip", good == len(files), f"{good}/{len(files)} files")


def criterion_7():
    db = run_pipeline(RunConfig(facts=str(_fixture("stop_then_bump.nfx")))).database
    lits = {str(l) for l in db}
    ok = "holds(stop, a, 1)" in lits and "holds(stop, a, 2)" not in lits and "-holds(stop, a, 2)" in lits
    return record(7, "stop persistence blocked at the bump state", ok,
                  f"Holds(Stop, A, 2) present={'holds(stop, a, 2)' in lits}")


def criterion_8():
    RESULTS.append("criterion 8 N/A: corpus-scale figures are out of scope; criteria 2-7 stand in")
    return True


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion):
    assert criterion(), RESULTS[-1]


def test_criterion_8_out_of_scope():
    criterion_8()


if __name__ == "__main__":
    outcome = [c() for c in CRITERIA]
    criterion_8()
    print("\n".join(RESULTS))
    sys.exit(0 if all(outcome) else 1)
