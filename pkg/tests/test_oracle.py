import pytest
from hypothesis import given, settings, strategies as st

from normengine.dsl import parse_program
from normengine.engine import InconsistencyError, ground, run_stratified
from normengine.oracle import OracleLimitError, check_extension, reiter_extensions
from normengine.stratify import StratificationError, stratify

from theories import random_theory


def grounded(text):
    p = parse_program(text)
    s, diags = stratify(p)
    assert diags == []
    return ground(p, s), s


def as_strings(ext):
    return {str(l) for l in ext}


def test_two_conflicting_defaults():
    g, _ = grounded("#predicate a/0. : a. : -a.")
    exts = reiter_extensions(g)
    assert len(exts) == 2 and {frozenset(as_strings(e)) for e in exts} == {frozenset({"a"}), frozenset({"-a"})}


def test_no_defaults_single_extension():
    g, s = grounded("#predicate a/0, b/0. a. a => b.")
    (e,) = reiter_extensions(g)
    assert e == run_stratified(g, s).literals


def test_every_extension_checks():
    g, _ = grounded("#predicate a/0, b/0, c/0. : a. : -a. a : b [c]. -a : c.")
    exts = reiter_extensions(g)
    assert len(exts) == 2
    assert all(check_extension(e, g) for e in exts)


def test_facts_only_is_not_an_extension_when_default_applies():
    g, _ = grounded("#predicate a/0, b/0. a. a : b.")
    assert not check_extension(set(g.facts), g)


def test_semi_normal_justification_includes_constraint():
    g, _ = grounded("#predicate a/0, b/0, c/0. a. -c. a : b [c].")
    (e,) = reiter_extensions(g)
    assert as_strings(e) == {"a", "-c"}


def test_worked_example_is_an_extension(worked_run):
    g = worked_run.ground
    assert len(g.defaults) <= 12
    assert check_extension(worked_run.database, g)
    assert worked_run.database.literals in reiter_extensions(g)


def test_limits():
    text = "#predicate " + ", ".join(f"p{i}/0" for i in range(13)) + ". " + " ".join(f": p{i}." for i in range(13))
    g, _ = grounded(text)
    with pytest.raises(OracleLimitError):
        reiter_extensions(g)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**7), st.booleans())
def test_engine_result_is_an_extension(seed, naf):
    p = parse_program(random_theory(seed, naf=naf))
    try:
        s, diags = stratify(p)
    except StratificationError:
        return
    if diags:
        return
    g = ground(p, s)
    try:
        db = run_stratified(g, s)
    except InconsistencyError:
        # a clash under a stratified order means no consistent extension exists
        assert reiter_extensions(g) == []
        return
    assert check_extension(db, g)
