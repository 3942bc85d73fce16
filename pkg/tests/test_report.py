import json
from pathlib import Path

import pytest

from normengine import RunConfig, run_pipeline
from normengine.dsl import parse_literal
from normengine.report import cause_sentence, explain, select_primary

from conftest import fixture

DOCS = Path(__file__).parents[1] / "docs"


def anomalies(*texts):
    return [parse_literal(t) for t in texts]


def test_select_primary_single():
    primary, derived = select_primary(anomalies("an(a, 1, stop)"))
    assert str(primary.literal) == "an(a, 1, stop)" and derived == []


def test_select_primary_none():
    assert select_primary([]) == (None, [])
    assert cause_sentence(None) == "no cause identified"


def test_select_primary_minimal_state():
    primary, derived = select_primary(anomalies("an(a, 2, stop)", "an(c, 1, control)"))
    assert str(primary.literal) == "an(c, 1, control)"
    assert [str(a.literal) for a in derived] == ["an(a, 2, stop)"]


def test_select_primary_ties_and_dan():
    primary, derived = select_primary(anomalies("dan(a, 1, stop)", "an(b, 1, stop)", "an(a, 1, stop)", "an(a, 1, control)"))
    assert str(primary.literal) == "an(a, 1, control)"
    assert [str(a.literal) for a in derived] == ["an(a, 1, stop)", "dan(a, 1, stop)", "an(b, 1, stop)"]


def test_dan_alone_has_no_primary():
    primary, derived = select_primary(anomalies("dan(a, 1, stop)"))
    assert primary is None and len(derived) == 1


def test_worked_example_report(worked_run):
    r = worked_run.report
    assert r.cause_sentence == "A did not stop in a situation in which it had to"
    p = r.primary
    assert (str(p.agent), p.state, str(p.property), p.schema) == ("a", 1, "stop", "form1")
    assert str(p.observation) == "holds(combine(bump, b_narrator), a, 2)"


def test_disruptive_factor_report():
    r = run_pipeline(RunConfig(facts=str(fixture("disruptive_ice.nfx")))).report
    assert r.primary.schema == "form2"
    assert r.cause_sentence == "a disruptive factor (ice) affected A"


def test_derived_anomaly_report():
    r = run_pipeline(RunConfig(facts=str(fixture("ice_rear_end.nfx")))).report
    assert r.primary.schema == "form2"
    kinds = [(a.kind, a.schema) for a in r.derived]
    assert ("dan", "derived") in kinds
    assert "A could not stop as a consequence" in r.consequences
    assert all(a.state >= r.primary.state for a in r.derived)


def test_two_vehicle_report():
    r = run_pipeline(RunConfig(facts=str(fixture("two_vehicles.nfx")))).report
    assert str(r.primary.literal) == "an(c, 1, combine(disruptive_factor, ice))"
    assert [str(a.literal) for a in r.derived] == ["an(a, 2, stop)"]


def test_empty_report():
    r = run_pipeline(RunConfig(facts=str(fixture("empty.nfx")))).report
    assert r.primary is None and r.derived == [] and r.cause_sentence == "no cause identified"


def test_text_and_json_agree(worked_run):
    r = worked_run.report
    doc = r.to_json()
    text = r.format_text()
    for a in [doc["primary"]] + doc["derived"]:
        assert a["literal"] in text
    assert doc["cause_sentence"] in text


def test_explain_duty(worked_run):
    out = explain(worked_run.database, parse_literal("must(stop, a, 1)"))
    lines = out.splitlines()
    assert "follow_stop_must" in lines[0]
    assert lines[1].startswith("  Holds(Combine(Follow, B), A, 1)")
    assert any(l.startswith("  Holds(Stop, B, 1)") for l in lines)


def test_explain_follow_chain(worked_run):
    lines = explain(worked_run.database, parse_literal("holds(combine(follow, b_narrator), a, 1)")).splitlines()
    assert "follow_persist_back" in lines[0]
    assert "shock_follow" in lines[1] and "Holds(Control, A, 1)" in lines[1]


def test_explain_input_fact_and_missing(worked_run):
    assert explain(worked_run.database, parse_literal("holds(stop, b_narrator, 1)")) == "Holds(Stop, B, 1)  <- input-fact\n"
    assert explain(worked_run.database, parse_literal("holds(stop, a, 5)")).endswith("not derived\n")


def test_run_config_checks(tmp_path):
    with pytest.raises(FileNotFoundError):
        RunConfig(facts=str(tmp_path / "missing.nfx"))
    with pytest.raises(ValueError):
        RunConfig(facts=str(fixture("empty.nfx")), cap=0)


def test_report_validates_against_schema():
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((DOCS / "report.schema.json").read_text())
    trace = json.loads((DOCS / "trace.schema.json").read_text())
    registry_cls = getattr(__import__("referencing"), "Registry", None) if _has("referencing") else None
    run = run_pipeline(RunConfig(facts=str(fixture("ice_rear_end.nfx")), trace=True, verify_oracle=True))
    doc = run.report.to_json()
    if registry_cls is not None:
        from referencing import Resource
        registry = registry_cls().with_resource("trace.schema.json", Resource.from_contents(trace))
        jsonschema.Draft202012Validator(schema, registry=registry).validate(doc)
    else:
        doc.pop("trace")
        jsonschema.validate(doc, schema)
    assert doc["oracle"]["is_extension"] is True


def _has(module):
    import importlib.util
    return importlib.util.find_spec(module) is not None
