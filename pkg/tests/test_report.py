import json
import math

import pytest

from hodgecurv.fixtures import get_fixture
from hodgecurv.report import (CertifyOptions, certify, format_number,
                              render_csv, render_json, render_text,
                              run_nilpotent_harness)

SKIP_NOTE = "non-admissible: Hodge semi-metric only; curvature checks skipped"
ORDER = ["higgs-axioms", "admissibility", "nilpotency", "flatness", "kahler",
         "curvature-routes", "bisectional", "scalar-trace", "hsc-coordinate",
         "hsc-direction", "trace-chain"]


@pytest.fixture(scope="module")
def uniformizing_report():
    return certify(get_fixture("uniformizing"))


def test_check_order(uniformizing_report):
    assert [r.check for r in uniformizing_report.records] == ORDER


def test_uniformizing_passes(uniformizing_report):
    rep = uniformizing_report
    assert rep.verdict
    hsc = rep.record("hsc-coordinate")
    assert hsc.value == pytest.approx(-2, abs=1e-6)
    assert hsc.extra["bound"] == -0.5


def test_verdict_is_conjunction_of_asserted(uniformizing_report):
    rep = uniformizing_report
    assert rep.verdict == all(r.passed for r in rep.records if r.asserted)
    rep.records[0].passed = False
    try:
        assert not rep.verdict
    finally:
        rep.records[0].passed = True


def test_nonflat_control_fails_on_flatness():
    rep = certify(get_fixture("nonflat-control"))
    assert not rep.verdict
    assert rep.record("flatness").value == pytest.approx(math.sqrt(2), abs=1e-9)
    assert not rep.record("flatness").passed


def test_zero_fixture_skips_curvature():
    rep = certify(get_fixture("zero"))
    for name in ORDER[5:]:
        r = rep.record(name)
        assert r.passed is None and not r.asserted and SKIP_NOTE in r.note
    assert rep.verdict


def test_nonadmissible_control_reports_degenerate_gram():
    rep = certify(get_fixture("nonadmissible-control"))
    adm = rep.record("admissibility")
    assert not adm.passed and "DegenerateGram" in adm.note and SKIP_NOTE in adm.note
    assert rep.record("curvature-routes").passed is None


def test_nonkahler_control_reports_large_residual():
    rep = certify(get_fixture("nonkahler-control"))
    k = rep.record("kahler")
    assert k.value > 0.1 and not k.asserted


def test_records_name_their_claim(uniformizing_report):
    for r in uniformizing_report.records:
        assert r.claim and r.statistic


def test_json_rendering_is_stable(uniformizing_report):
    text = render_json(uniformizing_report)
    again = render_json(certify(get_fixture("uniformizing")))
    assert text == again
    data = json.loads(text)
    assert data["verdict"] == "pass" and data["seed"] == 0 and data["version"]
    assert len(data["checks"]) == len(ORDER)


def test_seed_changes_samples():
    a = render_json(certify(get_fixture("uniformizing"), CertifyOptions(seed=1)))
    b = render_json(certify(get_fixture("uniformizing"), CertifyOptions(seed=2)))
    assert a != b


def test_text_and_csv(uniformizing_report):
    text = render_text(uniformizing_report)
    assert "verdict: pass" in text and "hsc-coordinate" in text
    rows = render_csv(uniformizing_report).splitlines()
    assert rows[0].startswith("sample,re_t1,im_t1,route")
    assert len(rows) == 1 + 50 * 3


def test_format_number():
    assert format_number(1 / 3) == float("0.333333333333")
    assert format_number(float("inf")) == "inf"
    assert format_number(float("nan")) == "nan"
    assert format_number(None) is None
    assert format_number(True) is True
    assert format_number(7) == 7


def test_harness_rank2():
    rep, passed = run_nilpotent_harness(2, 1000, 7)
    assert passed
    assert rep["orthogonal_strict"]["min_margin"] >= -1e-9
    assert rep["equality_case"]["lhs"] == pytest.approx(math.sqrt(2), abs=1e-9)
    assert rep["equality_case"]["m1"] == pytest.approx(math.sqrt(2), abs=1e-9)


def test_harness_empty_and_deterministic():
    rep, passed = run_nilpotent_harness(3, 0, 1)
    assert passed and rep["trials"] == 0
    assert rep["orthogonal_strict"]["count"] == 0
    assert run_nilpotent_harness(4, 50, 3) == run_nilpotent_harness(4, 50, 3)


def test_harness_rank_limit():
    with pytest.raises(ValueError):
        run_nilpotent_harness(17, 1, 0)
