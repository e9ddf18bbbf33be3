import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ancrc.report import (
    CSV_COLUMNS,
    SCHEMA,
    VerificationReport,
    dump_json,
    emit_report,
    exit_status,
    parse_report,
    summarize,
)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
scalars = st.one_of(st.integers(-10**6, 10**6), finite, st.text(max_size=8),
                    st.builds(complex, finite, finite))

records = st.builds(
    VerificationReport,
    identity=st.sampled_from(["geometry.pairing", "u.symplectic", "calib.stirling"]),
    n=st.integers(0, 5),
    param=st.text(alphabet="abcdz=0123456789,", max_size=10),
    residual=st.one_of(finite, st.sampled_from([math.inf, -math.inf])),
    tolerance=finite,
    mode=st.sampled_from(["lt", "ge"]),
    expected_failure=st.booleans(),
    inputs=st.dictionaries(st.text(alphabet="abcxyz", min_size=1, max_size=4), scalars, max_size=3),
)


def rep(res, tol=1e-9, **kw):
    return VerificationReport("x.y", 1, "p", res, tol, **kw)


def test_empty_report_is_valid_document():
    doc = json.loads(emit_report([], seed=3))
    assert doc["schema"] == SCHEMA and doc["reports"] == [] and doc["summary"]["total"] == 0
    assert parse_report(emit_report([])) == []


@given(st.lists(records, max_size=6))
def test_json_round_trip(reps):
    back = parse_report(emit_report(reps, seed=7))
    assert back == sorted(reps, key=VerificationReport.sort_key)


def test_nan_residual_encoded_and_failing():
    r = rep(float("nan"))
    doc = json.loads(emit_report([r]))
    assert doc["reports"][0]["residual"] == "nan"
    assert doc["reports"][0]["pass"] is False
    assert math.isnan(parse_report(emit_report([r]))[0].residual)


def test_csv_columns_in_order():
    out = emit_report([rep(1e-12), rep(1.0)], "csv").decode().splitlines()
    assert tuple(out[0].split(",")) == CSV_COLUMNS
    assert out[1].endswith("true") and out[2].endswith("false")


def test_human_format_has_summary_line():
    out = emit_report([rep(1e-12), rep(1.0, expected_failure=True)], "human").decode()
    assert out.splitlines()[0].startswith("PASS")
    assert "2 checks: 1 passed, 0 failed, 1 expected failures, 0 unexpected passes" in out


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report([], "yaml")
    with pytest.raises(ValueError):
        parse_report(b'{"schema": "other/1", "reports": []}')


def test_modes():
    assert rep(1e-12).passed and not rep(1e-3).passed
    assert rep(5.0, 4.5, mode="ge").passed and not rep(4.0, 4.5, mode="ge").passed
    with pytest.raises(ValueError):
        rep(0.0, mode="le")


def test_exit_status_with_expected_failures():
    assert exit_status([rep(1e-12), rep(1.0, expected_failure=True)]) == 0
    assert exit_status([rep(1e-12, expected_failure=True)]) == 1
    assert exit_status([rep(1.0)]) == 1
    assert exit_status([]) == 0
    s = summarize([rep(1e-12, expected_failure=True), rep(1.0, expected_failure=True)])
    assert s["XPASS"] == 1 and s["XFAIL"] == 1


def test_non_scalar_input_rejected():
    with pytest.raises(TypeError):
        emit_report([rep(0.0, inputs={"m": [1, 2]})])


def test_dump_json_complex_and_arrays():
    import numpy as np

    doc = json.loads(dump_json({"z": 1 + 2j, "m": np.eye(2), "x": float("inf")}))
    assert doc == {"z": [1.0, 2.0], "m": [[1.0, 0.0], [0.0, 1.0]], "x": "inf"}
