import json
import math

import pytest

from app.cli.helpers import (
    EXIT_USAGE,
    CliError,
    build_report_model,
    build_sweep_row,
    resolve_codes,
    resolve_noise_p,
    resolve_q11,
    sweep_values,
    validate_precision,
    validate_qber,
)
from app.cli.output import Emission, format_scientific, format_value, render_json, table_lines
from app.cli.schemas import RunSpec, SyndromeStatModel
from app.qkd.base.channel import six_state
from app.qkd.base.codes import make_repetition
from app.qkd.rates.distribution import syndrome_distribution
from app.qkd.rates.formulas import rate_no_otp


def test_resolve_q11_auto_and_values():
    assert resolve_q11("bb84", "auto") is None
    assert resolve_q11("bb84", "0.01") == 0.01
    with pytest.raises(CliError) as exc:
        resolve_q11("bb84", "lots")
    assert exc.value.status == EXIT_USAGE
    assert exc.value.detail.startswith("invalid_q11")
    with pytest.raises(CliError):
        resolve_q11("six-state", "0.01")


def test_resolve_noise_p():
    assert resolve_noise_p("auto") is None
    assert resolve_noise_p("0.25") == 0.25
    with pytest.raises(CliError):
        resolve_noise_p("0.75")


def test_validate_qber_by_protocol():
    assert validate_qber("bb84", 0.3) == 0.3
    with pytest.raises(CliError):
        validate_qber("six-state", 0.7)
    with pytest.raises(CliError):
        validate_qber("bb84", -0.1)


def test_resolve_codes_expands_ranges_and_rejects_unknown():
    labels = [label for label, _ in resolve_codes(["rep:2..3", "hamming743"])]
    assert labels == ["rep:2", "rep:3", "hamming743"]
    with pytest.raises(CliError) as exc:
        resolve_codes(["golay"])
    assert "unknown_code" in exc.value.detail


def test_sweep_values_include_end_point():
    values = sweep_values(0.0, 0.3, 0.01)
    assert len(values) == 31
    assert values[-1] == 0.3
    assert values[10] == 0.1
    with pytest.raises(CliError):
        sweep_values(0.3, 0.1, 0.01)
    with pytest.raises(CliError):
        sweep_values(0.0, 0.1, 0.0)


def test_precision_bounds():
    assert validate_precision(6) == 6
    with pytest.raises(CliError):
        validate_precision(-1)


def test_report_model_uses_wire_names():
    report = rate_no_otp(syndrome_distribution(make_repetition(2), six_state(0.1)))
    model = build_report_model(report, "rep:2", "six-state", 0.1)
    data = model.model_dump(by_alias=True)
    assert set(data["entries"][0]["consumption"]) == {"I_b_j", "avg_I_p", "R_j"}
    assert data["entries"][0]["kept"] is True
    assert data["entries"][1]["kept"] is False
    assert data["code_label"] == "[2 1 2]"


def test_sweep_row_keeps_raw_rate():
    report = rate_no_otp(syndrome_distribution(make_repetition(2), six_state(0.1)))
    row = build_sweep_row(report, "rep:2", 0.1)
    assert row.q11 is None and row.noise_p is None
    assert row.key_rate == row.key_rate_raw


def test_format_value():
    assert format_value(0.1698334, 6) == "0.169833"
    assert format_value(None, 6) == ""
    assert format_value(True, 6) == "true"
    assert format_value(7, 6) == "7"


def test_table_lines_align_columns():
    lines = table_lines(("a", "value"), [("x", 0.5), ("long", 1.25)], 2)
    assert lines == ["a     value", "x     0.50", "long  1.25"]


def test_format_scientific_rebuilds_underflowed_values_from_the_log():
    assert format_scientific(0.0, -400 * math.log(10.0), 6) == "1.000000e-400"
    assert format_scientific(0.0, math.log(2.5) - 1234 * math.log(10.0), 3) == "2.500e-1234"
    assert format_scientific(2.5e-3, None, 3) == "2.500e-03"
    assert format_scientific(2.5e-3, math.log(2.5e-3), 3) == "2.500e-03"
    assert format_scientific(0.0, None, 2) == "0.00e+00"


def test_render_json_writes_infinite_z_score_as_null():
    stats = [
        SyndromeStatModel(syndrome="00", empirical=0.82, analytic=0.82, z_score=0.5),
        SyndromeStatModel(syndrome="11", empirical=1e-6, analytic=0.0, z_score=math.inf),
    ]
    text = render_json(RunSpec(subcommand="simulate"), Emission("syndromes", stats, (), (), ()))
    assert "Infinity" not in text
    document = json.loads(text)
    assert [item["z_score"] for item in document["syndromes"]] == [0.5, None]
