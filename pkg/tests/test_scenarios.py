"""Scenario files, report payloads, serialisation, suites, baselines, CLI."""

from __future__ import annotations

import copy
import csv
import io
import json
import os
from pathlib import Path

import pytest

from zetastrip import cli
from zetastrip._env import PINNED_THREAD_VARS, pin_thread_env
from zetastrip.errors import PrecisionError, ValidationError
from zetastrip.scenarios import (
    DEFAULT_COMPARE_REL_TOL,
    EXIT_ERROR,
    EXIT_FAIL,
    EXIT_PASS,
    REPORT_FORMATS,
    SCENARIO_KINDS,
    SCHEMA_VERSION,
    Scenario,
    build_report,
    compare_reports,
    execute_scenario,
    load_report,
    load_scenario,
    load_suite,
    load_tolerances,
    render_csv,
    render_json,
    run_suite,
    write_report,
)

# Cheap parameter sets, one per scenario kind, sized for sub-second runs.
CHEAP_PARAMETERS = {
    "mean-square": {"sigma": "0.35", "t_lo": "0", "t_hi": "2", "coefficients": "1"},
    "theorem1": {
        "sigma": "0.4",
        "t": "60",
        "coefficients": "1",
        "sigma1_variant": "resolved",
        "sigma2_variant": "halved",
    },
    "theorem2": {"sigma": "0.4", "t": "50", "alpha": "1.0", "coefficients": "1"},
    "voronoi": {
        "a": "-0.2",
        "h": "1",
        "k": "3",
        "power_modulus_exponent": "residue",
        "x_lo": "40",
        "x_hi": "80",
        "points": "3",
        "n_terms": "300",
    },
    "saddle-l2": {
        "alpha": "0.6",
        "beta": "0.6",
        "gamma": "1.0",
        "a_lo": "0.01",
        "b_hi": "200",
        "k": "1",
        "t": "100",
    },
    "saddle-l3": {"alpha": "1.5", "k": "1", "t_grid": "50, 100"},
    "saddle-l4": {"alpha": "1.5", "n": "3", "t": "200"},
}


def _scenario(kind: str, **overrides: str) -> Scenario:
    parameters = dict(CHEAP_PARAMETERS[kind])
    parameters.update(overrides)
    return Scenario(kind=kind, parameters=parameters, stem=f"{kind}-test", formats=("json", "csv"), source="<memory>")


def _write_ini(tmp_path: Path, name: str, text: str) -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def _scenario_text(kind: str, extra: str = "") -> str:
    lines = [f"[scenario]", f"kind = {kind}", "", "[parameters]"]
    lines += [f"{key} = {value}" for key, value in CHEAP_PARAMETERS[kind].items()]
    return "\n".join(lines) + ("\n" + extra if extra else "") + "\n"


# ---------------------------------------------------------------------------
# Scenario file parsing
# ---------------------------------------------------------------------------


def test_load_scenario_defaults(tmp_path):
    path = _write_ini(tmp_path, "quick_decay.ini", _scenario_text("saddle-l3"))
    scenario = load_scenario(path)
    assert scenario.kind == "saddle-l3"
    assert scenario.stem == "quick_decay"
    assert scenario.formats == REPORT_FORMATS
    assert scenario.parameters["t_grid"] == "50, 100"


def test_load_scenario_output_section(tmp_path):
    text = _scenario_text("saddle-l3", "[output]\nstem = decay_bench\nformats = json")
    scenario = load_scenario(_write_ini(tmp_path, "any.ini", text))
    assert scenario.stem == "decay_bench"
    assert scenario.formats == ("json",)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[parameters]\nalpha = 1\n", "missing the [scenario] section"),
        ("[scenario]\nkind = waffle\n", "kind"),
        ("[scenario]\nkind = saddle-l3\nextra = 1\n", "extra"),
        ("[scenario]\nkind = saddle-l3\n[output]\nformats = yaml\n", "yaml"),
        ("[scenario]\nkind = saddle-l3\n[output]\nstem = a/b\n", "bare file name"),
        ("[scenario]\nkind = saddle-l3\n[extras]\nx = 1\n", "unknown section"),
        ("[scenario\nkind = saddle-l3\n", "malformed INI"),
    ],
)
def test_load_scenario_rejections(tmp_path, text, fragment):
    path = _write_ini(tmp_path, "bad.ini", text)
    with pytest.raises(ValidationError) as err:
        load_scenario(path)
    assert fragment in str(err.value)


def test_missing_scenario_file(tmp_path):
    with pytest.raises(ValidationError, match="cannot read"):
        load_scenario(tmp_path / "absent.ini")


def test_unknown_parameter_named_in_rejection():
    scenario = _scenario("saddle-l3", typo_key="1")
    with pytest.raises(ValidationError, match="typo_key"):
        build_report(scenario)


def test_missing_required_parameter_named():
    scenario = Scenario(
        kind="saddle-l3", parameters={"k": "1", "t_grid": "50, 100"}, stem="x", formats=("json",), source="<memory>"
    )
    with pytest.raises(ValidationError, match="alpha"):
        build_report(scenario)


# ---------------------------------------------------------------------------
# Runners and payload shape
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("kind", SCENARIO_KINDS)
def test_every_kind_builds_a_consistent_report(kind):
    report = build_report(_scenario(kind))
    assert report["schema_version"] == SCHEMA_VERSION
    assert report["kind"] == kind
    assert report["verdict"]["passed"] is True
    assert isinstance(report["verdict"]["detail"], str) and report["verdict"]["detail"]
    assert report["config"]["precision_bits"] == 53
    width = len(report["columns"])
    assert width > 0
    for row in report["rows"]:
        assert len(row) == width
    json.loads(render_json(report))  # canonical text is valid JSON
    render_csv(report)


def test_render_json_round_trip_and_determinism():
    scenario = _scenario("saddle-l4")
    first = build_report(scenario)
    second = build_report(scenario)
    assert render_json(first) == render_json(second)
    assert render_csv(first) == render_csv(second)
    assert json.loads(render_json(first)) == first


def test_render_json_refuses_non_finite():
    report = build_report(_scenario("saddle-l3"))
    report["scalars"]["bad"] = float("nan")
    with pytest.raises(ValueError):
        render_json(report)


def test_csv_mirrors_json_payload():
    report = build_report(_scenario("saddle-l3"))
    text = render_csv(report)
    lines = text.splitlines()
    preamble = {}
    table_start = 0
    for index, line in enumerate(lines):
        if not line.startswith("# "):
            table_start = index
            break
        key, value = line[2:].split(" = ", 1)
        preamble[key] = value

    assert preamble["schema_version"] == str(SCHEMA_VERSION)
    assert preamble["kind"] == report["kind"]
    assert preamble["verdict.passed"] == "true"
    assert preamble["verdict.detail"] == report["verdict"]["detail"]
    for key, value in report["config"].items():
        if isinstance(value, float):
            assert float(preamble[f"config.{key}"]) == value
        else:
            assert preamble[f"config.{key}"] == str(value)
    for key, value in report["scalars"].items():
        cell = preamble[f"scalars.{key}"]
        if isinstance(value, bool):
            assert cell == ("true" if value else "false")
        elif isinstance(value, float):
            assert float(cell) == value
        else:
            assert cell == str(value)

    table = list(csv.reader(io.StringIO("\n".join(lines[table_start:]))))
    assert table[0] == report["columns"]
    assert len(table) == 1 + len(report["rows"])
    for cells, row in zip(table[1:], report["rows"]):
        for cell, value in zip(cells, row):
            if isinstance(value, bool):
                assert cell == ("true" if value else "false")
            elif isinstance(value, (int, float)):
                assert float(cell) == float(value)  # repr() round-trips exactly
            else:
                assert cell == str(value)


def test_strip_violation_is_a_named_input_error():
    with pytest.raises(ValidationError, match=r"\(1/4, 1/2\)"):
        build_report(_scenario("mean-square", sigma="0.6"))


def test_precision_rules():
    with pytest.raises(ValidationError, match="53"):
        build_report(_scenario("saddle-l3"), precision_bits=52)
    for kind in ("voronoi", "saddle-l2", "saddle-l3", "saddle-l4"):
        with pytest.raises(PrecisionError, match="binary64"):
            build_report(_scenario(kind), precision_bits=64)
    with pytest.raises(PrecisionError):
        build_report(_scenario("mean-square"), precision_bits=64)


# ---------------------------------------------------------------------------
# Writing and executing
# ---------------------------------------------------------------------------


def test_execute_scenario_writes_both_formats(tmp_path):
    path = _write_ini(tmp_path, "decay.ini", _scenario_text("saddle-l3"))
    out_dir = tmp_path / "reports"
    result = execute_scenario(path, out_dir)
    assert result.kind == "saddle-l3"
    assert result.stem == "decay"
    assert result.passed is True
    assert tuple(Path(p).name for p in result.outputs) == ("decay.json", "decay.csv")
    payload = load_report(out_dir / "decay.json")
    assert payload["kind"] == "saddle-l3"
    assert (out_dir / "decay.csv").read_text(encoding="utf-8") == render_csv(payload)


def test_write_report_is_atomic_and_repeatable(tmp_path):
    report = build_report(_scenario("saddle-l4"))
    write_report(report, tmp_path, "bench", ("json",))
    first = (tmp_path / "bench.json").read_bytes()
    write_report(report, tmp_path, "bench", ("json",))
    assert (tmp_path / "bench.json").read_bytes() == first
    assert [p.name for p in tmp_path.iterdir()] == ["bench.json"]  # no temp litter


# ---------------------------------------------------------------------------
# Baseline comparison
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def l3_report():
    return build_report(_scenario("saddle-l3"))


def test_compare_identical_reports(l3_report):
    code, messages = compare_reports(l3_report, copy.deepcopy(l3_report))
    assert code == EXIT_PASS
    assert "agree" in messages[0]


def test_compare_numeric_drift_names_the_field(l3_report):
    drifted = copy.deepcopy(l3_report)
    drifted["rows"][0][1] *= 1.0 + 1e-6
    code, messages = compare_reports(drifted, l3_report)
    assert code == EXIT_FAIL
    assert any("rows[0][1]" in m and "drifted" in m for m in messages)

    # Exact-path tolerance admits the drift; so does the base-key fallback.
    assert compare_reports(drifted, l3_report, {"rows[0][1]": 1e-3})[0] == EXIT_PASS
    assert compare_reports(drifted, l3_report, {"rows": 1e-3})[0] == EXIT_PASS
    assert DEFAULT_COMPARE_REL_TOL == 1e-9


def test_compare_string_change_fails(l3_report):
    changed = copy.deepcopy(l3_report)
    changed["verdict"]["detail"] = "different wording"
    code, messages = compare_reports(changed, l3_report)
    assert code == EXIT_FAIL
    assert any("verdict.detail" in m for m in messages)


def test_compare_structural_mismatches(l3_report):
    missing_field = copy.deepcopy(l3_report)
    del missing_field["scalars"]["max_min_ratio"]
    code, messages = compare_reports(missing_field, l3_report)
    assert code == EXIT_ERROR
    assert any("scalars.max_min_ratio" in m for m in messages)

    missing_section = copy.deepcopy(l3_report)
    del missing_section["scalars"]
    code, messages = compare_reports(missing_section, l3_report)
    assert code == EXIT_ERROR
    assert "scalars" in messages[0]

    retyped = copy.deepcopy(l3_report)
    retyped["scalars"]["max_min_ratio"] = "high"
    assert compare_reports(retyped, l3_report)[0] == EXIT_ERROR

    rekinded = copy.deepcopy(l3_report)
    rekinded["kind"] = "saddle-l2"
    code, messages = compare_reports(rekinded, l3_report)
    assert code == EXIT_ERROR
    assert "kind" in messages[0]


def test_load_tolerances(tmp_path):
    assert load_tolerances(None) == {}
    path = _write_ini(tmp_path, "tol.ini", "[tolerances]\nrows = 1e-3\nscalars.max_min_ratio = 0.5\n")
    assert load_tolerances(path) == {"rows": 1e-3, "scalars.max_min_ratio": 0.5}
    with pytest.raises(ValidationError, match="tolerances"):
        load_tolerances(_write_ini(tmp_path, "none.ini", "[other]\nx = 1\n"))
    with pytest.raises(ValidationError, match="non-numeric"):
        load_tolerances(_write_ini(tmp_path, "text.ini", "[tolerances]\nrows = lots\n"))
    with pytest.raises(ValidationError, match=">= 0"):
        load_tolerances(_write_ini(tmp_path, "neg.ini", "[tolerances]\nrows = -1\n"))


def test_load_report_framing(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(render_json(build_report(_scenario("saddle-l3"))), encoding="utf-8")
    assert load_report(good)["kind"] == "saddle-l3"
    bad_json = _write_ini(tmp_path, "bad.json", "{not json")
    with pytest.raises(ValidationError, match="not valid JSON"):
        load_report(bad_json)
    unframed = _write_ini(tmp_path, "unframed.json", json.dumps({"rows": []}))
    with pytest.raises(ValidationError, match="framing"):
        load_report(unframed)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def _write_suite(tmp_path: Path) -> Path:
    _write_ini(tmp_path, "decay.ini", _scenario_text("saddle-l3"))
    _write_ini(tmp_path, "resonance.ini", _scenario_text("saddle-l4"))
    return _write_ini(tmp_path, "bench.ini", "[suite]\nscenarios =\n    decay.ini\n    resonance.ini\n")


def test_load_suite_resolves_relative_paths(tmp_path):
    suite_path = _write_suite(tmp_path)
    assert [p.name for p in load_suite(suite_path)] == ["decay.ini", "resonance.ini"]
    with pytest.raises(ValidationError, match="not found"):
        load_suite(_write_ini(tmp_path, "ghost.ini", "[suite]\nscenarios = nowhere.ini\n"))
    with pytest.raises(ValidationError, match="lists no files"):
        load_suite(_write_ini(tmp_path, "empty.ini", "[suite]\nscenarios =\n"))
    with pytest.raises(ValidationError, match=r"missing the \[suite\] section"):
        load_suite(_write_ini(tmp_path, "head.ini", "[scenario]\nkind = saddle-l3\n"))


def test_run_suite_is_worker_count_invariant(tmp_path):
    suite_path = _write_suite(tmp_path)
    dir_one, dir_two = tmp_path / "one", tmp_path / "two"
    summary_one = run_suite(suite_path, dir_one, workers=1)
    summary_two = run_suite(suite_path, dir_two, workers=2)

    assert summary_one["verdict"]["passed"] is True
    assert summary_one["verdict"]["detail"] == "2 of 2 scenario verdicts passed"
    assert [entry["stem"] for entry in summary_one["scenarios"]] == ["decay", "resonance"]

    names = sorted(p.name for p in dir_one.iterdir())
    assert names == ["decay.csv", "decay.json", "resonance.csv", "resonance.json", "suite_summary.json"]
    assert sorted(p.name for p in dir_two.iterdir()) == names
    for name in names:
        assert (dir_one / name).read_bytes() == (dir_two / name).read_bytes()

    summary_payload = load_report(dir_one / "suite_summary.json")
    assert summary_payload["kind"] == "suite"
    assert [entry["file"] for entry in summary_payload["scenarios"]] == ["decay.ini", "resonance.ini"]


def test_run_suite_rejects_duplicate_stems(tmp_path):
    _write_ini(tmp_path, "a.ini", _scenario_text("saddle-l3", "[output]\nstem = clash"))
    _write_ini(tmp_path, "b.ini", _scenario_text("saddle-l4", "[output]\nstem = clash"))
    suite_path = _write_ini(tmp_path, "dup.ini", "[suite]\nscenarios =\n    a.ini\n    b.ini\n")
    with pytest.raises(ValidationError, match="clash"):
        run_suite(suite_path, tmp_path / "out")
    with pytest.raises(ValidationError, match="workers"):
        run_suite(suite_path, tmp_path / "out", workers=0)


# ---------------------------------------------------------------------------
# Environment pinning
# ---------------------------------------------------------------------------


def test_pin_thread_env_forces_single_threaded_kernels(monkeypatch):
    for name in PINNED_THREAD_VARS:
        monkeypatch.setenv(name, "8")
    pin_thread_env()
    for name in PINNED_THREAD_VARS:
        assert os.environ[name] == "1"


def test_env_module_is_numpy_free():
    import zetastrip._env as env_module

    assert "numpy" not in env_module.__dict__
    source = Path(env_module.__file__).read_text(encoding="utf-8")
    assert "numpy" not in source.replace("free of numpy", "")


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------


def test_cli_run_pass(tmp_path, capsys):
    path = _write_ini(tmp_path, "decay.ini", _scenario_text("saddle-l3"))
    code = cli.main(["run", str(path), "--out", str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert code == EXIT_PASS
    assert captured.out.startswith("PASS saddle-l3 decay:")
    assert "wrote" in captured.out
    assert (tmp_path / "out" / "decay.json").is_file()


def test_cli_run_input_error(tmp_path, capsys):
    text = _scenario_text("mean-square").replace("sigma = 0.35", "sigma = 0.6")
    path = _write_ini(tmp_path, "bad.ini", text)
    code = cli.main(["run", str(path), "--out", str(tmp_path)])
    captured = capsys.readouterr()
    assert code == EXIT_ERROR
    assert captured.err.startswith("error:")
    assert "(1/4, 1/2)" in captured.err


def test_cli_compare(tmp_path, capsys):
    report = build_report(_scenario("saddle-l3"))
    current, baseline = tmp_path / "current.json", tmp_path / "baseline.json"
    baseline.write_text(render_json(report), encoding="utf-8")

    current.write_text(render_json(report), encoding="utf-8")
    assert cli.main(["compare", str(current), str(baseline)]) == EXIT_PASS
    assert "agree" in capsys.readouterr().out

    drifted = copy.deepcopy(report)
    drifted["rows"][0][1] *= 1.0 + 1e-6
    current.write_text(render_json(drifted), encoding="utf-8")
    assert cli.main(["compare", str(current), str(baseline)]) == EXIT_FAIL
    assert "rows[0][1]" in capsys.readouterr().err

    tol = _write_ini(tmp_path, "tol.ini", "[tolerances]\nrows = 1e-3\n")
    assert cli.main(["compare", str(current), str(baseline), "--tol", str(tol)]) == EXIT_PASS
    capsys.readouterr()

    rekinded = copy.deepcopy(report)
    rekinded["kind"] = "saddle-l2"
    current.write_text(render_json(rekinded), encoding="utf-8")
    assert cli.main(["compare", str(current), str(baseline)]) == EXIT_ERROR
    assert "kind" in capsys.readouterr().err


def test_cli_suite(tmp_path, capsys):
    suite_path = _write_suite(tmp_path)
    code = cli.main(["suite", str(suite_path), "--out", str(tmp_path / "out"), "--workers", "2"])
    captured = capsys.readouterr()
    assert code == EXIT_PASS
    assert "PASS saddle-l3 decay:" in captured.out
    assert "PASS saddle-l4 resonance:" in captured.out
    assert "suite: 2 of 2 scenario verdicts passed" in captured.out


def test_cli_rejects_bad_worker_and_precision_values(tmp_path, capsys):
    path = _write_ini(tmp_path, "decay.ini", _scenario_text("saddle-l3"))
    with pytest.raises(SystemExit):
        cli.main(["run", str(path), "--workers", "0"])
    capsys.readouterr()
    code = cli.main(["run", str(path), "--out", str(tmp_path), "--precision", "64"])
    captured = capsys.readouterr()
    assert code == EXIT_ERROR
    assert "binary64" in captured.err
