"""Scenario engine: declarative runs, versioned reports, baseline drift checks.

A *scenario file* is flat INI text with three sections::

    [scenario]
    kind = theorem1            # one of SCENARIO_KINDS

    [parameters]               # kind-specific, all keys validated
    sigma = 0.4
    t = 250
    coefficients = 1, 1

    [output]                   # optional
    stem = my_run              # default: scenario file name without suffix
    formats = json, csv        # default: both

Every run produces a *report*: a schema-versioned payload with the fully
resolved configuration (defaults filled in), a fixed per-kind column layout,
the data rows, run-level scalars, and a verdict.  The JSON file is the
payload verbatim; the CSV file mirrors it one-to-one (configuration,
scalars and verdict as ``# key = value`` preamble lines, then the tabular
part).  Reports carry no timestamps, hostnames or environment echoes, so
two runs of the same scenario on the same build produce byte-identical
files regardless of worker count; complex quantities are split into
``_re``/``_im`` fields.

``compare_reports`` diffs a JSON report against a stored baseline field by
field: numeric fields must agree within a relative tolerance (default
``DEFAULT_COMPARE_REL_TOL``, overridable per dotted field path via a
``[tolerances]`` INI file), strings and booleans exactly.  A *suite file*
lists scenario files (``[suite] scenarios = ...``, one per line, resolved
relative to the suite file) and runs them on a process pool whose workers
pin their numeric kernels to one thread before importing the numeric stack.

Exit-code convention used by the command-line front end:

* 0 -- run or comparison succeeded and every verdict passed;
* 1 -- bad input or execution error (validation, precision, quadrature
  non-convergence, unreadable files, schema mismatch);
* 2 -- machinery worked but a verdict failed or a baseline drifted.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import multiprocessing
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from ._env import pin_thread_env
from .arithmetic import DirichletPolynomial
from .errors import PrecisionError, ValidationError
from .explicit import (
    RADICAND_MODES,
    SIGMA1_VARIANTS,
    SIGMA2_VARIANTS,
    TWIST_MODES,
    WindowConfig,
    theorem1_report,
    theorem2_report,
)
from .meansquare import StripConfig, integrate_mean_square, main_term
from .saddle import (
    AUDIT_CONSTANT,
    ExpIntegralSpec,
    lemma2_compare,
    lemma3_decay,
    lemma4_compare,
)
from .special import PrecisionPolicy
from .voronoi import (
    TwistedSumSpec,
    calibrate,
    delta_bessel,
    delta_direct,
    truncation_plan,
)

SCHEMA_VERSION = 1
SCENARIO_KINDS = (
    "mean-square",
    "theorem1",
    "theorem2",
    "voronoi",
    "saddle-l2",
    "saddle-l3",
    "saddle-l4",
)
REPORT_FORMATS = ("json", "csv")
DEFAULT_COMPARE_REL_TOL = 1e-9

EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_FAIL = 2

_REQUIRED = object()


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------


class _Params:
    """Typed access to one INI section with unknown-key detection."""

    def __init__(self, raw: Mapping[str, str], *, context: str) -> None:
        self._raw = dict(raw)
        self._context = context
        self._consumed: set[str] = set()

    def _fetch(self, name: str, default):
        if name in self._raw:
            self._consumed.add(name)
            return self._raw[name]
        if default is _REQUIRED:
            raise ValidationError(f"{self._context}: missing required parameter '{name}'")
        return None

    def get_float(self, name: str, default=_REQUIRED) -> float:
        text = self._fetch(name, default)
        if text is None:
            return default
        try:
            return float(text)
        except ValueError as exc:
            raise ValidationError(f"{self._context}: parameter '{name}' is not a number: {text!r}") from exc

    def get_int(self, name: str, default=_REQUIRED) -> int:
        text = self._fetch(name, default)
        if text is None:
            return default
        try:
            return int(text, 10)
        except ValueError as exc:
            raise ValidationError(f"{self._context}: parameter '{name}' is not an integer: {text!r}") from exc

    def get_str(self, name: str, default=_REQUIRED, *, choices: Sequence[str] | None = None) -> str:
        text = self._fetch(name, default)
        if text is None:
            text = default
        text = text.strip()
        if choices is not None and text not in choices:
            raise ValidationError(
                f"{self._context}: parameter '{name}' must be one of {sorted(choices)}, got {text!r}"
            )
        return text

    def get_complex_list(self, name: str, default=_REQUIRED) -> tuple[complex, ...]:
        text = self._fetch(name, default)
        if text is None:
            text = default
        values = []
        for token in text.split(","):
            token = token.strip().replace(" ", "")
            if not token:
                continue
            try:
                values.append(complex(token))
            except ValueError as exc:
                raise ValidationError(
                    f"{self._context}: parameter '{name}' has a malformed entry: {token!r}"
                ) from exc
        if not values:
            raise ValidationError(f"{self._context}: parameter '{name}' must list at least one value")
        return tuple(values)

    def get_float_list(self, name: str, default=_REQUIRED) -> tuple[float, ...]:
        text = self._fetch(name, default)
        if text is None:
            text = default
        values = []
        for token in text.split(","):
            token = token.strip()
            if not token:
                continue
            try:
                values.append(float(token))
            except ValueError as exc:
                raise ValidationError(
                    f"{self._context}: parameter '{name}' has a malformed entry: {token!r}"
                ) from exc
        if not values:
            raise ValidationError(f"{self._context}: parameter '{name}' must list at least one value")
        return tuple(values)

    def reject_unknown(self) -> None:
        unknown = sorted(set(self._raw) - self._consumed)
        if unknown:
            raise ValidationError(f"{self._context}: unknown parameter(s) {unknown}")


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario file: kind, raw parameters, output naming."""

    kind: str
    parameters: Mapping[str, str]
    stem: str
    formats: tuple[str, ...]
    source: str


def _read_ini(path: Path, *, context: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"{context}: cannot read {path}: {exc.strerror or exc}") from exc
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ValidationError(f"{context}: malformed INI in {path}: {exc}") from exc
    return parser


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate the framing of one scenario file."""
    path = Path(path)
    parser = _read_ini(path, context="scenario")
    if not parser.has_section("scenario"):
        raise ValidationError(f"scenario: {path} is missing the [scenario] section")
    head = _Params(parser["scenario"], context=f"scenario {path.name} [scenario]")
    kind = head.get_str("kind", choices=SCENARIO_KINDS)
    head.reject_unknown()

    parameters = dict(parser["parameters"]) if parser.has_section("parameters") else {}

    stem = path.stem
    formats: tuple[str, ...] = REPORT_FORMATS
    if parser.has_section("output"):
        out = _Params(parser["output"], context=f"scenario {path.name} [output]")
        stem_text = out.get_str("stem", stem)
        if not stem_text or any(sep in stem_text for sep in ("/", "\\")):
            raise ValidationError(f"scenario {path.name}: output stem must be a bare file name")
        stem = stem_text
        formats_text = out.get_str("formats", ",".join(REPORT_FORMATS))
        formats = tuple(token.strip() for token in formats_text.split(",") if token.strip())
        for fmt in formats:
            if fmt not in REPORT_FORMATS:
                raise ValidationError(
                    f"scenario {path.name}: unknown output format {fmt!r}; expected {list(REPORT_FORMATS)}"
                )
        if not formats:
            raise ValidationError(f"scenario {path.name}: formats must name at least one of {list(REPORT_FORMATS)}")
        out.reject_unknown()

    extra = set(parser.sections()) - {"scenario", "parameters", "output"}
    if extra:
        raise ValidationError(f"scenario {path.name}: unknown section(s) {sorted(extra)}")
    return Scenario(kind=kind, parameters=parameters, stem=stem, formats=formats, source=str(path))


# ---------------------------------------------------------------------------
# Kind runners
# ---------------------------------------------------------------------------


def _policy_for(bits: int) -> PrecisionPolicy:
    return PrecisionPolicy(working_precision=bits)


def _require_binary64(kind: str, bits: int) -> None:
    if bits != 53:
        raise PrecisionError(
            f"kind '{kind}' evaluates binary64-only kernels; working precision must be 53 bits, got {bits}"
        )


def _poly_config(coefficients: Sequence[complex]) -> list[list[float]]:
    return [[c.real, c.imag] for c in coefficients]


def _run_mean_square(params: _Params, bits: int) -> dict:
    sigma = params.get_float("sigma")
    t_lo = params.get_float("t_lo", 0.0)
    t_hi = params.get_float("t_hi")
    coefficients = params.get_complex_list("coefficients", "1")
    secondary_weight = params.get_str("secondary_weight", "coprime", choices=("coprime", "lcm"))
    abs_tol = params.get_float("abs_tol", 1e-6)
    rel_tol = params.get_float("rel_tol", 1e-8)
    params.reject_unknown()

    cfg = StripConfig(sigma, _policy_for(bits))
    poly = DirichletPolynomial(coefficients)
    quad = integrate_mean_square(t_lo, t_hi, cfg, poly, abs_tol=abs_tol, rel_tol=rel_tol)
    main_hi = main_term(t_hi, cfg, poly, secondary_weight=secondary_weight) if t_hi > 0.0 else 0.0
    main_lo = main_term(t_lo, cfg, poly, secondary_weight=secondary_weight) if t_lo > 0.0 else 0.0
    error_term = quad.value - (main_hi - main_lo)

    config = {
        "sigma": sigma,
        "t_lo": t_lo,
        "t_hi": t_hi,
        "coefficients": _poly_config(coefficients),
        "secondary_weight": secondary_weight,
        "abs_tol": abs_tol,
        "rel_tol": rel_tol,
        "precision_bits": bits,
    }
    columns = [
        "integral",
        "error_estimate",
        "panels",
        "evaluations",
        "main_hi",
        "main_lo",
        "error_term",
        "passed",
    ]
    row = [
        quad.value,
        quad.error_estimate,
        quad.panels,
        quad.evaluations,
        main_hi,
        main_lo,
        error_term,
        True,
    ]
    return {
        "config": config,
        "columns": columns,
        "rows": [row],
        "scalars": {},
        "passed": True,
        "detail": f"quadrature converged with error estimate {quad.error_estimate!r}",
    }


_THEOREM_FLAG_CHOICES = {
    "sigma1_variant": SIGMA1_VARIANTS,
    "sigma2_variant": SIGMA2_VARIANTS,
    "radicand": RADICAND_MODES,
    "twist": TWIST_MODES,
    "secondary_weight": ("coprime", "lcm"),
}


def _theorem_flags(params: _Params) -> dict[str, str]:
    return {
        name: params.get_str(name, choices[0], choices=choices)
        for name, choices in _THEOREM_FLAG_CHOICES.items()
    }


def _run_theorem1(params: _Params, bits: int) -> dict:
    sigma = params.get_float("sigma")
    t = params.get_float("t")
    y = params.get_float("y", t)
    c1 = params.get_float("c1", 0.5)
    c2 = params.get_float("c2", 2.0)
    coefficients = params.get_complex_list("coefficients", "1")
    flags = _theorem_flags(params)
    abs_tol = params.get_float("abs_tol", 1e-6)
    rel_tol = params.get_float("rel_tol", 1e-8)
    residual_fraction = params.get_float("residual_fraction", 0.2)
    error_multiple = params.get_float("error_multiple", 10.0)
    params.reject_unknown()
    if residual_fraction <= 0.0 or error_multiple <= 0.0:
        raise ValidationError("residual_fraction and error_multiple must be positive")

    cfg = StripConfig(sigma, _policy_for(bits))
    win = WindowConfig(c1, c2, y, t)
    poly = DirichletPolynomial(coefficients)
    report = theorem1_report(win, cfg, poly, abs_tol=abs_tol, rel_tol=rel_tol, **flags)
    budget = max(
        residual_fraction * report.oscillatory_rms,
        error_multiple * report.quadrature_error,
        1e-12,
    )
    passed = abs(report.residual) <= budget

    config = {
        "sigma": sigma,
        "t": t,
        "y": y,
        "c1": c1,
        "c2": c2,
        "coefficients": _poly_config(coefficients),
        "abs_tol": abs_tol,
        "rel_tol": rel_tol,
        "residual_fraction": residual_fraction,
        "error_multiple": error_multiple,
        "precision_bits": bits,
        **flags,
    }
    columns = [
        "quadrature_value",
        "quadrature_error",
        "block_difference",
        "residual",
        "oscillatory_rms",
        "residual_budget",
        "upper_main",
        "upper_sigma1",
        "upper_sigma2",
        "lower_main",
        "lower_sigma1",
        "lower_sigma2",
        "terms_used_upper_1",
        "terms_used_upper_2",
        "terms_used_lower_1",
        "terms_used_lower_2",
        "passed",
    ]
    row = [
        report.quadrature_value,
        report.quadrature_error,
        report.block_difference,
        report.residual,
        report.oscillatory_rms,
        budget,
        report.upper.main,
        report.upper.sigma1,
        report.upper.sigma2,
        report.lower.main,
        report.lower.sigma1,
        report.lower.sigma2,
        report.upper.terms_used_1,
        report.upper.terms_used_2,
        report.lower.terms_used_1,
        report.lower.terms_used_2,
        passed,
    ]
    detail = (
        f"|residual| {abs(report.residual)!r} vs budget {budget!r} "
        f"(fraction of oscillatory rms / quadrature error / floor)"
    )
    return {
        "config": config,
        "columns": columns,
        "rows": [row],
        "scalars": {},
        "passed": passed,
        "detail": detail,
    }


def _run_theorem2(params: _Params, bits: int) -> dict:
    sigma = params.get_float("sigma")
    t = params.get_float("t")
    y = params.get_float("y", t)
    c1 = params.get_float("c1", 0.5)
    c2 = params.get_float("c2", 2.0)
    alpha = params.get_float("alpha", 1.0)
    coefficients = params.get_complex_list("coefficients", "1")
    flags = _theorem_flags(params)
    abs_tol = params.get_float("abs_tol", 1e-6)
    rel_tol = params.get_float("rel_tol", 1e-8)
    error_multiple = params.get_float("error_multiple", 3.0)
    params.reject_unknown()
    if error_multiple <= 0.0:
        raise ValidationError("error_multiple must be positive")

    cfg = StripConfig(sigma, _policy_for(bits))
    win = WindowConfig(c1, c2, y, t)
    poly = DirichletPolynomial(coefficients)
    report = theorem2_report(t, win, cfg, poly, alpha, abs_tol=abs_tol, rel_tol=rel_tol, **flags)
    budget = error_multiple * report.quadrature_error_total
    passed = abs(report.difference) <= budget

    config = {
        "sigma": sigma,
        "t": t,
        "y": y,
        "c1": c1,
        "c2": c2,
        "alpha": alpha,
        "coefficients": _poly_config(coefficients),
        "abs_tol": abs_tol,
        "rel_tol": rel_tol,
        "error_multiple": error_multiple,
        "precision_bits": bits,
        **flags,
    }
    columns = [
        "levels",
        "stub_upper",
        "direct_value",
        "telescoped_value",
        "difference",
        "quadrature_error_total",
        "difference_budget",
        "passed",
    ]
    row = [
        report.levels,
        report.stub_upper,
        report.direct_value,
        report.telescoped_value,
        report.difference,
        report.quadrature_error_total,
        budget,
        passed,
    ]
    detail = f"|path difference| {abs(report.difference)!r} vs budget {budget!r}"
    return {
        "config": config,
        "columns": columns,
        "rows": [row],
        "scalars": {},
        "passed": passed,
        "detail": detail,
    }


def _run_voronoi(params: _Params, bits: int) -> dict:
    _require_binary64("voronoi", bits)
    a = params.get_float("a")
    h = params.get_int("h")
    k_mod = params.get_int("k")
    exponent_text = params.get_str("power_modulus_exponent", "printed")
    twist = params.get_str("twist", "direct", choices=("direct", "inverse"))
    x_lo = params.get_float("x_lo", 40.0)
    x_hi = params.get_float("x_hi", 400.0)
    points = params.get_int("points", 50)
    n_terms = params.get_int("n_terms", 2000)
    calibration_x_lo = params.get_float("calibration_x_lo", 40.0)
    calibration_samples = params.get_int("calibration_samples", 640)
    tolerance_floor = params.get_float("tolerance_floor", 1e-3)
    tail_multiple = params.get_float("tail_multiple", 3.0)
    params.reject_unknown()

    if exponent_text == "printed":
        exponent: float | None = None
    elif exponent_text == "residue":
        exponent = -1.0 - a
    else:
        try:
            exponent = float(exponent_text)
        except ValueError as exc:
            raise ValidationError(
                "power_modulus_exponent must be 'printed', 'residue' or a number, "
                f"got {exponent_text!r}"
            ) from exc
    if not (1.0 <= x_lo < x_hi):
        raise ValidationError("voronoi evaluation range needs 1 <= x_lo < x_hi")
    if points < 2:
        raise ValidationError("voronoi needs at least two evaluation points")
    if tolerance_floor <= 0.0 or tail_multiple <= 0.0:
        raise ValidationError("tolerance_floor and tail_multiple must be positive")

    spec = TwistedSumSpec(a, h, k_mod)
    calibration = calibrate(
        spec,
        power_modulus_exponent=exponent,
        x_lo=calibration_x_lo,
        samples=calibration_samples,
    )
    plan = truncation_plan(spec, (x_lo, x_hi), n_terms)
    tolerance = max(tolerance_floor, tail_multiple * plan.tail_estimate + calibration.std_error)

    xs = np.geomspace(x_lo, x_hi, points)
    rows = []
    differences = []
    for x_val in xs:
        x = float(x_val)
        direct = delta_direct(spec, x)
        bessel = delta_bessel(spec, x, plan, twist=twist)
        diff = abs(direct - bessel)
        differences.append(diff)
        rows.append([x, direct.real, direct.imag, bessel.real, bessel.imag, diff])
    max_difference = max(differences)
    passed = max_difference <= tolerance

    config = {
        "a": a,
        "h": h,
        "k": k_mod,
        "power_modulus_exponent": exponent_text,
        "twist": twist,
        "x_lo": x_lo,
        "x_hi": x_hi,
        "points": points,
        "n_terms": n_terms,
        "calibration_x_lo": calibration_x_lo,
        "calibration_samples": calibration_samples,
        "tolerance_floor": tolerance_floor,
        "tail_multiple": tail_multiple,
        "precision_bits": bits,
    }
    columns = ["x", "direct_re", "direct_im", "bessel_re", "bessel_im", "difference"]
    scalars = {
        "power_exponent": calibration.power_exponent,
        "c0_re": calibration.c0.real,
        "c0_im": calibration.c0.imag,
        "fit_std_error": calibration.std_error,
        "oscillation_rms": calibration.oscillation_rms,
        "drift_ratio": calibration.drift_ratio,
        "tail_estimate": plan.tail_estimate,
        "terms_used": plan.n_terms,
        "tolerance": tolerance,
        "max_difference": max_difference,
        "passed": passed,
    }
    detail = f"max |direct - series| {max_difference!r} vs tolerance {tolerance!r} over {points} points"
    return {
        "config": config,
        "columns": columns,
        "rows": rows,
        "scalars": scalars,
        "passed": passed,
        "detail": detail,
    }


def _run_saddle_l2(params: _Params, bits: int) -> dict:
    _require_binary64("saddle-l2", bits)
    alpha = params.get_float("alpha")
    beta = params.get_float("beta")
    gamma = params.get_float("gamma")
    a_lo = params.get_float("a_lo")
    b_hi = params.get_float("b_hi")
    k_freq = params.get_float("k")
    t = params.get_float("t")
    sign = params.get_int("sign", 1)
    abs_tol = params.get_float("abs_tol", 1e-7)
    rel_tol = params.get_float("rel_tol", 1e-9)
    params.reject_unknown()

    spec = ExpIntegralSpec(
        alpha=alpha, beta=beta, gamma=gamma, a_lo=a_lo, b_hi=b_hi, k_freq=k_freq, T=t, sign=sign
    )
    report = lemma2_compare(spec, abs_tol=abs_tol, rel_tol=rel_tol)

    config = {
        "alpha": alpha,
        "beta": beta,
        "gamma": gamma,
        "a_lo": a_lo,
        "b_hi": b_hi,
        "k": k_freq,
        "t": t,
        "sign": sign,
        "abs_tol": abs_tol,
        "rel_tol": rel_tol,
        "precision_bits": bits,
    }
    columns = [
        "lhs_re",
        "lhs_im",
        "saddle_re",
        "saddle_im",
        "difference",
        "quadrature_error",
        "budget_endpoint_a",
        "budget_endpoint_b",
        "budget_saddle_r",
        "budget_total",
        "audit_constant",
        "r_branch",
        "passed",
    ]
    row = [
        report.lhs.real,
        report.lhs.imag,
        report.saddle.real,
        report.saddle.imag,
        report.difference,
        report.quadrature_error,
        report.budget_endpoint_a,
        report.budget_endpoint_b,
        report.budget_saddle_r,
        report.budget_total,
        AUDIT_CONSTANT,
        report.r_branch,
        report.passed,
    ]
    detail = (
        f"|integral - saddle| {report.difference!r} vs "
        f"{AUDIT_CONSTANT!r} * budget {report.budget_total!r}"
    )
    return {
        "config": config,
        "columns": columns,
        "rows": [row],
        "scalars": {},
        "passed": report.passed,
        "detail": detail,
    }


def _run_saddle_l3(params: _Params, bits: int) -> dict:
    _require_binary64("saddle-l3", bits)
    alpha = params.get_float("alpha")
    k_freq = params.get_float("k")
    t_grid = params.get_float_list("t_grid")
    params.reject_unknown()

    report = lemma3_decay(alpha, k_freq, t_grid)

    config = {
        "alpha": alpha,
        "k": k_freq,
        "t_grid": list(report.t_values),
        "precision_bits": bits,
    }
    columns = ["t", "magnitude", "ratio"]
    rows = [
        [t_val, mag, ratio]
        for t_val, mag, ratio in zip(report.t_values, report.magnitudes, report.ratios)
    ]
    scalars = {
        "max_min_ratio": report.max_min_ratio,
        "ratio_cap": 20.0,
        "passed": report.passed,
    }
    detail = f"decay-normalised ratio spread {report.max_min_ratio!r} vs cap 20.0"
    return {
        "config": config,
        "columns": columns,
        "rows": rows,
        "scalars": scalars,
        "passed": report.passed,
        "detail": detail,
    }


def _run_saddle_l4(params: _Params, bits: int) -> dict:
    _require_binary64("saddle-l4", bits)
    alpha = params.get_float("alpha")
    n = params.get_int("n")
    t = params.get_float("t")
    a_lo = params.get_float("a_lo", math.sqrt(t) if t > 0 else _REQUIRED)
    b_hi = params.get_float("b_hi", 10.0 * math.sqrt(t) if t > 0 else _REQUIRED)
    log_constant = params.get_str("log_constant", "two-pi", choices=("two-pi", "three-pi"))
    abs_tol = params.get_float("abs_tol", 1e-8)
    rel_tol = params.get_float("rel_tol", 1e-9)
    params.reject_unknown()

    report = lemma4_compare(
        alpha, n, a_lo, b_hi, t, log_constant=log_constant, abs_tol=abs_tol, rel_tol=rel_tol
    )

    config = {
        "alpha": alpha,
        "n": n,
        "a_lo": a_lo,
        "b_hi": b_hi,
        "t": t,
        "log_constant": log_constant,
        "abs_tol": abs_tol,
        "rel_tol": rel_tol,
        "precision_bits": bits,
    }
    columns = [
        "delta",
        "lhs_re",
        "lhs_im",
        "saddle_re",
        "saddle_im",
        "difference",
        "quadrature_error",
        "budget_saddle",
        "budget_endpoint_a",
        "budget_endpoint_b",
        "budget_total",
        "audit_constant",
        "saddle_log_constant",
        "passed",
    ]
    row = [
        report.delta,
        report.lhs.real,
        report.lhs.imag,
        report.saddle.real,
        report.saddle.imag,
        report.difference,
        report.quadrature_error,
        report.budget_saddle,
        report.budget_endpoint_a,
        report.budget_endpoint_b,
        report.budget_total,
        AUDIT_CONSTANT,
        report.saddle_log_constant,
        report.passed,
    ]
    detail = (
        f"|integral - saddle| {report.difference!r} vs "
        f"{AUDIT_CONSTANT!r} * budget {report.budget_total!r} (delta = {report.delta})"
    )
    return {
        "config": config,
        "columns": columns,
        "rows": [row],
        "scalars": {},
        "passed": report.passed,
        "detail": detail,
    }


_RUNNERS: dict[str, Callable[[_Params, int], dict]] = {
    "mean-square": _run_mean_square,
    "theorem1": _run_theorem1,
    "theorem2": _run_theorem2,
    "voronoi": _run_voronoi,
    "saddle-l2": _run_saddle_l2,
    "saddle-l3": _run_saddle_l3,
    "saddle-l4": _run_saddle_l4,
}


# ---------------------------------------------------------------------------
# Report assembly and serialisation
# ---------------------------------------------------------------------------


def build_report(scenario: Scenario, *, precision_bits: int = 53) -> dict:
    """Execute one scenario and return its full report payload."""
    if precision_bits < 53:
        raise ValidationError("precision must be at least 53 bits")
    runner = _RUNNERS[scenario.kind]
    params = _Params(scenario.parameters, context=f"scenario kind '{scenario.kind}'")
    outcome = runner(params, precision_bits)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": scenario.kind,
        "config": outcome["config"],
        "columns": list(outcome["columns"]),
        "rows": [list(row) for row in outcome["rows"]],
        "scalars": dict(outcome["scalars"]),
        "verdict": {"passed": bool(outcome["passed"]), "detail": outcome["detail"]},
    }


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_json(report: dict) -> str:
    """Canonical JSON text: sorted keys, two-space indent, no NaN/Inf."""
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def render_csv(report: dict) -> str:
    """CSV mirror of the JSON payload.

    Scalar context (configuration, run-level scalars, verdict) appears as
    ``# key = value`` preamble lines in sorted key order; the tabular part
    follows with the kind's fixed column header.
    """
    buffer = io.StringIO(newline="")
    buffer.write(f"# schema_version = {report['schema_version']}\n")
    buffer.write(f"# kind = {report['kind']}\n")
    for section in ("config", "scalars"):
        for key in sorted(report[section]):
            buffer.write(f"# {section}.{key} = {_format_cell(report[section][key])}\n")
    verdict = report["verdict"]
    buffer.write(f"# verdict.passed = {_format_cell(verdict['passed'])}\n")
    buffer.write(f"# verdict.detail = {verdict['detail']}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(report["columns"])
    for row in report["rows"]:
        writer.writerow([_format_cell(value) for value in row])
    return buffer.getvalue()


def _write_atomic(path: Path, text: str) -> None:
    handle = tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", newline="", dir=path.parent, prefix=f".{path.name}.", delete=False
    )
    try:
        with handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(handle.name, path)
    except BaseException:
        try:
            os.unlink(handle.name)
        except OSError:
            pass
        raise


def write_report(report: dict, out_dir: str | Path, stem: str, formats: Sequence[str]) -> list[str]:
    """Serialise a report into ``out_dir`` atomically; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    renderers = {"json": render_json, "csv": render_csv}
    written = []
    for fmt in formats:
        path = out_dir / f"{stem}.{fmt}"
        _write_atomic(path, renderers[fmt](report))
        written.append(str(path))
    return written


@dataclass(frozen=True)
class RunResult:
    """Outcome of executing one scenario file end to end."""

    source: str
    kind: str
    stem: str
    passed: bool
    detail: str
    outputs: tuple[str, ...]


def execute_scenario(
    path: str | Path, out_dir: str | Path | None = None, *, precision_bits: int = 53
) -> RunResult:
    """Load, run and serialise one scenario file."""
    scenario = load_scenario(path)
    report = build_report(scenario, precision_bits=precision_bits)
    target = Path(out_dir) if out_dir is not None else Path.cwd()
    outputs = write_report(report, target, scenario.stem, scenario.formats)
    return RunResult(
        source=str(path),
        kind=scenario.kind,
        stem=scenario.stem,
        passed=report["verdict"]["passed"],
        detail=report["verdict"]["detail"],
        outputs=tuple(outputs),
    )


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def load_suite(path: str | Path) -> list[Path]:
    """Scenario paths listed by a suite file, resolved against its directory."""
    path = Path(path)
    parser = _read_ini(path, context="suite")
    if not parser.has_section("suite"):
        raise ValidationError(f"suite: {path} is missing the [suite] section")
    head = _Params(parser["suite"], context=f"suite {path.name} [suite]")
    listing = head.get_str("scenarios")
    head.reject_unknown()
    extra = set(parser.sections()) - {"suite"}
    if extra:
        raise ValidationError(f"suite {path.name}: unknown section(s) {sorted(extra)}")
    entries = [line.strip() for line in listing.splitlines() if line.strip()]
    if not entries:
        raise ValidationError(f"suite {path.name}: 'scenarios' lists no files")
    base = path.parent
    resolved = []
    for entry in entries:
        candidate = Path(entry)
        if not candidate.is_absolute():
            candidate = base / candidate
        if not candidate.is_file():
            raise ValidationError(f"suite {path.name}: scenario file not found: {candidate}")
        resolved.append(candidate)
    return resolved


def _suite_task(scenario_path: str, out_dir: str, precision_bits: int) -> dict:
    result = execute_scenario(scenario_path, out_dir, precision_bits=precision_bits)
    return {
        "source": result.source,
        "kind": result.kind,
        "stem": result.stem,
        "passed": result.passed,
        "detail": result.detail,
        "outputs": list(result.outputs),
    }


def run_suite(
    path: str | Path,
    out_dir: str | Path | None = None,
    *,
    workers: int = 1,
    precision_bits: int = 53,
) -> dict:
    """Run every scenario of a suite and write a summary report.

    Scenarios run on a spawn-based process pool whose initializer pins the
    numeric kernels of each worker to a single thread before the task
    payload imports the numeric stack; results are collected in listing
    order, so the summary and every per-scenario report are byte-identical
    for any worker count.
    """
    if workers < 1:
        raise ValidationError("workers must be at least 1")
    scenario_paths = load_suite(path)
    target = Path(out_dir) if out_dir is not None else Path.cwd()
    target.mkdir(parents=True, exist_ok=True)

    stems = [load_scenario(p).stem for p in scenario_paths]
    duplicates = sorted({s for s in stems if stems.count(s) > 1})
    if duplicates:
        raise ValidationError(f"suite: duplicate output stem(s) {duplicates}; reports would overwrite")

    context = multiprocessing.get_context("spawn")
    max_workers = min(workers, len(scenario_paths))
    with ProcessPoolExecutor(
        max_workers=max_workers, mp_context=context, initializer=pin_thread_env
    ) as pool:
        futures = [
            pool.submit(_suite_task, str(p), str(target), precision_bits) for p in scenario_paths
        ]
        entries = [future.result() for future in futures]

    summary = {
        "schema_version": SCHEMA_VERSION,
        "kind": "suite",
        "scenarios": [
            {
                "file": scenario_path.name,
                "kind": entry["kind"],
                "stem": entry["stem"],
                "passed": entry["passed"],
                "detail": entry["detail"],
            }
            for scenario_path, entry in zip(scenario_paths, entries)
        ],
        "verdict": {
            "passed": all(entry["passed"] for entry in entries),
            "detail": (
                f"{sum(entry['passed'] for entry in entries)} of {len(entries)} scenario verdicts passed"
            ),
        },
    }
    _write_atomic(target / "suite_summary.json", render_json(summary))
    summary["outputs"] = [entry["outputs"] for entry in entries]
    summary["summary_path"] = str(target / "suite_summary.json")
    return summary


# ---------------------------------------------------------------------------
# Baseline comparison
# ---------------------------------------------------------------------------


def load_tolerances(path: str | Path | None) -> dict[str, float]:
    """Per-field relative tolerances from a ``[tolerances]`` INI file."""
    if path is None:
        return {}
    parser = _read_ini(Path(path), context="tolerances")
    if not parser.has_section("tolerances"):
        raise ValidationError(f"tolerances: {path} is missing the [tolerances] section")
    table = {}
    for key, text in parser["tolerances"].items():
        try:
            value = float(text)
        except ValueError as exc:
            raise ValidationError(f"tolerances: field {key!r} has a non-numeric tolerance {text!r}") from exc
        if not (value >= 0.0 and math.isfinite(value)):
            raise ValidationError(f"tolerances: field {key!r} needs a finite tolerance >= 0, got {value!r}")
        table[key] = value
    return table


def _flatten(value, prefix: str, into: dict[str, object]) -> None:
    if isinstance(value, dict):
        for key in value:
            _flatten(value[key], f"{prefix}.{key}" if prefix else str(key), into)
    elif isinstance(value, list):
        for index, item in enumerate(value):
            _flatten(item, f"{prefix}[{index}]", into)
    else:
        into[prefix] = value


@dataclass(frozen=True)
class FieldDrift:
    """One numeric field whose relative deviation exceeds its tolerance."""

    field: str
    current: float
    baseline: float
    relative: float
    tolerance: float


def _tolerance_for(field: str, tolerances: Mapping[str, float]) -> float:
    if field in tolerances:
        return tolerances[field]
    base = field.split("[", 1)[0]
    if base in tolerances:
        return tolerances[base]
    return DEFAULT_COMPARE_REL_TOL


def compare_reports(
    current: dict, baseline: dict, tolerances: Mapping[str, float] | None = None
) -> tuple[int, list[str]]:
    """Field-by-field drift check of a report against a stored baseline.

    Returns ``(exit_code, messages)``: structural differences (schema or
    kind mismatch, missing or extra fields, type changes) give exit 1;
    numeric drift beyond tolerance or a changed string/boolean gives exit 2;
    agreement gives exit 0.  Tolerances are relative, keyed by dotted field
    path (``rows[3][2]`` may be keyed exactly or as ``rows``).
    """
    tolerances = dict(tolerances or {})
    messages: list[str] = []

    for name in ("schema_version", "kind"):
        if current.get(name) != baseline.get(name):
            return EXIT_ERROR, [
                f"structural mismatch: {name} differs "
                f"(current {current.get(name)!r}, baseline {baseline.get(name)!r})"
            ]
    if set(current) != set(baseline):
        gone = sorted(set(baseline) - set(current))
        new = sorted(set(current) - set(baseline))
        return EXIT_ERROR, [
            f"structural mismatch: top-level sections differ (missing {gone}, extra {new})"
        ]

    flat_current: dict[str, object] = {}
    flat_baseline: dict[str, object] = {}
    _flatten(current, "", flat_current)
    _flatten(baseline, "", flat_baseline)

    missing = sorted(set(flat_baseline) - set(flat_current))
    extra = sorted(set(flat_current) - set(flat_baseline))
    if missing or extra:
        for name in missing:
            messages.append(f"structural mismatch: field {name} missing from current report")
        for name in extra:
            messages.append(f"structural mismatch: field {name} absent from baseline")
        return EXIT_ERROR, messages

    drifts: list[FieldDrift] = []
    for name in sorted(flat_current):
        a, b = flat_current[name], flat_baseline[name]
        a_num = isinstance(a, (int, float)) and not isinstance(a, bool)
        b_num = isinstance(b, (int, float)) and not isinstance(b, bool)
        if a_num != b_num:
            return EXIT_ERROR, [
                f"structural mismatch: field {name} changed type "
                f"({type(a).__name__} vs {type(b).__name__})"
            ]
        if a_num:
            diff = abs(float(a) - float(b))
            scale = max(abs(float(a)), abs(float(b)))
            if diff == 0.0:
                continue
            relative = diff / scale if scale > 0.0 else math.inf
            tol = _tolerance_for(name, tolerances)
            if relative > tol:
                drifts.append(FieldDrift(name, float(a), float(b), relative, tol))
        else:
            if a != b:
                messages.append(
                    f"field {name} changed: current {a!r}, baseline {b!r}"
                )

    for drift in drifts:
        messages.append(
            f"field {drift.field} drifted: current {drift.current!r}, baseline "
            f"{drift.baseline!r}, relative deviation {drift.relative:.3e} > tolerance {drift.tolerance:.3e}"
        )
    if messages:
        return EXIT_FAIL, messages
    return EXIT_PASS, [f"reports agree on all {len(flat_current)} fields"]


def load_report(path: str | Path) -> dict:
    """Read a JSON report, validating the framing fields."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read report {path}: {exc.strerror or exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"report {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "schema_version" not in payload or "kind" not in payload:
        raise ValidationError(f"report {path} lacks schema_version/kind framing")
    return payload
