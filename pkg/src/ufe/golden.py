"""Replay of the three worked examples against their published numbers.

Published constants carry three decimals and are reused downstream at that
precision, so the replay runs with ``decimals=3`` and compares with an
absolute tolerance of 1e-3 (override with ``UFE_TOL``). A handful of
published entries are not reproducible from the published inputs by any
consistent reading; they are listed in ``KNOWN_DISCREPANCIES`` and reported
without affecting the exit status.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from importlib import resources
from typing import Any

from .design import parse_csv
from .report import AnalysisReport, analyze, recommend

__all__ = ["EXAMPLES", "EXPECTED", "KNOWN_DISCREPANCIES", "flatten", "run", "compare", "Mismatch"]

DEFAULT_TOL = 1e-3

# name -> (csv file, schema, interaction)
EXAMPLES: dict[str, tuple[str, str, bool]] = {
    "example1": ("example1.csv", "single", False),
    "example2": ("example2.csv", "two", True),
    "example3": ("example3.csv", "two", True),
}


def _table(test: str, rows: list[str], cols: list[str], cells: list[list[tuple[float, float]]]):
    out = {}
    for ref, row in zip(rows, cells):
        for sample, (lo, hi) in zip(cols, row):
            out[f"{test}.ai[{ref},{sample}].lo"] = lo
            out[f"{test}.ai[{ref},{sample}].hi"] = hi
    return out


def _effects(pairs: dict[str, tuple[float, float]]) -> dict[str, float]:
    out = {}
    for name, (est, hw) in pairs.items():
        out[f"fit.{name}.estimate"] = est
        out[f"fit.{name}.ci_half_width"] = hw
    return out


def _residuals(specs: dict[str, tuple[float, float]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for label, (sigma, hi) in specs.items():
        out[f"diag.{label}.sigma"] = sigma
        out[f"diag.{label}.ai_hi"] = hi
        out[f"diag.{label}.singular_points"] = 0
    return out


_EX1 = {
    **{f"means.mu{i}.estimate": v for i, v in enumerate((4.302, 4.5, 2.6), 1)},
    **{f"means.mu{i}.ci_half_width": 2.353 for i in (1, 2, 3)},
    **_residuals({"eps1": (1.114, 2.251), "eps2": (1.320, 2.666), "eps3": (1.094, 2.209)}),
    "diag.homogeneity": "fail-to-reject",
    "diag.sigma0": 1.165,
    "diag.common.ai_hi": 2.353,
    "diag.common": "fail-to-reject",
    **_effects({"mu": (3.674, 2.353), "a1": (0.628, 3.137), "a2": (0.826, 3.451),
                "a3": (-1.074, 2.824)}),
    **_table("H_a", ["mu10", "mu20", "mu30"], ["z1", "z2", "z3"], [
        [(2.051, 6.553), (1.636, 6.968), (2.093, 6.511)],
        [(2.249, 6.751), (1.834, 7.166), (2.291, 6.709)],
        [(0.349, 4.851), (-0.066, 5.266), (0.391, 4.809)],
    ]),
    "H_a.decision": "reject",
    "H_a.violations[mu10,z3]": "2,3,5",
    "H_a.violations[mu20,z3]": "2,3,5",
    "H_a.violations[mu30,z1]": "3",
    "H_a.violations[mu30,z2]": "1,2",
    # column zt2 is listed under KNOWN_DISCREPANCIES
    **{k: v for k, v in _table("H0", ["a10", "a20", "a30"], ["zt1", "zt2", "zt3"], [
        [(-1.622, 2.878), (-2.032, 3.288), (-1.582, 2.838)],
        [(-1.424, 3.076), (-1.834, 3.486), (-1.384, 3.036)],
        [(-3.324, 1.176), (-3.734, 1.586), (-3.284, 1.136)],
    ]).items() if ",zt2]" not in k},
    "H0.decision": "reject",
    "H0.violations[a10,zt3]": "2,3,5",
    "H0.violations[a20,zt3]": "2,3,5",
    "H0.violations[a30,zt1]": "3",
    "H0.violations[a30,zt2]": "1,2",
}

_EX2 = {
    **_residuals({"eps11": (1.845, 3.725), "eps12": (1.674, 3.381), "eps21": (2.299, 4.644),
                  "eps22": (1.879, 3.794)}),
    "diag.homogeneity": "fail-to-reject",
    "diag.sigma0": 1.938,
    "diag.common.ai_hi": 3.914,
    "diag.common": "fail-to-reject",
    **_effects({"mu": (45.75, 3.915), "a1": (-2.267, 3.915), "a2": (2.267, 3.915),
                "b1": (-0.483, 3.915), "b2": (0.483, 3.915),
                "ab11": (0.033, 3.915), "ab12": (-0.033, 3.915),
                "ab21": (-0.033, 3.915), "ab22": (0.033, 3.915)}),
    **_table("H0_A", ["a10", "a20"], ["zt1", "zt2"], [
        [(-5.939, 1.405), (-6.634, 2.100)],
        [(-1.405, 5.939), (-2.100, 6.634)],
    ]),
    "H0_A.decision": "reject",
    "H0_A.violations[a20,zt1]": "1,2,4,5",
    "H0_A.violations[a10,zt2]": "2,3,5,6",
    "H0_B.decision": "fail-to-reject",
    "H0_AB.decision": "fail-to-reject",
    **{f"H0_AB.ai[sigma_{c},zb{c}].hi": v
       for c, v in zip(("11", "12", "21", "22"), (3.727, 3.381, 4.644, 3.795))},
}

_EX3 = {
    **_residuals({"eps11": (8.602, 17.375), "eps12": (7.118, 14.377), "eps21": (5.5, 11.109),
                  "eps22": (7.587, 15.323)}),
    "diag.homogeneity": "fail-to-reject",
    "diag.sigma0": 7.429,
    "diag.common": "fail-to-reject",
    **_effects({"mu": (56.818, 6.669), "a1": (11.852, 10.003), "a2": (-14.222, 10.003),
                "b1": (-2.040, 10.003), "b2": (1.700, 10.003),
                "ab11": (-4.630, 15.005), "ab12": (4.630, 15.005),
                "ab21": (6.944, 15.005), "ab22": (-4.630, 15.005)}),
    **_table("H0_A", ["a10", "a20"], ["zt1", "zt2"], [
        [(-8.804, 32.508), (-3.969, 27.673)],
        [(-34.878, 6.434), (-30.043, 1.599)],
    ]),
    "H0_A.decision": "reject",
    **_table("H0_B", ["b10", "b20"], ["zc1", "zc2"], [
        [(-22.929, 18.849), (-40.693, 36.613)],
        [(-19.189, 22.589), (-36.953, 40.353)],
    ]),
    "H0_B.decision": "fail-to-reject",
    "H0_AB.decision": "reject",
    "H0_AB.violations[sigma_21,zb21]": "2",
    "H0_AB.ai[sigma_21,zb21].hi": 11.109,
    "recommend.larger.cell": "A1B2",
    "recommend.larger.expected": 75.0,
    "recommend.smaller.cell": "A2B2",
    "recommend.smaller.expected": 39.666,
}

EXPECTED: dict[str, dict[str, Any]] = {"example1": _EX1, "example2": _EX2, "example3": _EX3}

# published values that no consistent computation reproduces; key -> (value, why)
KNOWN_DISCREPANCIES: dict[str, dict[str, tuple[float, str]]] = {
    "example1": {
        **{k: (v, "published half-width 2.660 conflicts with sigma_20 = 1.320 (half-width 2.666)")
           for k, v in _table("H0", ["a10", "a20", "a30"], ["zt2"], [
               [(-2.032, 3.288)], [(-1.834, 3.486)], [(-3.734, 1.586)]]).items()},
    },
    "example2": {
        **{k: (v, "published table implies collapsed sigmas 3.215 and 3.090; the collapsed "
                  "samples give 3.055 and 2.908")
           for k, v in _table("H0_B", ["b10", "b20"], ["zc1", "zc2"], [
               [(-6.976, 6.010), (-6.724, 5.757)],
               [(-6.010, 6.976), (-5.757, 6.724)]]).items()},
    },
    "example3": {},
}


def _iv_keys(test, out: dict[str, Any]) -> None:
    if test.table is not None:
        for ref, row in zip(test.table.rows, test.table.cells):
            for sample, iv in zip(test.table.cols, row):
                out[f"{test.name}.ai[{ref},{sample}].lo"] = iv.lo
                out[f"{test.name}.ai[{ref},{sample}].hi"] = iv.hi
    for c in test.details:
        if test.table is None:
            out[f"{test.name}.ai[{c.reference},{c.sample}].lo"] = c.interval.lo
            out[f"{test.name}.ai[{c.reference},{c.sample}].hi"] = c.interval.hi
        if c.count:
            out[f"{test.name}.violations[{c.reference},{c.sample}]"] = ",".join(map(str, c.violations))


def flatten(report: AnalysisReport) -> dict[str, Any]:
    """Name every reported number with a stable key."""
    out: dict[str, Any] = {}
    diag = report.diagnostics
    for g in diag.groups:
        c = g.outcome.details[0]
        out[f"diag.{g.label}.sigma"] = g.sigma
        out[f"diag.{g.label}.ai_hi"] = c.interval.hi
        out[f"diag.{g.label}.singular_points"] = c.count
    if diag.homogeneity is not None:
        out["diag.homogeneity"] = diag.homogeneity.decision.value
    if diag.common is not None:
        out["diag.common"] = diag.common.decision.value
        out["diag.common.ai_hi"] = diag.common.details[0].interval.hi
        out["diag.sigma0"] = diag.sigma0_raw
    if report.fit is not None and report.fit.means:
        for e in report.fit.means:
            out[f"means.{e.name}.estimate"] = e.estimate
            out[f"means.{e.name}.ci_half_width"] = e.ci.half_width
    if report.fit is not None:
        for e in report.fit.effects():
            out[f"fit.{e.name}.estimate"] = e.estimate
            out[f"fit.{e.name}.ci_half_width"] = e.ci.half_width
    for t in report.tests:
        out[f"{t.name}.decision"] = t.decision.value
        _iv_keys(t, out)
    return out


@dataclass(frozen=True)
class Mismatch:
    key: str
    expected: Any
    actual: Any

    def __str__(self) -> str:
        if isinstance(self.expected, float) and isinstance(self.actual, float):
            return (f"{self.key}: expected {self.expected:.3f}, got {self.actual:.6f} "
                    f"(diff {abs(self.actual - self.expected):.2e})")
        return f"{self.key}: expected {self.expected!r}, got {self.actual!r}"


def _tol() -> float:
    raw = os.environ.get("UFE_TOL")
    return float(raw) if raw else DEFAULT_TOL


def compare(actual: dict[str, Any], expected: dict[str, Any], tol: float | None = None) -> list[Mismatch]:
    tol = _tol() if tol is None else tol
    bad = []
    for key, want in expected.items():
        got = actual.get(key)
        if isinstance(want, str) or got is None or isinstance(got, str):
            ok = got == want
        else:
            ok = math.isfinite(got) and abs(float(got) - float(want)) <= tol + 1e-12
        if not ok:
            bad.append(Mismatch(key, want, got))
    return bad


def load_example(name: str):
    fname, schema, _ = EXAMPLES[name]
    with resources.files("ufe").joinpath("data", fname).open("rb") as fh:
        return parse_csv(fh, schema)


def run(name: str) -> tuple[dict[str, Any], AnalysisReport]:
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    d = load_example(name)
    report = analyze(d, interaction=EXAMPLES[name][2], decimals=3)
    flat = flatten(report)
    if report.fit is not None and EXAMPLES[name][2]:
        for objective in ("larger", "smaller"):
            rec = recommend(report.fit, objective, d)
            flat[f"recommend.{objective}.cell"] = rec.label
            flat[f"recommend.{objective}.expected"] = rec.expected
    return flat, report
