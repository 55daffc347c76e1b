"""End-to-end analysis: diagnostics, then estimation, then effect tests.

The stages run strictly in order. If the residual diagnostics reject, the
report is returned with ``status == "halted"`` and no estimates or effect
tests, because the confidence intervals presuppose a validated sigma0.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import typing
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union

from . import __version__
from .design import SingleFactorData, TwoFactorData
from .errors import UFEError
from .estimators import (
    EffectFit,
    cell_residuals,
    fit_single_effects,
    fit_single_means,
    fit_two,
    single_residuals,
)
from .uhtest import (
    ResidualDiagnostics,
    TestOutcome,
    diagnose_residuals,
    fix,
    homogeneity_effects,
    homogeneity_main_effect,
    interaction_test,
)

__all__ = [
    "StageError",
    "DatasetSummary",
    "Recommendation",
    "AnalysisReport",
    "analyze",
    "recommend",
    "to_dict",
    "from_dict",
    "to_json",
    "from_json",
    "render_text",
]


class StageError(UFEError):
    """Wraps a module error with the name of the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


@dataclass(frozen=True)
class DatasetSummary:
    design: str
    n_total: int
    balanced: bool
    labels_a: tuple[str, ...]
    replicates: tuple[int, ...]
    labels_b: tuple[str, ...] | None = None
    cell_replicates: tuple[tuple[int, ...], ...] | None = None

    @classmethod
    def of(cls, d: SingleFactorData | TwoFactorData) -> DatasetSummary:
        if isinstance(d, SingleFactorData):
            return cls("single", d.n_total, d.balanced, d.labels, d.replicates)
        return cls("two", d.n_total, d.balanced, d.labels_a, d.replicates_a,
                   d.labels_b, d.cell_replicates)

    @property
    def shape(self) -> tuple[int, ...]:
        if self.labels_b is None:
            return (len(self.labels_a),)
        return (len(self.labels_a), len(self.labels_b))


@dataclass(frozen=True)
class Recommendation:
    objective: str
    cell: tuple[int, int]  # 1-based (i, j)
    label: str
    expected: float


@dataclass(frozen=True)
class AnalysisReport:
    dataset: DatasetSummary
    diagnostics: ResidualDiagnostics
    fit: EffectFit | None
    tests: tuple[TestOutcome, ...]
    recommendation: Recommendation | None
    provenance: dict[str, Any]

    @property
    def status(self) -> str:
        return "complete" if self.diagnostics.passed else "halted"

    @property
    def halted_at(self) -> str | None:
        return self.diagnostics.halted_at

    def test(self, name: str) -> TestOutcome:
        for t in self.tests:
            if t.name == name:
                return t
        raise KeyError(name)


def _level(alpha: float) -> float:
    return float(1 - Fraction(repr(float(alpha))))


def recommend(fit: EffectFit, objective: str, d: TwoFactorData) -> Recommendation:
    """Best cell by expected response for "larger" or "smaller" the better."""
    if objective not in ("larger", "smaller"):
        raise ValueError(f"objective must be 'larger' or 'smaller', got {objective!r}")
    cells = [(fit.expected(i, j), i, j) for i in range(d.r) for j in range(d.s)]
    pick = max if objective == "larger" else min
    y, i, j = pick(cells, key=lambda t: t[0])
    return Recommendation(objective, (i + 1, j + 1), f"A{i + 1}B{j + 1}", y)


def _stage(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except UFEError as exc:
        raise StageError(stage, exc) from exc


def analyze(
    d: SingleFactorData | TwoFactorData,
    interaction: bool = False,
    alpha: float = 0.05,
    objective: str | None = None,
    decimals: int | None = None,
    provenance: dict[str, Any] | None = None,
) -> AnalysisReport:
    """Run the full pipeline on one dataset.

    ``decimals`` rounds every fitted constant handed from one stage to the next
    (sigmas, plug-in effects) before it is used, as when the constants are
    published and then treated as known. ``None`` keeps full precision.
    """
    level = _level(alpha)
    config = {"alpha": alpha, "interaction": bool(interaction), "objective": objective,
              "decimals": decimals}
    prov = {"version": __version__, "config": config, **(provenance or {})}
    summary = DatasetSummary.of(d)

    if isinstance(d, SingleFactorData):
        means = _stage("estimation", fit_single_means, d)
        groups = single_residuals(d, means)
        labels = [f"eps{i + 1}" for i in range(d.r)]
    else:
        prelim = _stage("estimation", fit_two, d, interaction, 1.0, level)
        groups = cell_residuals(d, prelim)
        labels = [f"eps{i + 1}{j + 1}" for i, j, _ in d.cells()]

    diag = _stage("diagnostics", diagnose_residuals, groups, alpha, labels, decimals)
    if not diag.passed:
        return AnalysisReport(summary, diag, None, (), None, prov)
    sigma0 = diag.sigma0

    if isinstance(d, SingleFactorData):
        fit = _stage("estimation", fit_single_effects, d, sigma0, level)
        sigmas = diag.group_sigmas
        r = d.r
        h_means = _stage(
            "H_a", homogeneity_effects, d.obs, [fix(m, decimals) for m in means.mu_i], sigmas,
            alpha, mu0=0.0, name="H_a",
            sample_labels=[f"z{i + 1}" for i in range(r)],
            reference_labels=[f"mu{i + 1}0" for i in range(r)],
        )
        h_effects = _stage(
            "H0", homogeneity_effects, d.obs, [fix(e.estimate, decimals) for e in fit.a], sigmas,
            alpha, mu0=fix(fit.mu.estimate, decimals), name="H0",
            sample_labels=[f"zt{i + 1}" for i in range(r)],
            reference_labels=[f"a{i + 1}0" for i in range(r)],
        )
        return AnalysisReport(summary, diag, fit, (h_means, h_effects), None, prov)

    fit = prelim.rescaled(sigma0, level)
    tests = [
        _stage("H0_A", homogeneity_main_effect, d, "A", fit, alpha, decimals),
        _stage("H0_B", homogeneity_main_effect, d, "B", fit, alpha, decimals),
    ]
    rec = None
    if interaction:
        tests.append(_stage("H0_AB", interaction_test, d, fit, alpha, decimals))
        if objective:
            rec = recommend(fit, objective, d)
    return AnalysisReport(summary, diag, fit, tuple(tests), rec, prov)


# ------------------------------------------------------------ serialization

def to_dict(obj: Any) -> Any:
    """Plain-JSON form of any report object (dataclasses, enums, tuples)."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_dict(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (tuple, list)):
        return [to_dict(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_dict(v) for k, v in obj.items()}
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float) or hasattr(obj, "__float__"):
        return float(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _decode(tp: Any, value: Any) -> Any:
    origin = typing.get_origin(tp)
    if tp is Any:
        return value
    if origin is Union or type(tp).__name__ == "UnionType":
        args = typing.get_args(tp)
        if value is None and type(None) in args:
            return None
        errors = []
        for arg in args:
            if arg is type(None):
                continue
            try:
                return _decode(arg, value)
            except (TypeError, ValueError, KeyError) as exc:
                errors.append(exc)
        raise TypeError(f"no union member of {tp} accepts {value!r}: {errors}")
    if origin is tuple:
        args = typing.get_args(tp)
        if not isinstance(value, list):
            raise TypeError(f"expected list for {tp}, got {type(value).__name__}")
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_decode(args[0], v) for v in value)
        return tuple(_decode(a, v) for a, v in zip(args, value))
    if origin is dict:
        if not isinstance(value, dict):
            raise TypeError(f"expected object for {tp}")
        return dict(value)
    if isinstance(tp, type) and dataclasses.is_dataclass(tp):
        if not isinstance(value, dict):
            raise TypeError(f"expected object for {tp.__name__}")
        hints = typing.get_type_hints(tp)
        kwargs = {f.name: _decode(hints[f.name], value[f.name])
                  for f in dataclasses.fields(tp) if f.init}
        return tp(**kwargs)
    if isinstance(tp, type) and issubclass(tp, enum.Enum):
        return tp(value)
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError(f"expected number, got {value!r}")
        return float(value)
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError(f"expected integer, got {value!r}")
        return value
    if tp in (str, bool):
        if not isinstance(value, tp):
            raise TypeError(f"expected {tp.__name__}, got {value!r}")
        return value
    raise TypeError(f"unsupported type {tp!r}")


def from_dict(data: dict[str, Any]) -> AnalysisReport:
    return _decode(AnalysisReport, data)


def to_json(report: AnalysisReport) -> str:
    return json.dumps(to_dict(report), indent=2) + "\n"


def from_json(text: str) -> AnalysisReport:
    return from_dict(json.loads(text))


def input_digest(raw: bytes) -> str:
    return "sha256:" + hashlib.sha256(raw).hexdigest()


# ------------------------------------------------------------------- text

def _iv(iv) -> str:
    return f"[{iv.lo:.3f}, {iv.hi:.3f}]"


def _outcome_lines(t: TestOutcome) -> list[str]:
    lines = [f"  {t.name}: {t.decision.value}"]
    if t.table is not None:
        width = max(len(c) for c in t.table.cols)
        head = "    " + " " * 10 + "".join(f"{c:>{max(width, 20)}}" for c in t.table.cols)
        lines.append(head)
        for name, row in zip(t.table.rows, t.table.cells):
            lines.append(f"    AI(.;{name:<6})" + "".join(f"{_iv(iv):>{max(width, 20)}}" for iv in row))
    for c in t.details:
        if c.count:
            idx = ",".join(str(k) for k in c.violations)
            lines.append(f"    {c.sample} vs {c.reference} {_iv(c.interval)}: outside at {idx} "
                         f"({c.count} >= {c.threshold})" if c.rejects else
                         f"    {c.sample} vs {c.reference} {_iv(c.interval)}: outside at {idx} "
                         f"({c.count} < {c.threshold})")
    return lines


def render_text(report: AnalysisReport) -> str:
    ds = report.dataset
    out = [f"design: {ds.design}  shape: {'x'.join(map(str, ds.shape))}  N={ds.n_total}  "
           f"balanced: {'yes' if ds.balanced else 'no'}"]
    out.append("levels A: " + ", ".join(f"{k + 1}={lab}" for k, lab in enumerate(ds.labels_a)))
    if ds.labels_b is not None:
        out.append("levels B: " + ", ".join(f"{k + 1}={lab}" for k, lab in enumerate(ds.labels_b)))

    diag = report.diagnostics
    out.append("")
    out.append("residual diagnostics")
    for g in diag.groups:
        c = g.outcome.details[0]
        out.append(f"  {g.label:<7} sigma={g.sigma:.3f}  AI={_iv(c.interval)}  singular points={c.count}"
                   f"  {g.outcome.decision.value}")
    if diag.homogeneity is not None:
        out.append(f"  homogeneity of sigma: {diag.homogeneity.decision.value}")
    if diag.common is not None:
        c = diag.common.details[0]
        out.append(f"  common sigma: {diag.common.decision.value}  sigma0={diag.sigma0_raw:.3f}"
                   f"  AI={_iv(c.interval)}")
    if report.status != "complete":
        out.append("")
        out.append(f"HALTED at {report.halted_at}: estimation and effect tests not run")
        return "\n".join(out) + "\n"

    fit = report.fit
    out.append("")
    out.append(f"estimates ({fit.level:.0%} confidence, sigma0={fit.sigma0:.3f}, {fit.path})")
    if fit.means:
        for e in fit.means:
            out.append(f"  {e.name:<6} {e.estimate:9.3f} +- {e.ci.half_width:.3f}")
    for e in fit.effects():
        out.append(f"  {e.name:<6} {e.estimate:9.3f} +- {e.ci.half_width:.3f}")

    out.append("")
    out.append("tests")
    for t in report.tests:
        out.extend(_outcome_lines(t))
    if report.recommendation is not None:
        rec = report.recommendation
        out.append("")
        out.append(f"recommendation ({rec.objective}-the-better): {rec.label} "
                   f"expected response {rec.expected:.3f}")
    return "\n".join(out) + "\n"
