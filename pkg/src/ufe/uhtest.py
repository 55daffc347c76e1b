"""Acceptance-interval hypothesis tests.

Every test reduces to the same counting rule: a sample of size ``m`` is
compared with an acceptance interval and the hypothesis is rejected when at
least ``ceil(alpha * m)`` (and at least one) of its points fall strictly
outside. Composite hypotheses reject as soon as any component does.

``decimals`` arguments mirror the convention of publishing fitted constants
(sigmas, plug-in effects) at a fixed number of decimals and then treating the
published value as known; ``None`` keeps full precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .design import Origin, TwoFactorData, adjust_cell, adjust_shift, collapse_by_factor, moment_sigma
from .errors import DegenerateGroupError, InvalidInputError, SequencingError
from .estimators import EffectFit, cell_residuals
from .udist import Interval, acceptance_interval

__all__ = [
    "Decision",
    "CountingRule",
    "SampleCheck",
    "AiTable",
    "TestOutcome",
    "GroupCheck",
    "ResidualDiagnostics",
    "fix",
    "count_test",
    "residual_normality",
    "homogeneity_sigma",
    "common_sigma",
    "diagnose_residuals",
    "homogeneity_effects",
    "homogeneity_main_effect",
    "interaction_test",
]


def fix(x: float, decimals: int | None) -> float:
    """Round a fitted constant to its published precision (no-op for ``None``)."""
    return float(x) if decimals is None else round(float(x), decimals)


class Decision(str, enum.Enum):
    REJECT = "reject"
    FAIL_TO_REJECT = "fail-to-reject"


@dataclass(frozen=True)
class CountingRule:
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha!r}")

    def threshold(self, m: int) -> int:
        # exact decimal arithmetic: 0.1 * 30 must give 3, not 3.0000000000000004
        return max(1, math.ceil(Fraction(repr(float(self.alpha))) * m))


@dataclass(frozen=True)
class SampleCheck:
    sample: str
    reference: str
    interval: Interval
    violations: tuple[int, ...]  # 1-based positions in the sample
    count: int
    threshold: int

    @property
    def rejects(self) -> bool:
        return self.count >= self.threshold


def count_test(
    sample: Sequence[float],
    ai: Interval,
    rule: CountingRule,
    sample_id: str = "",
    reference_id: str = "",
) -> SampleCheck:
    if len(sample) == 0:
        raise InvalidInputError("count_test needs a nonempty sample")
    bad = tuple(k + 1 for k, x in enumerate(sample) if ai.excludes(x))
    return SampleCheck(sample_id, reference_id, ai, bad, len(bad), rule.threshold(len(sample)))


@dataclass(frozen=True)
class AiTable:
    """Acceptance intervals laid out as rows = reference parameter, columns = sample."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    cells: tuple[tuple[Interval, ...], ...]

    def __getitem__(self, key: tuple[int, int]) -> Interval:
        return self.cells[key[0]][key[1]]


@dataclass(frozen=True)
class TestOutcome:
    name: str
    details: tuple[SampleCheck, ...]
    table: AiTable | None = None
    decision: Decision = field(init=False)

    __test__ = False  # not a pytest class

    def __post_init__(self):
        rejected = any(c.rejects for c in self.details)
        object.__setattr__(self, "decision", Decision.REJECT if rejected else Decision.FAIL_TO_REJECT)

    @property
    def rejected(self) -> bool:
        return self.decision is Decision.REJECT

    def violations(self) -> dict[tuple[str, str], tuple[int, ...]]:
        return {(c.sample, c.reference): c.violations for c in self.details if c.count}


# ---------------------------------------------------------------- diagnostics

@dataclass(frozen=True)
class GroupCheck:
    label: str
    sigma: float  # full precision moment estimate about zero
    outcome: TestOutcome


def residual_normality(residuals: Sequence[float], alpha: float, label: str = "eps") -> GroupCheck:
    """Test a residual group against its own N(0, sigma) acceptance interval."""
    if len(residuals) < 2:
        raise DegenerateGroupError(f"group {label} has {len(residuals)} residual(s); need >= 2")
    sigma = moment_sigma(residuals, 0.0)
    if sigma == 0.0:
        raise DegenerateGroupError(f"group {label} has zero spread; its scale cannot be tested")
    check = count_test(residuals, acceptance_interval(0.0, sigma, alpha), CountingRule(alpha),
                       label, f"sigma_{label}")
    return GroupCheck(label, sigma, TestOutcome(f"normality[{label}]", (check,)))


def _group_labels(n: int, labels: Sequence[str] | None, stem: str) -> tuple[str, ...]:
    labels = tuple(labels) if labels is not None else tuple(f"{stem}{k + 1}" for k in range(n))
    if len(labels) != n:
        raise InvalidInputError("one label per group required")
    return labels


def homogeneity_sigma(
    groups: Sequence[Sequence[float]],
    alpha: float,
    sigmas: Sequence[float] | None = None,
    labels: Sequence[str] | None = None,
) -> TestOutcome:
    """Cross-check every residual group against every other group's N(0, sigma_j)."""
    if len(groups) < 2:
        raise InvalidInputError("homogeneity of sigma needs >= 2 groups")
    labels = _group_labels(len(groups), labels, "eps")
    if sigmas is None:
        sigmas = [residual_normality(g, alpha, lab).sigma for g, lab in zip(groups, labels)]
    if any(s <= 0 for s in sigmas):
        raise DegenerateGroupError("every group scale must be > 0")
    rule = CountingRule(alpha)
    ais = [acceptance_interval(0.0, s, alpha) for s in sigmas]
    details = tuple(
        count_test(groups[i], ais[j], rule, labels[i], f"sigma_{labels[j]}")
        for i in range(len(groups)) for j in range(len(groups)) if i != j
    )
    table = AiTable(tuple(f"sigma_{lab}" for lab in labels), labels,
                    tuple(tuple(ais[j] for _ in labels) for j in range(len(labels))))
    return TestOutcome("homogeneity-sigma", details, table)


def common_sigma(
    groups: Sequence[Sequence[float]],
    alpha: float,
    homogeneity: TestOutcome | None,
) -> tuple[TestOutcome, float | None]:
    """Pool all residuals and test them against N(0, sigma0) with the pooled sigma0.

    Returns the outcome and the full-precision ``sigma0`` (``None`` on rejection).
    """
    if homogeneity is None or homogeneity.rejected:
        raise SequencingError("the common-sigma test requires a non-rejected homogeneity-of-sigma test")
    pooled = [x for g in groups for x in g]
    sigma0 = moment_sigma(pooled, 0.0)
    if sigma0 == 0.0:
        raise DegenerateGroupError("pooled residuals have zero spread")
    check = count_test(pooled, acceptance_interval(0.0, sigma0, alpha), CountingRule(alpha),
                       "eps", "sigma0")
    outcome = TestOutcome("common-sigma", (check,))
    return outcome, (None if outcome.rejected else sigma0)


@dataclass(frozen=True)
class ResidualDiagnostics:
    groups: tuple[GroupCheck, ...]
    homogeneity: TestOutcome | None
    common: TestOutcome | None
    sigma0_raw: float | None
    sigma0: float | None  # published constant handed to estimation
    decimals: int | None = None

    @property
    def halted_at(self) -> str | None:
        if any(g.outcome.rejected for g in self.groups):
            return "normality"
        if self.homogeneity is None or self.homogeneity.rejected:
            return "homogeneity-sigma"
        if self.common is None or self.common.rejected:
            return "common-sigma"
        return None

    @property
    def passed(self) -> bool:
        return self.halted_at is None and self.sigma0 is not None

    @property
    def group_sigmas(self) -> tuple[float, ...]:
        """Published per-group sigmas used by the downstream tests."""
        return tuple(fix(g.sigma, self.decimals) for g in self.groups)

    def require_passed(self) -> float:
        if not self.passed:
            raise SequencingError(f"residual diagnostics did not pass (stopped at {self.halted_at})")
        return self.sigma0


def diagnose_residuals(
    groups: Sequence[Sequence[float]],
    alpha: float,
    labels: Sequence[str] | None = None,
    decimals: int | None = None,
) -> ResidualDiagnostics:
    """Normality per group, then homogeneity of sigma, then the common sigma.

    Each stage runs only if the previous one did not reject.
    """
    labels = _group_labels(len(groups), labels, "eps")
    checks = tuple(residual_normality(g, alpha, lab) for g, lab in zip(groups, labels))
    if any(c.outcome.rejected for c in checks):
        return ResidualDiagnostics(checks, None, None, None, None, decimals)
    sigmas = [fix(c.sigma, decimals) for c in checks]
    homog = homogeneity_sigma(groups, alpha, sigmas, labels)
    if homog.rejected:
        return ResidualDiagnostics(checks, homog, None, None, None, decimals)
    common, raw = common_sigma(groups, alpha, homog)
    return ResidualDiagnostics(checks, homog, common, raw,
                               None if raw is None else fix(raw, decimals), decimals)


# -------------------------------------------------------------- effect tests

def homogeneity_effects(
    groups: Sequence[Sequence[float]],
    centers: Sequence[float],
    sigmas: Sequence[float],
    alpha: float,
    mu0: float = 0.0,
    name: str = "H0 effects",
    sample_labels: Sequence[str] | None = None,
    reference_labels: Sequence[str] | None = None,
    origin: Origin = Origin.SHIFT,
) -> TestOutcome:
    """Homogeneity of level means (``mu0 = 0``) or of effects (``mu0`` = overall mean).

    Sample ``i`` is shifted by ``mu0`` and checked against
    ``AI(center_j, sigma_i)`` for every ``j != i``.
    """
    r = len(groups)
    if not (len(centers) == len(sigmas) == r):
        raise InvalidInputError("groups, centers and sigmas must have equal length")
    if r < 2:
        raise InvalidInputError("homogeneity test needs >= 2 groups")
    if any(not s > 0 for s in sigmas):
        raise DegenerateGroupError("every group scale must be > 0")
    samples = _group_labels(r, sample_labels, "z")
    refs = _group_labels(r, reference_labels, "theta")
    adjusted = [adjust_shift(g, mu0, origin).values for g in groups]
    rule = CountingRule(alpha)
    cells = tuple(
        tuple(acceptance_interval(centers[j], sigmas[i], alpha) for i in range(r))
        for j in range(r)
    )
    details = tuple(
        count_test(adjusted[i], cells[j][i], rule, samples[i], refs[j])
        for i in range(r) for j in range(r) if i != j
    )
    return TestOutcome(name, details, AiTable(refs, samples, cells))


def homogeneity_main_effect(
    d: TwoFactorData, which: str, fit: EffectFit, alpha: float, decimals: int | None = None
) -> TestOutcome:
    """Collapse over the other factor, then run the single-factor effects test.

    The level scale is the spread of each merged sample about its own mean.
    """
    if which not in ("A", "B"):
        raise InvalidInputError(f"which must be 'A' or 'B', got {which!r}")
    effects = fit.a if which == "A" else fit.b
    if effects is None:
        raise InvalidInputError("fit has no effects for factor B")
    collapsed = collapse_by_factor(d, which)
    sigmas = []
    for k, g in enumerate(collapsed.obs):
        if len(g) < 2:
            raise DegenerateGroupError(f"level {which}{k + 1} has fewer than 2 observations")
        s = fix(moment_sigma(g, sum(g) / len(g)), decimals)
        if s == 0.0:
            raise DegenerateGroupError(f"level {which}{k + 1} has zero spread")
        sigmas.append(s)
    stem = "zt" if which == "A" else "zc"
    eff = "a" if which == "A" else "b"
    return homogeneity_effects(
        collapsed.obs,
        [fix(e.estimate, decimals) for e in effects],
        sigmas,
        alpha,
        mu0=fix(fit.mu.estimate, decimals),
        name=f"H0_{which}",
        sample_labels=[f"{stem}{k + 1}" for k in range(len(effects))],
        reference_labels=[f"{eff}{k + 1}0" for k in range(len(effects))],
        origin=Origin.COLLAPSED_A if which == "A" else Origin.COLLAPSED_B,
    )


def interaction_test(
    d: TwoFactorData, fit: EffectFit, alpha: float, decimals: int | None = None
) -> TestOutcome:
    """Union over cells of two-sided tests on ``z - mu0 - a_i0 - b_j0``."""
    if fit.ab is None or fit.b is None:
        raise InvalidInputError("interaction test needs a fit with interaction terms")
    residuals = cell_residuals(d, fit)
    rule = CountingRule(alpha)
    mu0 = fix(fit.mu.estimate, decimals)
    details = []
    for (i, j, cell), res in zip(d.cells(), residuals):
        if len(cell) < 2:
            raise DegenerateGroupError(f"cell ({i + 1},{j + 1}) has fewer than 2 replicates")
        sigma = fix(moment_sigma(res, 0.0), decimals)
        if sigma == 0.0:
            raise DegenerateGroupError(f"cell ({i + 1},{j + 1}) residuals have zero spread")
        adj = adjust_cell(d, i, j, mu0, fix(fit.a[i].estimate, decimals), fix(fit.b[j].estimate, decimals))
        details.append(count_test(adj.values, acceptance_interval(0.0, sigma, alpha), rule,
                                  f"zb{i + 1}{j + 1}", f"sigma_{i + 1}{j + 1}"))
    return TestOutcome("H0_AB", tuple(details))
