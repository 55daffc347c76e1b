"""Least-squares estimators for the uncertain fixed-effects models.

Every estimator is a linear combination of independent N(., sigma0) errors,
so its law is again normal uncertain with scale ``coef * sigma0``. The ``coef``
values are exact for the closed forms and come from the absolute row sums of
``(X^T X)^+ X^T`` on the matrix path. Reported laws are plug-in: the location
is the estimate itself.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .design import SingleFactorData, TwoFactorData
from .errors import InvalidInputError, WrongPathError
from .linsolve import solve_constrained_ls
from .udist import Interval, NormalUncertain, confidence_interval

__all__ = [
    "Design",
    "Effect",
    "EffectFit",
    "CellMeansFit",
    "DesignMatrices",
    "fit_single_means",
    "fit_single_effects",
    "fit_two_balanced",
    "fit_two_unbalanced",
    "fit_two",
    "build_design",
    "single_residuals",
    "cell_residuals",
]


class Design(str, enum.Enum):
    SINGLE = "single"
    TWO_ADDITIVE = "two-no-interaction"
    TWO_INTERACTION = "two-interaction"


@dataclass(frozen=True)
class Effect:
    name: str
    estimate: float
    coef: float
    dist: NormalUncertain
    ci: Interval

    @classmethod
    def build(cls, name: str, estimate: float, coef: float, sigma0: float, level: float) -> Effect:
        scale = coef * sigma0
        estimate = float(estimate)
        return cls(name, estimate, float(coef), NormalUncertain(estimate, scale),
                   confidence_interval(estimate, scale, level))

    @property
    def scale(self) -> float:
        return self.dist.sigma


@dataclass(frozen=True)
class EffectFit:
    design: Design
    mu: Effect
    a: tuple[Effect, ...]
    sigma0: float
    level: float
    b: tuple[Effect, ...] | None = None
    ab: tuple[tuple[Effect, ...], ...] | None = None
    q_row_abs_sums: tuple[float, ...] | None = None
    path: str = "closed-form"
    #: single-factor level means mu_i, each with law N(mu_i, sigma0)
    means: tuple[Effect, ...] | None = None

    def effects(self):
        yield self.mu
        yield from self.a
        if self.b is not None:
            yield from self.b
        if self.ab is not None:
            for row in self.ab:
                yield from row

    def expected(self, i: int, j: int | None = None) -> float:
        """Fitted response at level ``i`` (single) or cell ``(i, j)``."""
        y = self.mu.estimate + self.a[i].estimate
        if j is not None:
            if self.b is None:
                raise InvalidInputError("single-factor fit has no B levels")
            y += self.b[j].estimate
            if self.ab is not None:
                y += self.ab[i][j].estimate
        return y

    def rescaled(self, sigma0: float, level: float | None = None) -> EffectFit:
        """Same estimates with every law rebuilt for a new ``sigma0`` / CI level."""
        level = self.level if level is None else level

        def re(e: Effect) -> Effect:
            return Effect.build(e.name, e.estimate, e.coef, sigma0, level)

        return replace(
            self,
            mu=re(self.mu),
            a=tuple(re(e) for e in self.a),
            b=None if self.b is None else tuple(re(e) for e in self.b),
            ab=None if self.ab is None else tuple(tuple(re(e) for e in row) for row in self.ab),
            means=None if self.means is None else tuple(re(e) for e in self.means),
            sigma0=float(sigma0),
            level=float(level),
        )


@dataclass(frozen=True)
class CellMeansFit:
    mu_i: tuple[float, ...]


def fit_single_means(d: SingleFactorData) -> CellMeansFit:
    return CellMeansFit(tuple(float(np.mean(row)) for row in d.obs))


def fit_single_effects(d: SingleFactorData, sigma0: float, level: float = 0.95) -> EffectFit:
    n = d.n_total
    mu = float(np.sum(d.values())) / n
    a = tuple(
        Effect.build(f"a{i + 1}", float(np.mean(row)) - mu, 2.0 * (1.0 - m / n), sigma0, level)
        for i, (row, m) in enumerate(zip(d.obs, d.replicates))
    )
    means = tuple(Effect.build(f"mu{i + 1}", float(np.mean(row)), 1.0, sigma0, level)
                  for i, row in enumerate(d.obs))
    return EffectFit(Design.SINGLE, Effect.build("mu", mu, 1.0, sigma0, level), a, float(sigma0), level,
                     means=means)


def fit_two_balanced(
    d: TwoFactorData, interaction: bool, sigma0: float, level: float = 0.95
) -> EffectFit:
    """Closed-form estimators; only valid when every cell has the same count."""
    if not d.balanced:
        raise WrongPathError("data are unbalanced; use fit_two_unbalanced")
    r, s = d.r, d.s
    z = np.array(d.obs, dtype=float)  # r x s x m
    grand = float(z.mean())
    cell = z.mean(axis=2)
    row = cell.mean(axis=1)
    col = cell.mean(axis=0)

    mu = Effect.build("mu", grand, 1.0, sigma0, level)
    a = tuple(Effect.build(f"a{i + 1}", row[i] - grand, 2.0 * (1 - 1 / r), sigma0, level)
              for i in range(r))
    b = tuple(Effect.build(f"b{j + 1}", col[j] - grand, 2.0 * (1 - 1 / s), sigma0, level)
              for j in range(s))
    ab = None
    if interaction:
        coef = 4.0 * (1 - 1 / r - 1 / s + 1 / (r * s))
        ab = tuple(
            tuple(Effect.build(f"ab{i + 1}{j + 1}", cell[i, j] - row[i] - col[j] + grand,
                               coef, sigma0, level) for j in range(s))
            for i in range(r)
        )
    design = Design.TWO_INTERACTION if interaction else Design.TWO_ADDITIVE
    return EffectFit(design, mu, a, float(sigma0), level, b=b, ab=ab)


@dataclass(frozen=True)
class DesignMatrices:
    x: np.ndarray
    c: np.ndarray
    d: np.ndarray
    z: np.ndarray
    layout: dict[str, int]


def build_design(d: TwoFactorData, interaction: bool) -> DesignMatrices:
    """Incidence matrix, weighted sum-to-zero constraints and response vector.

    Columns are ``mu, a_1..a_r, b_1..b_s`` followed, with interaction, by
    ``(ab)_11, (ab)_12, ..., (ab)_rs``. Rows follow cell-major order
    (i, then j, then replicate), matching the response vector.
    """
    r, s = d.r, d.s
    p = 1 + r + s + (r * s if interaction else 0)
    layout = {"mu": 0}
    layout.update({f"a{i + 1}": 1 + i for i in range(r)})
    layout.update({f"b{j + 1}": 1 + r + j for j in range(s)})
    if interaction:
        layout.update({f"ab{i + 1}{j + 1}": 1 + r + s + i * s + j
                       for i in range(r) for j in range(s)})

    rows, z = [], []
    for i, j, cell in d.cells():
        for v in cell:
            x = np.zeros(p)
            x[0] = x[1 + i] = x[1 + r + j] = 1.0
            if interaction:
                x[1 + r + s + i * s + j] = 1.0
            rows.append(x)
            z.append(v)

    w = np.array(d.cell_weights)
    c = [np.zeros(p), np.zeros(p)]
    c[0][1:1 + r] = d.weights_a
    c[1][1 + r:1 + r + s] = d.weights_b
    if interaction:
        off = 1 + r + s
        for i in range(r):
            row = np.zeros(p)
            row[off + i * s: off + (i + 1) * s] = w[i]
            c.append(row)
        for j in range(s):
            row = np.zeros(p)
            row[[off + i * s + j for i in range(r)]] = w[:, j]
            c.append(row)
    c = np.array(c)
    return DesignMatrices(np.array(rows), c, np.zeros(len(c)), np.array(z), layout)


def fit_two_unbalanced(
    d: TwoFactorData, interaction: bool, sigma0: float, level: float = 0.95
) -> EffectFit:
    """Matrix path: constrained least squares, scales from ``|Q|`` row sums."""
    dm = build_design(d, interaction)
    sol = solve_constrained_ls(dm.x, dm.z, dm.c, dm.d)
    coef = sol.q_row_abs_sums
    beta = sol.beta

    def eff(name: str) -> Effect:
        k = dm.layout[name]
        return Effect.build(name, beta[k], coef[k], sigma0, level)

    mu = eff("mu")
    a = tuple(eff(f"a{i + 1}") for i in range(d.r))
    b = tuple(eff(f"b{j + 1}") for j in range(d.s))
    ab = None
    if interaction:
        ab = tuple(tuple(eff(f"ab{i + 1}{j + 1}") for j in range(d.s)) for i in range(d.r))
    design = Design.TWO_INTERACTION if interaction else Design.TWO_ADDITIVE
    return EffectFit(design, mu, a, float(sigma0), level, b=b, ab=ab,
                     q_row_abs_sums=tuple(float(v) for v in coef), path="matrix")


def fit_two(d: TwoFactorData, interaction: bool, sigma0: float, level: float = 0.95) -> EffectFit:
    """Closed form when balanced, matrix path otherwise."""
    if d.balanced:
        return fit_two_balanced(d, interaction, sigma0, level)
    return fit_two_unbalanced(d, interaction, sigma0, level)


def single_residuals(d: SingleFactorData, means: CellMeansFit) -> tuple[tuple[float, ...], ...]:
    return tuple(tuple(z - m for z in row) for row, m in zip(d.obs, means.mu_i))


def cell_residuals(d: TwoFactorData, fit: EffectFit) -> tuple[tuple[float, ...], ...]:
    """Residuals per cell in row-major order: (1,1), (1,2), ..., (r,s)."""
    return tuple(tuple(z - fit.expected(i, j) for z in cell) for i, j, cell in d.cells())
