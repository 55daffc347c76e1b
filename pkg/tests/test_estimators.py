from fractions import Fraction

import numpy as np
import pytest

from _gen import balanced_two, unbalanced_two
from ufe import SingleFactorData, TwoFactorData, WrongPathError
from ufe.estimators import (
    Design,
    build_design,
    cell_residuals,
    fit_single_effects,
    fit_single_means,
    fit_two,
    fit_two_balanced,
    fit_two_unbalanced,
    single_residuals,
)

EX3 = TwoFactorData((((61, 73, 52), (79, 65, 81)), ((42, 53), (37, 32, 50))))


def test_single_effects_closed_form():
    d = SingleFactorData(((1.0, 3.0), (4.0, 5.0, 6.0)))
    fit = fit_single_effects(d, sigma0=1.0)
    assert fit.design is Design.SINGLE
    assert fit.mu.estimate == pytest.approx(19 / 5)
    assert [e.estimate for e in fit.a] == pytest.approx([2 - 19 / 5, 5 - 19 / 5])
    assert [e.coef for e in fit.a] == pytest.approx([2 * (1 - 2 / 5), 2 * (1 - 3 / 5)])
    assert [e.estimate for e in fit.means] == pytest.approx([2.0, 5.0])
    # weighted effects sum to zero
    assert sum(m * e.estimate for m, e in zip(d.replicates, fit.a)) == pytest.approx(0, abs=1e-12)


def test_single_residuals_center_each_level():
    d = SingleFactorData(((1.0, 3.0), (4.0, 5.0, 6.0)))
    res = single_residuals(d, fit_single_means(d))
    assert res == ((-1.0, 1.0), (-1.0, 0.0, 1.0))


def test_balanced_closed_form_coefficients():
    d = balanced_two(np.random.default_rng(0))
    r, s = d.r, d.s
    fit = fit_two_balanced(d, True, sigma0=2.0)
    assert fit.mu.scale == pytest.approx(2.0)
    assert fit.a[0].coef == pytest.approx(2 * (1 - 1 / r))
    assert fit.b[0].coef == pytest.approx(2 * (1 - 1 / s))
    assert fit.ab[0][0].coef == pytest.approx(4 * (1 - 1 / r) * (1 - 1 / s))


def test_balanced_path_refuses_unbalanced():
    with pytest.raises(WrongPathError):
        fit_two_balanced(EX3, True, 1.0)


def test_dispatch_picks_path():
    assert fit_two(EX3, True, 1.0).path == "matrix"
    d = TwoFactorData((((1.0, 2.0), (3.0, 4.0)), ((5.0, 6.0), (7.0, 9.0))))
    assert fit_two(d, True, 1.0).path == "closed-form"


def test_matrix_path_example3_estimates():
    fit = fit_two_unbalanced(EX3, True, sigma0=1.0)
    beta = [e.estimate for e in fit.effects()]
    want = [56.818, 11.852, -14.222, -2.040, 1.700, -4.630, 4.630, 6.944, -4.630]
    assert beta == pytest.approx(want, abs=1e-3)


def test_matrix_path_example3_scales_are_exact_fractions():
    fit = fit_two_unbalanced(EX3, True, sigma0=1.0)
    want = [Fraction(4, 9)] + [Fraction(2, 3)] * 4 + [Fraction(1)] * 4
    assert fit.q_row_abs_sums == pytest.approx([float(w) for w in want], abs=1e-12)


def test_design_matrix_layout():
    dm = build_design(EX3, True)
    assert dm.x.shape == (11, 9)
    assert dm.c.shape == (6, 9)
    assert dm.layout["ab21"] == 7
    np.testing.assert_array_equal(dm.x.sum(axis=1), np.full(11, 4.0))


def _nullspace_fit(d, interaction):
    # independent oracle: parametrise the constraint null space, then plain lstsq
    dm = build_design(d, interaction)
    _, s, vt = np.linalg.svd(dm.c)
    rank = int((s > 1e-12 * s.max()).sum())
    n = vt[rank:].T
    y = np.linalg.lstsq(dm.x @ n, dm.z, rcond=None)[0]
    return n @ y


@pytest.mark.parametrize("seed", range(15))
@pytest.mark.parametrize("interaction", [True, False])
def test_matrix_path_matches_nullspace_oracle(seed, interaction):
    d = unbalanced_two(np.random.default_rng(seed))
    fit = fit_two_unbalanced(d, interaction, 1.0)
    beta = np.array([e.estimate for e in fit.effects()])
    np.testing.assert_allclose(beta, _nullspace_fit(d, interaction), atol=1e-8)


@pytest.mark.parametrize("seed", range(10))
def test_interaction_fit_reproduces_cell_means(seed):
    d = unbalanced_two(np.random.default_rng(100 + seed))
    fit = fit_two(d, True, 1.0)
    for i, j, cell in d.cells():
        assert fit.expected(i, j) == pytest.approx(np.mean(cell), abs=1e-9)


def test_cell_residuals_order():
    fit = fit_two(EX3, True, 1.0)
    res = cell_residuals(EX3, fit)
    assert len(res) == 4
    assert res[2] == pytest.approx((42 - 47.5, 53 - 47.5))


def test_rescaled_keeps_estimates():
    fit = fit_two(EX3, True, 1.0)
    re = fit.rescaled(7.429, level=0.95)
    assert [e.estimate for e in re.effects()] == [e.estimate for e in fit.effects()]
    assert re.mu.ci.half_width == pytest.approx(6.669, abs=1e-3)
