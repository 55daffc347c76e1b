import pytest

from ufe import DegenerateGroupError, InvalidInputError, SequencingError, TwoFactorData
from ufe.estimators import fit_two
from ufe.udist import Interval
from ufe.uhtest import (
    CountingRule,
    Decision,
    common_sigma,
    count_test,
    diagnose_residuals,
    fix,
    homogeneity_effects,
    homogeneity_main_effect,
    homogeneity_sigma,
    interaction_test,
    residual_normality,
)


@pytest.mark.parametrize("alpha, m, want", [
    (0.05, 5, 1), (0.05, 20, 1), (0.05, 21, 2), (0.1, 30, 3), (0.1, 31, 4), (0.3, 10, 3),
])
def test_counting_threshold(alpha, m, want):
    assert CountingRule(alpha).threshold(m) == want


def test_counting_rule_validates_alpha():
    with pytest.raises(InvalidInputError):
        CountingRule(0.0)
    with pytest.raises(InvalidInputError):
        CountingRule(1.0)


def test_count_test_is_strict_at_boundary():
    c = count_test([-1.0, 0.0, 1.0, 1.5], Interval(-1.0, 1.0), CountingRule(0.05), "z", "t")
    assert c.violations == (4,)
    assert c.rejects


def test_count_test_empty_sample():
    with pytest.raises(InvalidInputError):
        count_test([], Interval(0, 1), CountingRule(0.05))


def test_residual_normality_degenerate():
    with pytest.raises(DegenerateGroupError):
        residual_normality([1.0], 0.05)
    with pytest.raises(DegenerateGroupError):
        residual_normality([0.0, 0.0], 0.05)


def test_residual_normality_flags_outlier():
    g = residual_normality([0.1, -0.1, 0.1, -0.1, 0.1, -0.1, 0.1, -0.1, 0.1, 5.0], 0.05)
    assert g.outcome.decision is Decision.REJECT


def test_homogeneity_sigma_detects_scale_mismatch():
    tight = [0.01, -0.01, 0.02, -0.02, 0.01, -0.01]
    wide = [5.0, -5.0, 4.0, -4.0, 6.0, -6.0]
    out = homogeneity_sigma([tight, wide], 0.05)
    assert out.rejected
    # the wide group falls outside the tight group's AI
    assert ("eps2", "sigma_eps1") in out.violations()


def test_common_sigma_requires_homogeneity_first():
    groups = [[1.0, -1.0], [2.0, -2.0]]
    with pytest.raises(SequencingError):
        common_sigma(groups, 0.05, None)


def test_diagnostics_halt_before_common_sigma():
    tight = [0.01, -0.01, 0.02, -0.02, 0.01, -0.01]
    wide = [5.0, -5.0, 4.0, -4.0, 6.0, -6.0]
    diag = diagnose_residuals([tight, wide], 0.05)
    assert diag.halted_at == "homogeneity-sigma"
    assert diag.common is None and diag.sigma0 is None
    with pytest.raises(SequencingError):
        diag.require_passed()


def test_diagnostics_rounding():
    diag = diagnose_residuals([[1.0, -1.2, 0.9], [1.1, -1.0, 0.95]], 0.05, decimals=3)
    assert diag.passed
    assert diag.sigma0 == round(diag.sigma0_raw, 3)
    assert diag.group_sigmas == tuple(round(g.sigma, 3) for g in diag.groups)


def test_fix():
    assert fix(1.23456, 3) == 1.235
    assert fix(1.23456, None) == 1.23456


def test_homogeneity_effects_table_layout():
    out = homogeneity_effects([[1.0, 2.0], [10.0, 11.0]], [1.5, 10.5], [0.5, 0.6], 0.05,
                              sample_labels=["z1", "z2"], reference_labels=["m1", "m2"])
    assert out.table.rows == ("m1", "m2")
    assert out.table.cols == ("z1", "z2")
    # row = reference center, column = sample scale
    assert out.table[1, 0].center == pytest.approx(10.5)
    assert out.table[1, 0].half_width == pytest.approx(0.5 * 2.0198273956703003)
    assert out.rejected
    assert out.violations() == {("z1", "m2"): (1, 2), ("z2", "m1"): (1, 2)}


def test_homogeneity_effects_validates():
    with pytest.raises(InvalidInputError):
        homogeneity_effects([[1.0]], [0.0], [1.0], 0.05)
    with pytest.raises(DegenerateGroupError):
        homogeneity_effects([[1.0], [2.0]], [0.0, 0.0], [1.0, 0.0], 0.05)


def test_main_effect_and_interaction_need_replicates():
    d = TwoFactorData((((1.0,), (2.0,)), ((3.0,), (4.5,))))
    fit = fit_two(d, True, 1.0)
    with pytest.raises(DegenerateGroupError):
        interaction_test(d, fit, 0.05)
    additive = fit_two(d, False, 1.0)
    with pytest.raises(InvalidInputError):
        interaction_test(d, additive, 0.05)
    with pytest.raises(InvalidInputError):
        homogeneity_main_effect(d, "C", fit, 0.05)
