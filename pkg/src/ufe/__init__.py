"""Uncertain fixed-effects analysis of single- and two-factor designs."""

__version__ = "0.1.0"

from .design import (  # noqa: E402
    AdjustedSample,
    Origin,
    SingleFactorData,
    TwoFactorData,
    adjust_cell,
    adjust_shift,
    collapse_by_factor,
    load_csv,
    parse_csv,
)
from .errors import (  # noqa: E402
    DegenerateGroupError,
    InfeasibleConstraintsError,
    InvalidInputError,
    SchemaError,
    SequencingError,
    UFEError,
    WrongPathError,
)
from .estimators import (  # noqa: E402
    EffectFit,
    fit_single_effects,
    fit_single_means,
    fit_two,
    fit_two_balanced,
    fit_two_unbalanced,
)
from .linsolve import pinv, solve_constrained_ls  # noqa: E402
from .report import AnalysisReport, analyze  # noqa: E402
from .udist import Interval, NormalUncertain, acceptance_interval, confidence_interval  # noqa: E402
from .uhtest import CountingRule, Decision, diagnose_residuals  # noqa: E402

__all__ = [
    "__version__",
    "AdjustedSample", "Origin", "SingleFactorData", "TwoFactorData", "adjust_cell",
    "adjust_shift", "collapse_by_factor", "load_csv", "parse_csv",
    "DegenerateGroupError", "InfeasibleConstraintsError", "InvalidInputError", "SchemaError",
    "SequencingError", "UFEError", "WrongPathError",
    "EffectFit", "fit_single_effects", "fit_single_means", "fit_two", "fit_two_balanced",
    "fit_two_unbalanced", "pinv", "solve_constrained_ls", "AnalysisReport", "analyze",
    "Interval", "NormalUncertain", "acceptance_interval", "confidence_interval",
    "CountingRule", "Decision", "diagnose_residuals",
]
