"""Publication-bias diagnostics for meta-analysis under a correlated selection model.

Thin Python wrapper around the C++ core: dataset construction, the
sup-score bootstrap test, comparator tests, selection-model sensitivity
fits, and the study generators used by the Monte-Carlo harness.
"""

from ._core import (
    ComparatorResult,
    DataError,
    Dataset,
    GridPoint,
    GridSpec,
    ModelError,
    NullFit,
    ScoreTestResult,
    SensitivityFit,
    Study,
    copas_loglik,
    copas_naive_test,
    default_grid,
    efficient_information,
    egger_test,
    fit_null,
    fit_sensitivity,
    generate,
    score_rho_at_null,
    selection_prob,
    sup_score_test,
    trim_and_fill,
)

__all__ = [
    "ComparatorResult",
    "DataError",
    "Dataset",
    "GridPoint",
    "GridSpec",
    "ModelError",
    "NullFit",
    "ScoreTestResult",
    "SensitivityFit",
    "Study",
    "copas_loglik",
    "copas_naive_test",
    "default_grid",
    "efficient_information",
    "egger_test",
    "fit_null",
    "fit_sensitivity",
    "generate",
    "score_rho_at_null",
    "selection_prob",
    "sup_score_test",
    "trim_and_fill",
]

__version__ = "0.1.0"
