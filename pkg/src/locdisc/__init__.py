"""Localized discrepancies between domains for binary hypothesis classes.

Population values (closed-form masses, grid search with refinement) and exact
empirical values (candidate enumeration) of the hdh-divergence, the
disparity discrepancy and their localized and boosted versions, plus the
sample objectives and the bounds built on them.
"""

from .discrepancy import (
    DiscrepancyKind,
    DiscrepancyReport,
    EmptyLocalizedSpace,
    boosted_localized_hdh,
    compute,
    disparity_discrepancy,
    hdh_divergence,
    ideal_joint_error,
    localized_disparity,
    localized_hdh,
)
from .domains import Dataset, Domain, Marginal1D, Marginal2D, empirical_error, expected_error, mass, sample
from .hypotheses import HypothesisClass, Linear2D, Threshold, disagreement_region, predict
from .localization import LocalizationConstants, RadiusTooSmall, c_minus, c_plus, containment_frequency, epsilon_term
from .objectives import (
    BoundReport,
    ObjectiveInfeasible,
    ObjectiveSolution,
    check_prop_54,
    classical_rhs,
    enumerate_population_bounds,
    error_bound_rhs_thm32,
    error_bound_rhs_thm62,
    gen_bound_rhs,
    solve_objective_13,
    solve_objective_16,
    solve_objective_21,
)
from .oracle import oracle_sup

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
