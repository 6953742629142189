"""Treatment-effect estimation in high-dimensional linear models.

The package combines a cross-validated elastic-net outcome regression with
quadratic-program balancing weights applied to its residuals, next to the
usual weighting and regression baselines, plus synthetic designs and a Monte
Carlo harness for benchmarking them against each other.
"""

from .bench import (Comparison, ExperimentSpec, ResultsRow, ResultsTable,
                    compare_to_reference, emit_table, load_reference, read_table,
                    run_experiment)
from .data import (ArmView, DataError, Dataset, TargetMean, load_csv, save_csv,
                   split_by_arm, treated_mean_covariates)
from .elnet import (ConvergenceWarning, CvPath, LinearFit, PenaltyConfig, cv_select,
                    fit_cv, fit_gaussian, fit_logistic, predict)
from .estimators import (METHODS, EstimateReport, EstimationError, FitPlan, SharedFits,
                         aipw, arb_ate, arb_att, balance_only, double_selection_ols,
                         enet_only, estimate, ipw, naive, tmle_style, variance_att,
                         weighted_enet)
from .sims import (BetaModel, SimDraw, SimulationDesign, draw, draw_many_cluster,
                   draw_misspecified, draw_moderately_sparse_two_stage,
                   draw_sparse_two_stage, draw_two_cluster, make_beta)
from .weights import (BalanceInfeasibleError, BalanceProblem, BalanceWeights,
                      ipw_weights, min_sup_imbalance, solve_constraint, solve_entropy,
                      solve_lagrange, solve_stable)

__version__ = "0.1.0"
