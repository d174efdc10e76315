"""Tests for common arrival of price jumps and spot-volatility jumps in high-frequency data."""

from .core import (AssumptionIndices, CojumpError, ConfigurationError, DataError,
                   SampledPath, SamplingGrid, SizingError, TuningParams,
                   UndefinedStatistic, ValidationReport, derive_sequences,
                   validate_rate_conditions)
from .functionals import (TestFunction, derived_G_common, derived_G_disjoint,
                          evaluate_U, g_llr)
from .data import RunConfig, ingest_csv, load_config, to_weekly_paths
from .empirical import run_pipeline
from .harness import ExperimentPlan, decision_matrix, kde, run_experiment
from .pipeline import analyze_path, compute_statistics, path_reports
from .simulator import ScenarioParams, scenario_table, simulate_diffusion, simulate_week
from .stattests import (TestReport, chisq_quantile, normal_quantile_two_sided,
                        statistic_Sn, test_common, test_disjoint_chebyshev,
                        test_disjoint_pivotal, test_disjoint_simulated,
                        truncation_vn, variance_Vn)
from .volatility import (bipower_variation, detect_jumps, local_vol,
                         truncation_threshold)

__version__ = "0.1.0"
