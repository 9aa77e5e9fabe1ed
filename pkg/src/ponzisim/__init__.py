"""Pooled-income investment dynamics.

Three demographic laws (geometric, quasi-logistic, SIR-based) feed one
capital budget recursion; the package provides the closed-form solutions,
their defining recursion oracles, critical-time formulas, traffic-light
classification, no-Ponzi-game viability scans, chained runs, and a
continuous-time variant built on a Gauss hypergeometric evaluator.
"""

from .capital import (
    CapitalPath,
    budget_recursion_oracle,
    capital_path_from_series,
    geometric_capital,
    geometric_capital_series,
    nssir_capital,
    nssir_capital_peak_no_market,
    nssir_capital_series,
    ql_capital,
    ql_capital_peak_no_market,
    ql_capital_series,
)
from .continuum import (
    ContinuumParams,
    Hyp2F1Query,
    continuous_budget_rhs,
    continuous_capital,
    continuous_inflow_rate,
    continuous_inverse_time,
    continuous_outflow_rate,
    continuous_population,
    continuous_population_peak,
    hyp2f1,
    hyp2f1_query,
    logistic_exp_antiderivative,
)
from .criticality import (
    GREEN,
    RED,
    YELLOW,
    CriticalTimes,
    NpgSurface,
    TrafficLight,
    classify,
    geometric_critical_times,
    npg_scan,
    run_to_termination,
    termination_time,
)
from .demography import (
    NEVER,
    UNDEFINED,
    PopulationPath,
    geometric_path,
    geometric_path_recursion,
    nssir_infection_peak,
    nssir_path,
    nssir_path_recursion,
    quasi_logistic_active,
    quasi_logistic_count,
    quasi_logistic_path,
    quasi_logistic_path_recursion,
    quasi_logistic_population_peak,
    quasi_logistic_rate,
    quasi_logistic_turning_point,
    sir_recovered,
    sir_standard_path,
)
from .errors import (
    ConfigError,
    HorizonMismatchError,
    InvalidParameterError,
    NumericFailureError,
    PonzisimError,
    UnreachableThresholdError,
)
from .linrec import (
    AticiParams,
    ExponentialTerm,
    ParlarParams,
    RecurrenceSpec,
    SpreadsheetParams,
    StylisticParams,
    iterate_linear_recurrence,
    reference_model_capital,
    solve_linear_recurrence,
)
from .params import CapitalParams, GeometricParams, QuasiLogisticParams, SirParams
from .recurrent import ChainResult, ChainRun, RunSpec, chain_runs
from .scenario import ScenarioConfig, dump_scenario, load_scenario, parse_scenario, scenario_to_dict

__version__ = "0.1.0"
