"""Hybrid Stackelberg reinsurance-investment game with bounded memory.

One reinsurer prices proportional reinsurance for two competing insurers;
all three invest in a risky asset with price-level-dependent volatility, and
every wealth process reacts to its own recent history.  The package
evaluates the closed-form equilibrium and value functions, verifies them
against brute-force, ODE and Monte Carlo oracles, and exposes a CLI for
table/figure-style CSV output.
"""

from .params import (
    ClaimModel,
    CheckedScenario,
    DegenerateBand,
    DelaySpec,
    DerivedDelayCoeffs,
    EtaOutOfRange,
    FinancialMarket,
    NO_DELAY,
    ParameterError,
    Preferences,
    ScenarioConfig,
    SingleInsurerScenario,
    ValidationError,
    derive_delay_coefficients,
    derive_eta2,
    load_scenario,
    load_scenario_file,
    premium_bounds,
    validate,
    validate_single,
)
from .kernels import KernelEval, eval_case_constants, eval_g1, eval_g_plain, eval_phi
from .equilibrium import (
    CaseId,
    EquilibriumPoint,
    NoCaseMatched,
    PremiumRetention,
    best_response_retention,
    classify_case,
    equilibrium_point,
    investment_strategies,
    no_delay_strategy,
    premium_and_retention,
    single_insurer_strategy,
)
from .value_functions import (
    G2Eval,
    HJBResidual,
    QuadratureFailure,
    ValueEval,
    g2_eval,
    g2_piecewise,
    hjb_residual_F,
    hjb_residual_L,
    value_F,
    value_L,
)
from .oracle import (
    GridSpec,
    NoConvergence,
    brute_force_insurer_response,
    brute_force_premium,
    nash_fixed_point,
    ode_check_kernels,
)
from .simulator import (
    BACKEND,
    MCEstimate,
    PathState,
    SimConfig,
    SimResult,
    build_policy,
    perturb_policy,
    simulate_terminal_utilities,
    step,
)

__version__ = "0.1.0"
