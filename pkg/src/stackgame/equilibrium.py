"""Equilibrium strategies: investments, the ten-case premium/retention
schedule, follower responses, and the no-delay and single-insurer reductions.

The leader announces a premium; the two followers play a coupled retention
game whose solution is a clamped linear fixed point; the leader prices
against those responses.  Which branch applies at a given time is decided
by the ten condition sets in :func:`classify_case`; the sets can co-hold
(a capped-regime candidate and the interior candidate may both be
follower-consistent), in which case the leader takes the better-paying
candidate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

from . import kernels
from .params import (
    NO_DELAY,
    CheckedScenario,
    CheckedSingleInsurer,
    validate,
)

__all__ = [
    "CaseId",
    "EquilibriumPoint",
    "PremiumRetention",
    "NoCaseMatched",
    "investment_strategies",
    "follower_response",
    "best_response_retention",
    "leader_objective",
    "classify_case",
    "strategy_for_case",
    "premium_and_retention",
    "equilibrium_point",
    "no_delay_strategy",
    "zero_delay_twin",
    "single_insurer_strategy",
    "SingleInsurerPoint",
]

#: Relative slack used when testing the case-condition inequalities; keeps
#: floating-point boundaries from producing spurious NoCaseMatched.
CASE_TOL = 1e-12


class CaseId(enum.IntEnum):
    """The ten branches of the equilibrium premium/retention schedule."""

    CASE_1 = 1
    CASE_2 = 2
    CASE_3 = 3
    CASE_4 = 4
    CASE_5 = 5
    CASE_6 = 6
    CASE_7 = 7
    CASE_8 = 8
    CASE_9 = 9
    CASE_10 = 10


class NoCaseMatched(RuntimeError):
    """No condition set holds at ``t``; carries near-miss diagnostics."""

    def __init__(self, t: float, diagnostics: dict):
        self.t = t
        self.diagnostics = diagnostics
        super().__init__(
            f"no equilibrium case matched at t={t}; "
            f"near-miss margins: {diagnostics}"
        )


@dataclass(frozen=True)
class PremiumRetention:
    """Premium and retentions at one time, with case bookkeeping.

    When the full-retention case makes the premium indeterminate the cap is
    reported by convention, ``non_unique`` is set, and ``interval`` carries
    the whole admissible band.  ``boundary`` flags times where more than one
    condition set held within tolerance.
    """

    t: float
    p_star: float
    q1_star: float
    q2_star: float
    case: CaseId
    non_unique: bool = False
    interval: Optional[tuple[float, float]] = None
    boundary: bool = False


@dataclass(frozen=True)
class EquilibriumPoint:
    """Full equilibrium control of all three agents at ``(t, s)``."""

    t: float
    s: float
    case: CaseId
    p_star: float
    bL_star: float
    b1_star: float
    b2_star: float
    q1_star: float
    q2_star: float
    non_unique: bool = False
    boundary: bool = False


def investment_strategies(
    t: float, s: float, cfg: CheckedScenario
) -> tuple[float, float, float]:
    """Amounts invested in the risky asset by (reinsurer, insurer 1, insurer 2).

    ``b = s**(-2*beta) / (gamma * phi) * [(r - r0)/sigma**2 - 2*beta*g1]``
    for the reinsurer, and the competition-coupled analogue for the insurers.
    Independent of wealth; at ``beta = 0`` the hedging term vanishes and the
    classical constant-mix amounts emerge.
    """
    mk = cfg.market
    pf = cfg.prefs
    phi_L = kernels.eval_phi(t, cfg.rate_L, mk.T)
    phi_F = kernels.eval_phi(t, cfg.rate_F, mk.T)
    g1 = kernels.eval_g1(t, mk)
    edge = (mk.r - mk.r0) / mk.sigma ** 2 - 2.0 * mk.beta * g1
    s_pow = s ** (-2.0 * mk.beta)
    bL = s_pow / (pf.gamma_L * phi_L) * edge
    coupling = 1.0 / (1.0 - pf.k1 * pf.k2)
    b1 = s_pow * coupling / phi_F * (1.0 / pf.gamma1 + pf.k1 / pf.gamma2) * edge
    b2 = s_pow * coupling / phi_F * (1.0 / pf.gamma2 + pf.k2 / pf.gamma1) * edge
    return bL, b1, b2


def best_response_retention(
    t: float, p: float, q_other: float, i: int, cfg: CheckedScenario
) -> float:
    """Insurer ``i``'s retention response to premium ``p`` and the
    competitor's retention ``q_other``; clamped to [0, 1].

    Strictly increasing in ``p`` below the cap; the lower clamp never binds
    for admissible premiums because ``p >= c_F > a_i``.
    """
    cl, pf = cfg.claims, cfg.prefs
    phi_F = kernels.eval_phi(t, cfg.rate_F, cfg.market.T)
    if i == 1:
        gamma, sig, k, sig_j = pf.gamma1, cl.sigma1, pf.k1, cl.sigma2
        a = cl.a1
    elif i == 2:
        gamma, sig, k, sig_j = pf.gamma2, cl.sigma2, pf.k2, cl.sigma1
        a = cl.a2
    else:
        raise ValueError(f"insurer index must be 1 or 2, got {i}")
    raw = (p - a) / (gamma * sig ** 2 * phi_F) + k * cl.rho * sig_j * q_other / sig
    return min(max(raw, 0.0), 1.0)


def follower_response(
    t: float, p: float, cfg: CheckedScenario, tol: float = CASE_TOL
) -> tuple[float, float]:
    """Nash retention pair of the two insurers at premium ``p``.

    Solves the clamped linear system in closed form: the unconstrained
    solution is the K-weighted combination; if it violates a cap, the capped
    insurer is pinned at 1 and the other responds linearly.
    """
    cl, pf = cfg.claims, cfg.prefs
    phi_F = kernels.eval_phi(t, cfg.rate_F, cfg.market.T)
    n1 = (p - cl.a1) / (pf.gamma1 * cl.sigma1 ** 2 * phi_F)
    n2 = (p - cl.a2) / (pf.gamma2 * cl.sigma2 ** 2 * phi_F)
    m1 = pf.k1 * cl.rho * cl.sigma2 / cl.sigma1
    m2 = pf.k2 * cl.rho * cl.sigma1 / cl.sigma2
    K = 1.0 / (1.0 - pf.k1 * pf.k2 * cl.rho ** 2)
    q1u = K * (n1 + m1 * n2)
    q2u = K * (n2 + m2 * n1)
    if q1u <= 1.0 + tol and q2u <= 1.0 + tol:
        return min(q1u, 1.0), min(q2u, 1.0)
    # A cap binds.  The clamped map is a contraction (k1*k2*rho**2 < 1), so
    # exactly one capped configuration is self-consistent; q2-capped is
    # subsumed by q1-capped when both hit 1.
    q2c = min(max(n2 + m2, 0.0), 1.0)
    if n1 + m1 * q2c >= 1.0 - tol:
        return 1.0, q2c
    q1c = min(max(n1 + m1, 0.0), 1.0)
    if n2 + m2 * q1c >= 1.0 - tol:
        return q1c, 1.0
    raise RuntimeError(
        f"follower retention fixed point did not resolve at t={t}, p={p}"
    )


def leader_objective(t: float, p: float, q1: float, q2: float,
                     cfg: CheckedScenario) -> float:
    """Reinsurer's pointwise flow objective: discounted net premium income
    minus the variance penalty of the assumed claim exposure."""
    cl, pf = cfg.claims, cfg.prefs
    phi_L = kernels.eval_phi(t, cfg.rate_L, cfg.market.T)
    e1, e2 = 1.0 - q1, 1.0 - q2
    income = (p - cl.a1) * e1 + (p - cl.a2) * e2
    var = (e1 * cl.sigma1) ** 2 + (e2 * cl.sigma2) ** 2 \
        + 2.0 * e1 * e2 * cl.sigma1 * cl.sigma2 * cl.rho
    g = pf.gamma_L * phi_L
    return g * income - 0.5 * g * g * var


def _case_conditions(ke: kernels.KernelEval, cfg: CheckedScenario, tol: float):
    """Margins of the ten condition sets; a case holds when all its margins
    are >= -tol*scale.  Returns a list of (case, [margins])."""
    cl, pf = cfg.claims, cfg.prefs
    m1 = pf.k1 * cl.rho * cl.sigma2 / cl.sigma1
    m2 = pf.k2 * cl.rho * cl.sigma1 / cl.sigma2
    K = ke.K
    phat = ke.p_interior
    # K-weighted retention pairs at the band edges and at the interior premium
    q1_cbar = K * (ke.N_cbar1 + m1 * ke.N_cbar2)
    q2_cbar = K * (ke.N_cbar2 + m2 * ke.N_cbar1)
    q1_cF = K * (ke.N_c1 + m1 * ke.N_c2)
    q2_cF = K * (ke.N_c2 + m2 * ke.N_c1)
    gs1 = pf.gamma1 * cl.sigma1 ** 2 * ke.phi_F
    gs2 = pf.gamma2 * cl.sigma2 ** 2 * ke.phi_F
    q1_hat = K * ((phat - cl.a1) / gs1 + m1 * (phat - cl.a2) / gs2)
    q2_hat = K * ((phat - cl.a2) / gs2 + m2 * (phat - cl.a1) / gs1)

    w2 = 1.0 - m2  # 1 - k2*rho*sigma1/sigma2
    w1 = 1.0 - m1
    conds = {
        CaseId.CASE_1: [ke.N_c1 + m1 - 1.0, ke.N_c2 + m2 - 1.0],
        CaseId.CASE_2: [q1_cbar - 1.0, w2 * ke.M_F2 - ke.N_cbar2],
        CaseId.CASE_3: [q1_cF - 1.0, ke.N_c2 - w2 * ke.M_F2, w2 - ke.N_c2],
        CaseId.CASE_4: [
            K * (ke.N_a1 + ke.K_bar_F1 * ke.M_F2) - 1.0,
            w2 * ke.M_F2 - ke.N_c2,
            ke.N_cbar2 - w2 * ke.M_F2,
            w2 - w2 * ke.M_F2,
        ],
        CaseId.CASE_5: [q2_cbar - 1.0, w1 * ke.M_F1 - ke.N_cbar1],
        CaseId.CASE_6: [q2_cF - 1.0, ke.N_c1 - w1 * ke.M_F1, w1 - ke.N_c1],
        CaseId.CASE_7: [
            K * (ke.N_a2 + ke.K_bar_F2 * ke.M_F1) - 1.0,
            w1 * ke.M_F1 - ke.N_c1,
            ke.N_cbar1 - w1 * ke.M_F1,
            w1 - w1 * ke.M_F1,
        ],
        CaseId.CASE_8: [1.0 - q1_cbar, 1.0 - q2_cbar, phat - cfg.c_bar],
        CaseId.CASE_9: [1.0 - q1_cF, 1.0 - q2_cF, cfg.c_F - phat],
        CaseId.CASE_10: [
            1.0 - q1_hat, 1.0 - q2_hat, phat - cfg.c_F, cfg.c_bar - phat,
        ],
    }
    # Strict inequalities in cases 3, 4, 6, 7, 10 share the same slack; the
    # boundary flag reports any tie.
    return conds


@lru_cache(maxsize=None)
def _classify(t: float, cfg: CheckedScenario, tol: float):
    ke = kernels.eval_case_constants(t, cfg)
    conds = _case_conditions(ke, cfg, tol)
    scale = max(1.0, cfg.c_bar)
    matched = [
        case for case, margins in conds.items()
        if all(m >= -tol * scale for m in margins)
    ]
    if not matched:
        near = {
            int(case): min(margins) for case, margins in conds.items()
        }
        raise NoCaseMatched(t, near)
    best = matched[0]
    if len(matched) > 1:
        # The condition sets can genuinely co-hold away from boundaries
        # (a capped-regime candidate and the both-ceding interior optimum
        # can both be follower-consistent); the leader takes whichever
        # candidate pays more.  Exact ties keep the lowest case number.
        def value(case: CaseId) -> float:
            p, q1, q2, _ = strategy_for_case(t, case, cfg)
            return leader_objective(t, p, q1, q2, cfg)

        vals = [(case, value(case)) for case in matched]
        top = max(v for _, v in vals)
        best = next(c for c, v in vals if v >= top - tol * max(1.0, abs(top)))
    return best, len(matched) > 1, ke


def classify_case(t: float, cfg: CheckedScenario, tol: float = CASE_TOL) -> CaseId:
    """The case whose condition set holds at ``t``.

    Conditions carry a relative slack of ``tol``.  When several condition
    sets hold, the case whose candidate strategy maximizes the leader's
    flow objective wins (exact ties resolve to the lowest-numbered case,
    which also covers plain floating-point boundaries).  Raises
    :class:`NoCaseMatched` (with per-case margin diagnostics) when nothing
    holds beyond the slack.
    """
    case, _, _ = _classify(t, cfg, tol)
    return case


def strategy_for_case(
    t: float, case: CaseId, cfg: CheckedScenario
) -> tuple[float, float, float, bool]:
    """``(p, q1, q2, non_unique)`` from the given case's formulas at ``t``.

    Does not re-classify; callers that integrate a case's flow over a time
    interval use this directly.
    """
    ke = kernels.eval_case_constants(t, cfg)
    cl, pf = cfg.claims, cfg.prefs
    m1 = pf.k1 * cl.rho * cl.sigma2 / cl.sigma1
    m2 = pf.k2 * cl.rho * cl.sigma1 / cl.sigma2
    K = ke.K

    if case == CaseId.CASE_1:
        return cfg.c_bar, 1.0, 1.0, True
    if case == CaseId.CASE_2:
        return cfg.c_bar, 1.0, ke.N_cbar2 + m2, False
    if case == CaseId.CASE_3:
        return cfg.c_F, 1.0, ke.N_c2 + m2, False
    if case == CaseId.CASE_4:
        p = cl.a2 + pf.gamma2 * cl.sigma2 ** 2 * ke.phi_F * (1.0 - m2) * ke.M_F2
        return p, 1.0, (1.0 - m2) * ke.M_F2 + m2, False
    if case == CaseId.CASE_5:
        return cfg.c_bar, ke.N_cbar1 + m1, 1.0, False
    if case == CaseId.CASE_6:
        return cfg.c_F, ke.N_c1 + m1, 1.0, False
    if case == CaseId.CASE_7:
        p = cl.a1 + pf.gamma1 * cl.sigma1 ** 2 * ke.phi_F * (1.0 - m1) * ke.M_F1
        return p, (1.0 - m1) * ke.M_F1 + m1, 1.0, False
    if case == CaseId.CASE_8:
        q1 = K * (ke.N_cbar1 + m1 * ke.N_cbar2)
        q2 = K * (ke.N_cbar2 + m2 * ke.N_cbar1)
        return cfg.c_bar, q1, q2, False
    if case == CaseId.CASE_9:
        q1 = K * (ke.N_c1 + m1 * ke.N_c2)
        q2 = K * (ke.N_c2 + m2 * ke.N_c1)
        return cfg.c_F, q1, q2, False
    if case == CaseId.CASE_10:
        p = ke.p_interior
        gs1 = pf.gamma1 * cl.sigma1 ** 2 * ke.phi_F
        gs2 = pf.gamma2 * cl.sigma2 ** 2 * ke.phi_F
        q1 = K * ((p - cl.a1) / gs1 + m1 * (p - cl.a2) / gs2)
        q2 = K * ((p - cl.a2) / gs2 + m2 * (p - cl.a1) / gs1)
        return p, q1, q2, False
    raise ValueError(f"unknown case {case!r}")


def premium_and_retention(
    t: float, cfg: CheckedScenario, tol: float = CASE_TOL
) -> PremiumRetention:
    """Equilibrium premium and retentions at ``t`` per the classified case."""
    case, boundary, _ = _classify(t, cfg, tol)
    p, q1, q2, non_unique = strategy_for_case(t, case, cfg)
    return PremiumRetention(
        t=t, p_star=p, q1_star=q1, q2_star=q2, case=case,
        non_unique=non_unique,
        interval=(cfg.c_F, cfg.c_bar) if non_unique else None,
        boundary=boundary,
    )


def equilibrium_point(
    t: float, s: float, cfg: CheckedScenario, tol: float = CASE_TOL
) -> EquilibriumPoint:
    """Complete equilibrium control at ``(t, s)``."""
    pr = premium_and_retention(t, cfg, tol)
    bL, b1, b2 = investment_strategies(t, s, cfg)
    return EquilibriumPoint(
        t=t, s=s, case=pr.case, p_star=pr.p_star,
        bL_star=bL, b1_star=b1, b2_star=b2,
        q1_star=pr.q1_star, q2_star=pr.q2_star,
        non_unique=pr.non_unique, boundary=pr.boundary,
    )


@lru_cache(maxsize=None)
def zero_delay_twin(cfg: CheckedScenario) -> CheckedScenario:
    """The same market, claims and preferences with all delays removed."""
    twin = replace(
        cfg.config, delay_L=NO_DELAY, delay_1=NO_DELAY, delay_2=NO_DELAY
    )
    return validate(twin)


def no_delay_strategy(
    t: float, s: float, cfg: CheckedScenario, tol: float = CASE_TOL
) -> EquilibriumPoint:
    """Equilibrium of the memory-free market (all delay parameters zero).

    Identical machinery on the zero-delay twin: every ``phi`` collapses to
    ``exp(r0*(T-t))`` and the capital-flow terms vanish.  Coincides with the
    delayed equilibrium at ``t = T``.
    """
    return equilibrium_point(t, s, zero_delay_twin(cfg), tol)


# ---------------------------------------------------------------------------
# Single-insurer reduction


@dataclass(frozen=True)
class SingleInsurerPoint:
    """Equilibrium of the one-reinsurer / one-insurer market at ``(t, s)``."""

    t: float
    s: float
    case: int
    p_star: float
    bL_star: float
    q1_star: float
    b1_star: float
    non_unique: bool = False


def single_insurer_strategy(
    t: float, s: float, cfg: CheckedSingleInsurer, tol: float = CASE_TOL
) -> SingleInsurerPoint:
    """Four-branch premium/retention schedule of the reduced market.

    Branches: full retention (premium indeterminate, cap reported), premium
    at the cap, premium at the floor, and the interior premium
    ``a1 + M * gamma1 * sigma1**2 * phi_F`` at which the retention equals
    ``M``.  The interior branch prices ceded risk by mean plus variance
    loading.
    """
    mk = cfg.market
    c = cfg.config
    phi_L = kernels.eval_phi(t, cfg.rate_L, mk.T)
    phi_F = kernels.eval_phi(t, cfg.rate_F, mk.T)
    g1 = kernels.eval_g1(t, mk)
    edge = (mk.r - mk.r0) / mk.sigma ** 2 - 2.0 * mk.beta * g1
    s_pow = s ** (-2.0 * mk.beta)
    bL = s_pow / (c.gamma_L * phi_L) * edge
    b1 = s_pow / (c.gamma1 * phi_F) * edge

    gs = c.gamma1 * c.sigma1 ** 2 * phi_F
    N_c = (cfg.c_F - c.a1) / gs
    N_cbar = (cfg.c_bar - c.a1) / gs
    M = (c.gamma1 * phi_F + c.gamma_L * phi_L) / (2.0 * c.gamma1 * phi_F + c.gamma_L * phi_L)

    if N_c >= 1.0 - tol:
        return SingleInsurerPoint(t, s, 1, cfg.c_bar, bL, 1.0, b1, non_unique=True)
    if N_cbar <= M + tol:
        return SingleInsurerPoint(t, s, 2, cfg.c_bar, bL, min(N_cbar, 1.0), b1)
    if M - tol <= N_c < 1.0:
        return SingleInsurerPoint(t, s, 3, cfg.c_F, bL, N_c, b1)
    if N_c < M < N_cbar:
        return SingleInsurerPoint(t, s, 4, c.a1 + M * gs, bL, M, b1)
    raise NoCaseMatched(t, {"N_c": N_c, "N_cbar": N_cbar, "M": M})
