"""Value functions, case-dependent exponent accumulators, HJB generators.

Each agent's value function is an exponential of an affine form in its own
(delay-augmented) wealth plus two scalar accumulators: ``g1`` times the
price term and a case-dependent ``g2``.  The ``g2`` terms are time integrals
of the strategy flow of the prevailing case; when the equilibrium crosses
cases inside ``[t, T]`` the integral is stitched piecewise over the case
segments, with continuity at the switch times.  Applying the HJB generators
to these closed forms yields a numerical optimality residual used by the
verification suites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.integrate import quad

from . import kernels
from .equilibrium import (
    CaseId,
    classify_case,
    follower_response,
    investment_strategies,
    leader_objective,
    premium_and_retention,
    strategy_for_case,
)
from .params import CheckedScenario

__all__ = [
    "G2Eval",
    "ValueEval",
    "HJBResidual",
    "QuadratureFailure",
    "case_segments",
    "g2_eval",
    "g2_piecewise",
    "g2_flow",
    "leader_flow",
    "insurer_flow",
    "value_L",
    "value_F",
    "hjb_residual_L",
    "hjb_residual_F",
]

_QUAD_KW = dict(epsabs=1e-10, epsrel=1e-11, limit=2 ** 14)


class QuadratureFailure(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""


@dataclass(frozen=True)
class G2Eval:
    """Exponent accumulators of the three value functions at one time.

    ``stitched`` is set when the evaluation composed more than one case
    segment between ``t`` and the horizon.
    """

    t: float
    case: CaseId
    g2_L: float
    g2_F1: float
    g2_F2: float
    stitched: bool = False


@dataclass(frozen=True)
class ValueEval:
    """A value-function evaluation; ``value`` is in utility units (< 0)."""

    t: float
    s: float
    value: float


@dataclass(frozen=True)
class HJBResidual:
    """Generator applied to the closed-form value at a candidate control.

    ``residual`` is the raw generator value (zero at the optimum, negative
    elsewhere); ``normalized`` divides by the largest individual generator
    term so tolerances are scale-free.
    """

    residual: float
    normalized: float
    scale: float


# ---------------------------------------------------------------------------
# Strategy flows: the g2' contributions of the prevailing strategy


def leader_flow(t: float, case: CaseId, cfg: CheckedScenario) -> float:
    """Reinsurer's strategy flow: premium income net of a variance penalty,
    both discounted by the leader kernel.  This is the integrand whose
    running integral (plus the strategy-free part) is ``g2_L``."""
    p, q1, q2, _ = strategy_for_case(t, case, cfg)
    return leader_objective(t, p, q1, q2, cfg)


def insurer_flow(t: float, case: CaseId, cfg: CheckedScenario, i: int) -> float:
    """Insurer ``i``'s strategy flow entering ``g2_F{i}``."""
    p, q1, q2, _ = strategy_for_case(t, case, cfg)
    cl, pf = cfg.claims, cfg.prefs
    phi_F = kernels.eval_phi(t, cfg.rate_F, cfg.market.T)
    if i == 1:
        gamma, k = pf.gamma1, pf.k1
        a_i, a_j = cl.a1, cl.a2
        th_i, th_j = cl.theta1, cl.theta2
        s_i, s_j = cl.sigma1, cl.sigma2
        q_i, q_j = q1, q2
    elif i == 2:
        gamma, k = pf.gamma2, pf.k2
        a_i, a_j = cl.a2, cl.a1
        th_i, th_j = cl.theta2, cl.theta1
        s_i, s_j = cl.sigma2, cl.sigma1
        q_i, q_j = q2, q1
    else:
        raise ValueError(f"insurer index must be 1 or 2, got {i}")
    drift = th_i * a_i - k * th_j * a_j - (p - a_i) * (1.0 - q_i) \
        + k * (p - a_j) * (1.0 - q_j)
    var = (q_i * s_i) ** 2 + (k * q_j * s_j) ** 2 \
        - 2.0 * q_i * s_i * k * q_j * s_j * cl.rho
    g = gamma * phi_F
    return g * drift - 0.5 * g * g * var


def g2_flow(t: float, case: CaseId, cfg: CheckedScenario) -> tuple[float, float, float]:
    """Strategy parts of ``(dg2_L/dt, dg2_F1/dt, dg2_F2/dt)`` under ``case``.

    The full derivative adds the strategy-free term
    ``-beta*(2*beta+1)*sigma**2*g1(t)`` shared by all three.
    """
    return (
        leader_flow(t, case, cfg),
        insurer_flow(t, case, cfg, 1),
        insurer_flow(t, case, cfg, 2),
    )


def _quad(f, lo: float, hi: float) -> float:
    if lo == hi:
        return 0.0
    out = quad(f, lo, hi, full_output=1, **_QUAD_KW)
    if len(out) > 3:
        raise QuadratureFailure(f"quadrature failed on [{lo}, {hi}]: {out[3]}")
    return out[0]


def g2_eval(t: float, case: CaseId, cfg: CheckedScenario) -> G2Eval:
    """Accumulators assuming ``case`` prevails on all of ``[t, T]``.

    Each equals the strategy-free part ``g(t)`` plus the signed integral of
    the case's strategy flow from the horizon back to ``t``; integrals are
    adaptive-quadrature to 1e-10 absolute.
    """
    mk = cfg.market
    g_plain = kernels.eval_g_plain(t, mk)
    T = mk.T
    g2_L = g_plain + _quad(lambda s: leader_flow(s, case, cfg), T, t)
    g2_F1 = g_plain + _quad(lambda s: insurer_flow(s, case, cfg, 1), T, t)
    g2_F2 = g_plain + _quad(lambda s: insurer_flow(s, case, cfg, 2), T, t)
    return G2Eval(t=t, case=case, g2_L=g2_L, g2_F1=g2_F1, g2_F2=g2_F2)


@lru_cache(maxsize=None)
def case_segments(cfg: CheckedScenario) -> tuple[tuple[float, float, CaseId], ...]:
    """Partition of ``[0, T]`` into maximal intervals of constant case.

    Boundaries are located by sampling followed by bisection to ~1e-12*T.
    """
    T = cfg.market.T
    n = 256
    ts = [T * k / n for k in range(n + 1)]
    cases = [classify_case(t, cfg) for t in ts]
    bounds: list[float] = [0.0]
    seg_cases: list[CaseId] = [cases[0]]
    for k in range(n):
        if cases[k + 1] != cases[k]:
            lo, hi = ts[k], ts[k + 1]
            c_lo = cases[k]
            while hi - lo > 1e-12 * max(T, 1.0):
                mid = 0.5 * (lo + hi)
                if classify_case(mid, cfg) == c_lo:
                    lo = mid
                else:
                    hi = mid
            bounds.append(0.5 * (lo + hi))
            seg_cases.append(cases[k + 1])
    bounds.append(T)
    return tuple(
        (bounds[j], bounds[j + 1], seg_cases[j]) for j in range(len(seg_cases))
    )


@lru_cache(maxsize=None)
def g2_piecewise(t: float, cfg: CheckedScenario) -> G2Eval:
    """Accumulators with the case taken from the classifier on every
    subinterval of ``[t, T]``; continuous across case switches."""
    segs = case_segments(cfg)
    mk = cfg.market
    g_plain = kernels.eval_g_plain(t, mk)
    totals = [g_plain, g_plain, g_plain]
    used = []
    for lo, hi, case in segs:
        a = max(lo, t)
        if a >= hi:
            continue
        used.append(case)
        # integral from T to t accumulates as -(integral over [a, hi])
        totals[0] -= _quad(lambda s: leader_flow(s, case, cfg), a, hi)
        totals[1] -= _quad(lambda s: insurer_flow(s, case, cfg, 1), a, hi)
        totals[2] -= _quad(lambda s: insurer_flow(s, case, cfg, 2), a, hi)
    case_at_t = used[0] if used else segs[-1][2]
    return G2Eval(
        t=t, case=case_at_t, g2_L=totals[0], g2_F1=totals[1], g2_F2=totals[2],
        stitched=len(used) > 1,
    )


# ---------------------------------------------------------------------------
# Value functions


def value_L(t: float, x_L: float, y_L: float, s: float,
            cfg: CheckedScenario) -> ValueEval:
    """Reinsurer's value at state ``(x_L, y_L, s)`` and time ``t``."""
    mk = cfg.market
    phi = kernels.eval_phi(t, cfg.rate_L, mk.T)
    g1 = kernels.eval_g1(t, mk)
    g2 = g2_piecewise(t, cfg).g2_L
    gamma = cfg.prefs.gamma_L
    eta = cfg.config.delay_L.eta
    expo = -gamma * phi * (x_L + eta * y_L) + g1 * s ** (-2.0 * mk.beta) + g2
    return ValueEval(t=t, s=s, value=-math.exp(expo) / gamma)


def value_F(t: float, x_hat: float, y_i: float, y_j: float, s: float,
            i: int, cfg: CheckedScenario) -> ValueEval:
    """Insurer ``i``'s value at the competition-adjusted wealth ``x_hat =
    x_i - k_i*x_j`` and delay states ``(y_i, y_j)``."""
    mk = cfg.market
    phi = kernels.eval_phi(t, cfg.rate_F, mk.T)
    g1 = kernels.eval_g1(t, mk)
    g2e = g2_piecewise(t, cfg)
    if i == 1:
        gamma, k = cfg.prefs.gamma1, cfg.prefs.k1
        eta_i, eta_j = cfg.config.delay_1.eta, cfg.config.delay_2.eta
        g2 = g2e.g2_F1
    elif i == 2:
        gamma, k = cfg.prefs.gamma2, cfg.prefs.k2
        eta_i, eta_j = cfg.config.delay_2.eta, cfg.config.delay_1.eta
        g2 = g2e.g2_F2
    else:
        raise ValueError(f"insurer index must be 1 or 2, got {i}")
    expo = -gamma * phi * (x_hat + eta_i * y_i - k * eta_j * y_j) \
        + g1 * s ** (-2.0 * mk.beta) + g2
    return ValueEval(t=t, s=s, value=-math.exp(expo) / gamma)


# ---------------------------------------------------------------------------
# HJB generators with analytic partial derivatives


def _dg2_dt(t: float, cfg: CheckedScenario) -> tuple[float, float, float]:
    mk = cfg.market
    case = g2_piecewise(t, cfg).case
    free = -mk.beta * (2.0 * mk.beta + 1.0) * mk.sigma ** 2 * kernels.eval_g1(t, mk)
    fL, f1, f2 = g2_flow(t, case, cfg)
    return free + fL, free + f1, free + f2


def hjb_residual_L(
    t: float,
    state: tuple[float, float, float, float],
    control: tuple[float, float],
    cfg: CheckedScenario,
) -> HJBResidual:
    """Leader generator at ``state = (x_L, y_L, z_L, s)`` and candidate
    ``control = (p, b_L)``; followers respond to the candidate premium."""
    x_L, y_L, z_L, s = state
    p, b_L = control
    mk, cl, pf = cfg.market, cfg.claims, cfg.prefs
    dl = cfg.config.delay_L
    co = cfg.coeffs_L
    beta = mk.beta

    phi = kernels.eval_phi(t, cfg.rate_L, mk.T)
    g1 = kernels.eval_g1(t, mk)
    g2 = g2_piecewise(t, cfg).g2_L
    gamma = pf.gamma_L
    s2b = s ** (2.0 * beta)

    expo = -gamma * phi * (x_L + dl.eta * y_L) + g1 / s2b + g2
    V = -math.exp(expo) / gamma
    dphi = -cfg.rate_L * phi
    dg1 = kernels.eval_g1_deriv(t, mk)
    dg2 = _dg2_dt(t, cfg)[0]
    V_t = V * (-gamma * dphi * (x_L + dl.eta * y_L) + dg1 / s2b + dg2)
    V_x = V * (-gamma * phi)
    V_xx = V * (gamma * phi) ** 2
    V_y = V * (-gamma * phi * dl.eta)
    g1s = -2.0 * beta * g1 * s ** (-2.0 * beta - 1.0)
    V_s = V * g1s
    V_ss = V * (g1s * g1s + 2.0 * beta * (2.0 * beta + 1.0) * g1 * s ** (-2.0 * beta - 2.0))
    V_xs = V * (-gamma * phi) * g1s

    q1, q2 = follower_response(t, p, cfg)
    e1, e2 = 1.0 - q1, 1.0 - q2
    terms = (
        V_t,
        V_x * ((p - cl.a1) * e1 + (p - cl.a2) * e2 + (mk.r - mk.r0) * b_L
               + co.A * x_L + co.B * y_L + co.C * z_L),
        0.5 * ((e1 * cl.sigma1) ** 2 + (e2 * cl.sigma2) ** 2
               + b_L ** 2 * mk.sigma ** 2 * s2b
               + 2.0 * e1 * e2 * cl.sigma1 * cl.sigma2 * cl.rho) * V_xx,
        (x_L - dl.alpha * y_L - math.exp(-dl.alpha * dl.h) * z_L) * V_y,
        mk.r * s * V_s,
        0.5 * mk.sigma ** 2 * s ** (2.0 * beta + 2.0) * V_ss,
        b_L * mk.sigma ** 2 * s ** (2.0 * beta + 1.0) * V_xs,
    )
    residual = math.fsum(terms)
    scale = max(abs(x) for x in terms)
    return HJBResidual(residual=residual,
                       normalized=residual / scale if scale else 0.0,
                       scale=scale)


def hjb_residual_F(
    t: float,
    state: tuple[float, float, float, float, float, float, float],
    control: tuple[float, float],
    i: int,
    cfg: CheckedScenario,
) -> HJBResidual:
    """Insurer-``i`` generator at ``state = (x_i, x_j, y_i, y_j, z_i, z_j, s)``
    and candidate ``control = (q_i, b_i)``; the premium, the competitor's
    retention and the competitor's investment sit at their equilibrium
    values."""
    x_i, x_j, y_i, y_j, z_i, z_j, s = state
    q_i, b_i = control
    mk, cl, pf = cfg.market, cfg.claims, cfg.prefs
    beta = mk.beta

    pr = premium_and_retention(t, cfg)
    _, b1s, b2s = investment_strategies(t, s, cfg)
    if i == 1:
        gamma, k = pf.gamma1, pf.k1
        a_i, a_j, th_i, th_j = cl.a1, cl.a2, cl.theta1, cl.theta2
        s_i, s_j = cl.sigma1, cl.sigma2
        d_i, d_j = cfg.config.delay_1, cfg.config.delay_2
        co_i, co_j = cfg.coeffs_1, cfg.coeffs_2
        q_j, b_j = pr.q2_star, b2s
        g2_idx = 1
    elif i == 2:
        gamma, k = pf.gamma2, pf.k2
        a_i, a_j, th_i, th_j = cl.a2, cl.a1, cl.theta2, cl.theta1
        s_i, s_j = cl.sigma2, cl.sigma1
        d_i, d_j = cfg.config.delay_2, cfg.config.delay_1
        co_i, co_j = cfg.coeffs_2, cfg.coeffs_1
        q_j, b_j = pr.q1_star, b1s
        g2_idx = 2
    else:
        raise ValueError(f"insurer index must be 1 or 2, got {i}")
    p = pr.p_star

    phi = kernels.eval_phi(t, cfg.rate_F, mk.T)
    g1 = kernels.eval_g1(t, mk)
    g2e = g2_piecewise(t, cfg)
    g2 = g2e.g2_F1 if g2_idx == 1 else g2e.g2_F2
    s2b = s ** (2.0 * beta)

    x_hat = x_i - k * x_j
    arg = x_hat + d_i.eta * y_i - k * d_j.eta * y_j
    expo = -gamma * phi * arg + g1 / s2b + g2
    V = -math.exp(expo) / gamma
    dphi = -cfg.rate_F * phi
    dg1 = kernels.eval_g1_deriv(t, mk)
    dg2_all = _dg2_dt(t, cfg)
    dg2 = dg2_all[g2_idx]
    V_t = V * (-gamma * dphi * arg + dg1 / s2b + dg2)
    V_x = V * (-gamma * phi)
    V_xx = V * (gamma * phi) ** 2
    V_yi = V * (-gamma * phi * d_i.eta)
    V_yj = V * (gamma * phi * k * d_j.eta)
    g1s = -2.0 * beta * g1 * s ** (-2.0 * beta - 1.0)
    V_s = V * g1s
    V_ss = V * (g1s * g1s + 2.0 * beta * (2.0 * beta + 1.0) * g1 * s ** (-2.0 * beta - 2.0))
    V_xs = V * (-gamma * phi) * g1s

    b_net = b_i - k * b_j
    terms = (
        V_t,
        V_x * (th_i * a_i - k * th_j * a_j - (p - a_i) * (1.0 - q_i)
               + k * (p - a_j) * (1.0 - q_j)
               + co_i.A * x_i - k * co_j.A * x_j
               + co_i.B * y_i - k * co_j.B * y_j
               + co_i.C * z_i - k * co_j.C * z_j
               + (mk.r - mk.r0) * b_net),
        0.5 * ((q_i * s_i) ** 2 + (k * q_j * s_j) ** 2
               - 2.0 * q_i * s_i * k * q_j * s_j * cl.rho
               + b_net ** 2 * mk.sigma ** 2 * s2b) * V_xx,
        (x_i - d_i.alpha * y_i - math.exp(-d_i.alpha * d_i.h) * z_i) * V_yi,
        (x_j - d_j.alpha * y_j - math.exp(-d_j.alpha * d_j.h) * z_j) * V_yj,
        mk.r * s * V_s,
        0.5 * mk.sigma ** 2 * s ** (2.0 * beta + 2.0) * V_ss,
        b_net * mk.sigma ** 2 * s ** (2.0 * beta + 1.0) * V_xs,
    )
    residual = math.fsum(terms)
    scale = max(abs(x) for x in terms)
    return HJBResidual(residual=residual,
                       normalized=residual / scale if scale else 0.0,
                       scale=scale)
