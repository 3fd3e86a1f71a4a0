"""Closed-form time kernels and case constants.

Everything the equilibrium and value functions need at a fixed time ``t``
reduces to a handful of scalar functions: the agents' discount kernels
``phi``, the asset kernels ``g1`` and ``g``, and a bundle of case constants
built from them.  All are evaluated in one pass per ``t`` because the case
classifier consumes nearly every field at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import CheckedScenario, FinancialMarket

__all__ = [
    "KernelEval",
    "eval_phi",
    "eval_g1",
    "eval_g1_deriv",
    "eval_g_plain",
    "eval_case_constants",
]


def eval_phi(t: float, a_plus_eta: float, T: float) -> float:
    """Discount kernel ``exp{(A+eta)(T-t)}``; solves
    ``dphi/dt = -(A+eta)*phi`` with ``phi(T) = 1``."""
    return math.exp(a_plus_eta * (T - t))


def eval_g1(t: float, market: FinancialMarket) -> float:
    """Asset kernel multiplying ``s**(-2*beta)`` in the value exponents.

    ``g1(t) = -(1/(4*beta*r0)) * ((r-r0)/sigma)**2 * [1 - exp(-2*beta*r0*(T-t))]``
    written via ``expm1`` so the ``beta -> 0`` limit
    ``-((r-r0)/sigma)**2 * (T-t)/2`` is reached without cancellation.
    """
    tau = market.T - t
    lam2 = ((market.r - market.r0) / market.sigma) ** 2
    x = 2.0 * market.beta * market.r0 * tau
    if x == 0.0:
        return -0.5 * lam2 * tau
    return -0.5 * lam2 * tau * (-math.expm1(-x) / x)


def eval_g1_deriv(t: float, market: FinancialMarket) -> float:
    """Time derivative of ``g1``: ``2*beta*r0*g1 + ((r-r0)/sigma)**2 / 2``."""
    lam2 = ((market.r - market.r0) / market.sigma) ** 2
    return 2.0 * market.beta * market.r0 * eval_g1(t, market) + 0.5 * lam2


def eval_g_plain(t: float, market: FinancialMarket) -> float:
    """Strategy-free accumulator: solves ``dg/dt = -beta*(2*beta+1)*sigma**2*g1``
    with ``g(T) = 0``.

    Closed form
    ``-(2*beta+1)*(r-r0)**2/(4*r0) * [tau + (exp(-2*beta*r0*tau) - 1)/(2*beta*r0)]``;
    the bracket is evaluated by series for small ``2*beta*r0*tau`` because the
    two terms cancel to first order.
    """
    tau = market.T - t
    pref = -(2.0 * market.beta + 1.0) * (market.r - market.r0) ** 2 / (4.0 * market.r0)
    x = 2.0 * market.beta * market.r0 * tau
    if abs(x) < 1e-4:
        # tau * (x/2 - x^2/6 + x^3/24 - x^4/120)
        bracket = tau * x * (0.5 + x * (-1.0 / 6.0 + x * (1.0 / 24.0 - x / 120.0)))
    else:
        bracket = tau + math.expm1(-x) / (2.0 * market.beta * market.r0)
    return pref * bracket


@dataclass(frozen=True)
class KernelEval:
    """All time-dependent scalars of the case analysis at one ``t``.

    ``N_c*`` / ``N_cbar*`` / ``N_a*`` are the retention thresholds at the
    premium floor, cap and at the competitor's claim rate; ``M_F*`` the
    interior retention levels; ``D_*`` the premium-numerator coefficients;
    ``P_N / P_D`` is the unclamped interior premium.
    """

    t: float
    phi_L: float
    phi_F: float
    g1: float
    g_plain: float
    K: float
    K_bar_F1: float
    K_bar_F2: float
    K_F1: float
    K_F2: float
    N_c1: float
    N_c2: float
    N_cbar1: float
    N_cbar2: float
    N_a1: float
    N_a2: float
    M_F1: float
    M_F2: float
    D_F1: float
    D_F2: float
    D_bar_F1: float
    D_bar_F2: float
    D_F12: float
    P_N: float
    P_D: float

    @property
    def p_interior(self) -> float:
        """First-order premium ``P_N / P_D`` before clamping to the band."""
        return self.P_N / self.P_D


def eval_case_constants(t: float, cfg: CheckedScenario) -> KernelEval:
    """Evaluate the whole kernel bundle at time ``t``."""
    mk = cfg.market
    cl = cfg.claims
    pf = cfg.prefs
    phi_L = eval_phi(t, cfg.rate_L, mk.T)
    phi_F = eval_phi(t, cfg.rate_F, mk.T)
    g1 = eval_g1(t, mk)
    g_plain = eval_g_plain(t, mk)

    k1, k2, rho = pf.k1, pf.k2, cl.rho
    s1, s2 = cl.sigma1, cl.sigma2
    g1f, g2f, gLf = pf.gamma1 * phi_F, pf.gamma2 * phi_F, pf.gamma_L * phi_L
    K = 1.0 / (1.0 - k1 * k2 * rho ** 2)

    K_bar_F1 = (pf.gamma2 * s2 ** 2 / (pf.gamma1 * s1 ** 2) + k1 * rho * s2 / s1) \
        * (1.0 - k2 * rho * s1 / s2)
    K_bar_F2 = (pf.gamma1 * s1 ** 2 / (pf.gamma2 * s2 ** 2) + k2 * rho * s1 / s2) \
        * (1.0 - k1 * rho * s2 / s1)
    K_F1 = (1.0 + k1 * rho * pf.gamma1 * s1 / (pf.gamma2 * s2)) * (1.0 - k1 * rho * s2 / s1)
    K_F2 = (1.0 + k2 * rho * pf.gamma2 * s2 / (pf.gamma1 * s1)) * (1.0 - k2 * rho * s1 / s2)

    N_c1 = (cfg.c_F - cl.a1) / (g1f * s1 ** 2)
    N_c2 = (cfg.c_F - cl.a2) / (g2f * s2 ** 2)
    N_cbar1 = (cfg.c_bar - cl.a1) / (g1f * s1 ** 2)
    N_cbar2 = (cfg.c_bar - cl.a2) / (g2f * s2 ** 2)
    N_a1 = (cl.a2 - cl.a1) / (g1f * s1 ** 2)
    N_a2 = (cl.a1 - cl.a2) / (g2f * s2 ** 2)
    M_F1 = (g1f + gLf) / (2.0 * g1f + gLf)
    M_F2 = (g2f + gLf) / (2.0 * g2f + gLf)

    D_F1 = g1f / K + gLf * (1.0 + k2 * rho ** 2 + (s2 * rho / s1) * (1.0 + k2))
    D_F2 = g2f / K + gLf * (1.0 + k1 * rho ** 2 + (s1 * rho / s2) * (1.0 + k1))
    D_bar_F1 = 1.0 + K * (1.0 + (k2 * rho) ** 2 + 2.0 * k2 * rho ** 2) * gLf / (2.0 * g1f)
    D_bar_F2 = 1.0 + K * (1.0 + (k1 * rho) ** 2 + 2.0 * k1 * rho ** 2) * gLf / (2.0 * g2f)
    D_F12 = k1 * g1f + k2 * g2f + K * (1.0 + k1 + k2 + k1 * k2 * rho ** 2) * gLf

    P_N = (s1 * s2) ** 2 * (g2f * D_F1 + g1f * D_F2) \
        + 2.0 * cl.a1 * s2 ** 2 * g2f * D_bar_F1 \
        + 2.0 * cl.a2 * s1 ** 2 * g1f * D_bar_F2 \
        + (cl.a1 + cl.a2) * rho * s1 * s2 * D_F12
    P_D = 2.0 * s2 ** 2 * g2f * D_bar_F1 + 2.0 * s1 ** 2 * g1f * D_bar_F2 \
        + 2.0 * rho * s1 * s2 * D_F12

    return KernelEval(
        t=t, phi_L=phi_L, phi_F=phi_F, g1=g1, g_plain=g_plain, K=K,
        K_bar_F1=K_bar_F1, K_bar_F2=K_bar_F2, K_F1=K_F1, K_F2=K_F2,
        N_c1=N_c1, N_c2=N_c2, N_cbar1=N_cbar1, N_cbar2=N_cbar2,
        N_a1=N_a1, N_a2=N_a2, M_F1=M_F1, M_F2=M_F2,
        D_F1=D_F1, D_F2=D_F2, D_bar_F1=D_bar_F1, D_bar_F2=D_bar_F2,
        D_F12=D_F12, P_N=P_N, P_D=P_D,
    )
