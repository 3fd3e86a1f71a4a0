"""Brute-force and ODE oracles, independent of the closed-form algebra.

The closed forms come out of first-order conditions; these oracles never
use them.  Follower responses are recovered by grid argmax of the generator
maximand, the retention pair by iterating the coupled response maps, the
premium by scanning the band, and the kernels by backward Runge-Kutta
integration of their defining ODEs.  Agreement within one grid step is the
check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import kernels
from .equilibrium import CaseId, investment_strategies
from .params import CheckedScenario
from .value_functions import g2_eval, g2_flow

__all__ = [
    "GridSpec",
    "NoConvergence",
    "KernelOdeReport",
    "insurer_maximand",
    "brute_force_insurer_response",
    "nash_fixed_point",
    "leader_maximand",
    "brute_force_premium",
    "ode_check_kernels",
    "ode_integrate_g2",
]


class NoConvergence(RuntimeError):
    """Best-response iteration failed to contract; parameter pathology."""


@dataclass(frozen=True)
class GridSpec:
    """Search grids for the brute-force oracles.

    ``p_step_frac`` is the premium step as a fraction of the band width;
    the investment grid spans ``b_span`` times the closed-form amount on
    each side with ``b_points`` nodes.
    """

    q_step: float = 1e-3
    p_step_frac: float = 1e-3
    b_points: int = 1001
    b_span: float = 5.0

    def q_grid(self) -> np.ndarray:
        n = int(round(1.0 / self.q_step))
        return np.linspace(0.0, 1.0, n + 1)

    def p_grid(self, c_F: float, c_bar: float) -> np.ndarray:
        n = int(round(1.0 / self.p_step_frac))
        return np.linspace(c_F, c_bar, n + 1)

    def p_step(self, c_F: float, c_bar: float) -> float:
        return (c_bar - c_F) * self.p_step_frac


def insurer_maximand(
    t: float,
    p: float,
    q_i,
    b_i,
    q_j: float,
    b_j: float,
    i: int,
    cfg: CheckedScenario,
    s: float = 1.0,
):
    """Control-dependent part of insurer ``i``'s generator, divided by the
    (positive) factor ``-V``.

    Uses only the exponential shape of the value function (its derivatives
    enter as multiples of ``V``), not the first-order conditions.  Accepts
    array-valued ``q_i`` / ``b_i`` for grid scans; separable in the two
    controls.
    """
    mk, cl, pf = cfg.market, cfg.claims, cfg.prefs
    q_i = np.asarray(q_i, dtype=float)
    b_i = np.asarray(b_i, dtype=float)
    if i == 1:
        gamma, k = pf.gamma1, pf.k1
        a_i, s_i, s_j = cl.a1, cl.sigma1, cl.sigma2
    else:
        gamma, k = pf.gamma2, pf.k2
        a_i, s_i, s_j = cl.a2, cl.sigma2, cl.sigma1
    phi = kernels.eval_phi(t, cfg.rate_F, mk.T)
    g1 = kernels.eval_g1(t, mk)
    g = gamma * phi
    s2b = s ** (2.0 * mk.beta)
    b_net = b_i - k * b_j
    # V_x/(-V) = g;  V_xx/(-V) = -g^2;  V_xs/(-V) = 2*beta*g*g1*s^(-2b-1)
    lin = g * ((p - a_i) * q_i + (mk.r - mk.r0) * b_net)
    quad_q = -0.5 * g * g * ((q_i * s_i) ** 2 - 2.0 * q_i * s_i * k * q_j * s_j * cl.rho)
    quad_b = -0.5 * g * g * b_net ** 2 * mk.sigma ** 2 * s2b
    cross_b = -2.0 * mk.beta * g * g1 * mk.sigma ** 2 * b_net
    return lin + quad_q + quad_b + cross_b


def brute_force_insurer_response(
    t: float,
    p: float,
    q_other: float,
    i: int,
    cfg: CheckedScenario,
    grid: GridSpec = GridSpec(),
    s: float = 1.0,
    b_center: float | None = None,
) -> tuple[float, float]:
    """Grid argmax of insurer ``i``'s maximand at fixed opponent behavior.

    The maximand is separable, so retention and investment scan their own
    grids.  ``b_center`` re-centers the investment grid (defaults to the
    closed-form amount so the oracle brackets it by ``b_span`` on each side).
    """
    qs = grid.q_grid()
    vals_q = insurer_maximand(t, p, qs, 0.0, q_other, 0.0, i, cfg, s)
    q_best = float(qs[int(np.argmax(vals_q))])
    if b_center is None:
        b_center = investment_strategies(t, s, cfg)[i]
    half = grid.b_span * max(abs(b_center), 1e-6)
    bs = np.linspace(b_center - half, b_center + half, grid.b_points)
    vals_b = insurer_maximand(t, p, 0.0, bs, q_other, 0.0, i, cfg, s)
    b_best = float(bs[int(np.argmax(vals_b))])
    return q_best, b_best


def nash_fixed_point(
    t: float,
    p,
    cfg: CheckedScenario,
    tol: float = 1e-12,
    max_iter: int = 10_000,
):
    """Retention pair from iterating the two clamped response maps.

    Vectorized over ``p``.  Contraction is guaranteed by
    ``k1*k2*rho**2 < 1``; raises :class:`NoConvergence` otherwise.
    """
    cl, pf = cfg.claims, cfg.prefs
    phi = kernels.eval_phi(t, cfg.rate_F, cfg.market.T)
    p = np.asarray(p, dtype=float)
    n1 = (p - cl.a1) / (pf.gamma1 * cl.sigma1 ** 2 * phi)
    n2 = (p - cl.a2) / (pf.gamma2 * cl.sigma2 ** 2 * phi)
    m1 = pf.k1 * cl.rho * cl.sigma2 / cl.sigma1
    m2 = pf.k2 * cl.rho * cl.sigma1 / cl.sigma2
    q1 = np.clip(n1, 0.0, 1.0)
    q2 = np.clip(n2, 0.0, 1.0)
    for _ in range(max_iter):
        q1_new = np.clip(n1 + m1 * q2, 0.0, 1.0)
        q2_new = np.clip(n2 + m2 * q1_new, 0.0, 1.0)
        delta = max(np.max(np.abs(q1_new - q1)), np.max(np.abs(q2_new - q2)))
        q1, q2 = q1_new, q2_new
        if delta < tol:
            if p.ndim == 0:
                return float(q1), float(q2)
            return q1, q2
    raise NoConvergence(
        f"retention best-response iteration did not reach {tol} in {max_iter} steps"
    )


def leader_maximand(t: float, p, q1, q2, cfg: CheckedScenario):
    """Reinsurer's pointwise objective: discounted premium income minus the
    variance penalty.  Array-friendly."""
    cl, pf = cfg.claims, cfg.prefs
    phi_L = kernels.eval_phi(t, cfg.rate_L, cfg.market.T)
    p = np.asarray(p, dtype=float)
    e1 = 1.0 - np.asarray(q1, dtype=float)
    e2 = 1.0 - np.asarray(q2, dtype=float)
    g = pf.gamma_L * phi_L
    income = (p - cl.a1) * e1 + (p - cl.a2) * e2
    var = (e1 * cl.sigma1) ** 2 + (e2 * cl.sigma2) ** 2 \
        + 2.0 * e1 * e2 * cl.sigma1 * cl.sigma2 * cl.rho
    return g * income - 0.5 * g * g * var


def brute_force_premium(
    t: float, cfg: CheckedScenario, grid: GridSpec = GridSpec()
) -> float:
    """Premium from scanning the band: at each grid premium the followers'
    fixed point is computed, then the leader objective; ties resolve to the
    lowest premium."""
    ps = grid.p_grid(cfg.c_F, cfg.c_bar)
    q1, q2 = nash_fixed_point(t, ps, cfg)
    vals = leader_maximand(t, ps, q1, q2, cfg)
    return float(ps[int(np.argmax(vals))])


@dataclass(frozen=True)
class KernelOdeReport:
    """Max absolute deviations between closed forms and backward ODE runs."""

    max_dev_phi_L: float
    max_dev_phi_F: float
    max_dev_g1: float

    @property
    def max_dev(self) -> float:
        return max(self.max_dev_phi_L, self.max_dev_phi_F, self.max_dev_g1)


def ode_check_kernels(cfg: CheckedScenario, n_points: int = 100) -> KernelOdeReport:
    """Integrate the defining ODEs of ``phi`` and ``g1`` backward from the
    horizon and report the largest deviation from the closed forms."""
    mk = cfg.market
    lam2 = ((mk.r - mk.r0) / mk.sigma) ** 2

    def rhs(t, y):
        phi_L, phi_F, g1 = y
        return [
            -cfg.rate_L * phi_L,
            -cfg.rate_F * phi_F,
            2.0 * mk.beta * mk.r0 * g1 + 0.5 * lam2,
        ]

    ts = np.linspace(mk.T, 0.0, n_points)
    sol = solve_ivp(rhs, (mk.T, 0.0), [1.0, 1.0, 0.0], t_eval=ts,
                    rtol=1e-12, atol=1e-14, method="DOP853")
    dev_L = dev_F = dev_g1 = 0.0
    for t, phi_L, phi_F, g1 in zip(sol.t, sol.y[0], sol.y[1], sol.y[2]):
        dev_L = max(dev_L, abs(phi_L - kernels.eval_phi(t, cfg.rate_L, mk.T)))
        dev_F = max(dev_F, abs(phi_F - kernels.eval_phi(t, cfg.rate_F, mk.T)))
        dev_g1 = max(dev_g1, abs(g1 - kernels.eval_g1(t, mk)))
    return KernelOdeReport(dev_L, dev_F, dev_g1)


def ode_integrate_g2(
    case: CaseId, cfg: CheckedScenario, ts
) -> np.ndarray:
    """Backward Runge-Kutta integration of the case generator for
    ``(g2_L, g2_F1, g2_F2)``; output rows align with the given ``ts``.

    Independent route to the quadrature in
    :func:`stackgame.value_functions.g2_eval`.
    """
    mk = cfg.market
    ts = np.asarray(ts, dtype=float)

    def rhs(t, y):
        free = -mk.beta * (2.0 * mk.beta + 1.0) * mk.sigma ** 2 \
            * kernels.eval_g1(t, mk)
        fL, f1, f2 = g2_flow(t, case, cfg)
        return [free + fL, free + f1, free + f2]

    order = np.argsort(-ts)  # descending for backward integration
    t_desc = ts[order]
    lo = float(t_desc[-1])
    if lo == mk.T:
        return np.zeros((ts.size, 3))
    sol = solve_ivp(rhs, (mk.T, lo), [0.0, 0.0, 0.0], t_eval=t_desc,
                    rtol=1e-11, atol=1e-12, method="DOP853")
    out = np.empty((ts.size, 3))
    out[order] = sol.y.T
    return out


def g2_case_vs_ode(case: CaseId, cfg: CheckedScenario, n_points: int = 21) -> float:
    """Max absolute gap between quadrature and ODE routes for one case."""
    ts = np.linspace(cfg.market.T, 0.0, n_points)
    ode_vals = ode_integrate_g2(case, cfg, ts)
    worst = 0.0
    for t, row in zip(ts, ode_vals):
        ge = g2_eval(float(t), case, cfg)
        worst = max(
            worst,
            abs(ge.g2_L - row[0]),
            abs(ge.g2_F1 - row[1]),
            abs(ge.g2_F2 - row[2]),
        )
    return worst
