"""Seeded Monte Carlo of the asset and the three delayed wealth processes.

Paths are driven by per-path random substreams keyed on ``(seed, path
index)``, so results do not depend on chunking, execution order or backend.
The hot loop lives in a compiled kernel when available
(``stackgame._simcore``) with a vectorized NumPy fallback; both share exact
step semantics, including the discounted-trapezoid recursion for the
integrated delay state, which telescopes to the trapezoid recomputation
over the ring buffer.

A scalar reference stepper (:class:`PathState` / :func:`step`) implements
the same update one path at a time; the test suite holds the kernels to it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .equilibrium import (
    follower_response,
    premium_and_retention,
    zero_delay_twin,
)
from .params import CheckedScenario, DelaySpec, ParameterError

try:  # compiled kernel is optional
    from . import _simcore as _core
except ImportError:  # pragma: no cover - depends on build environment
    from . import _simcore_py as _core
from . import _simcore_py as _core_py

__all__ = [
    "BACKEND",
    "SimConfig",
    "MCEstimate",
    "SimResult",
    "PolicyArrays",
    "PathState",
    "NonPositivePrice",
    "step",
    "build_policy",
    "perturb_policy",
    "simulate_terminal_utilities",
    "terminal_utilities_from_states",
]

BACKEND = _core.BACKEND_NAME

_CHUNK_PATHS = 512
_S_FLOOR = 1e-8


class NonPositivePrice(RuntimeError):
    """Price hit zero and resampling retries were exhausted."""


@dataclass(frozen=True)
class SimConfig:
    """Discretization and sampling plan for one Monte Carlo run."""

    dt: float = 1e-3
    n_paths: int = 1000
    seed: int = 0
    t_start: float = 0.0
    t_end: Optional[float] = None
    price_floor_mode: str = "absorb"  # or "resample"

    def check_against(self, cfg: CheckedScenario) -> None:
        if not self.dt > 0:
            raise ParameterError(f"dt must be > 0, got {self.dt}")
        if self.n_paths < 1:
            raise ParameterError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.price_floor_mode not in ("absorb", "resample"):
            raise ParameterError(
                f"price_floor_mode must be absorb|resample, got {self.price_floor_mode}"
            )
        t_end = cfg.market.T if self.t_end is None else self.t_end
        if not self.t_start < t_end <= cfg.market.T + 1e-12:
            raise ParameterError("need t_start < t_end <= T")
        for name, spec in (
            ("delay_L", cfg.config.delay_L),
            ("delay_1", cfg.config.delay_1),
            ("delay_2", cfg.config.delay_2),
        ):
            if spec.h and abs(round(spec.h / self.dt) * self.dt - spec.h) > 1e-9:
                raise ParameterError(
                    f"dt={self.dt} does not divide {name}.h={spec.h} within 1e-9"
                )
        n = (t_end - self.t_start) / self.dt
        if abs(round(n) - n) > 1e-9:
            raise ParameterError("dt must divide the simulated horizon")


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n_paths: int


@dataclass(frozen=True)
class SimResult:
    """Terminal-utility estimates plus the per-path terminal states.

    ``terminals`` columns: X_L, X_1, X_2, Y_L, Y_1, Y_2, S, flagged.
    """

    utility_L: MCEstimate
    utility_F1: MCEstimate
    utility_F2: MCEstimate
    flagged_fraction: float
    terminals: np.ndarray


@dataclass(frozen=True)
class PolicyArrays:
    """Controls tabulated on the step grid.

    ``bpref_*`` are the price-free investment prefactors; the invested
    amount at price ``S`` is ``bpref * S**(-2*beta)``.
    """

    kind: str
    t0: float
    dt: float
    p: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    bprefL: np.ndarray
    bpref1: np.ndarray
    bpref2: np.ndarray

    def controls(self, k: int, s: float, beta: float):
        """Concrete controls applied on step ``k`` at price ``s``."""
        s_pow = s ** (-2.0 * beta)
        return (
            self.p[k],
            self.q1[k],
            self.q2[k],
            self.bprefL[k] * s_pow,
            self.bpref1[k] * s_pow,
            self.bpref2[k] * s_pow,
        )


def _strategy_cfg(cfg: CheckedScenario, kind: str) -> CheckedScenario:
    if kind == "equilibrium":
        return cfg
    if kind == "nodelay":
        return zero_delay_twin(cfg)
    raise ParameterError(f"unknown policy kind '{kind}'")


def build_policy(
    cfg: CheckedScenario, sim: SimConfig, kind: str = "equilibrium"
) -> PolicyArrays:
    """Tabulate a named policy on the simulation grid.

    ``equilibrium`` evaluates the closed-form optimum of the delayed game;
    ``nodelay`` evaluates the memory-free optimum (applied, suboptimally, to
    the delayed dynamics).
    """
    t_end = cfg.market.T if sim.t_end is None else sim.t_end
    n_steps = int(round((t_end - sim.t_start) / sim.dt))
    scfg = _strategy_cfg(cfg, kind)
    mk = scfg.market
    p = np.empty(n_steps)
    q1 = np.empty(n_steps)
    q2 = np.empty(n_steps)
    bprefL = np.empty(n_steps)
    bpref1 = np.empty(n_steps)
    bpref2 = np.empty(n_steps)
    pf = scfg.prefs
    coupling = 1.0 / (1.0 - pf.k1 * pf.k2)
    for k in range(n_steps):
        t = sim.t_start + k * sim.dt
        pr = premium_and_retention(t, scfg)
        p[k], q1[k], q2[k] = pr.p_star, pr.q1_star, pr.q2_star
        phi_L = kernels.eval_phi(t, scfg.rate_L, mk.T)
        phi_F = kernels.eval_phi(t, scfg.rate_F, mk.T)
        edge = (mk.r - mk.r0) / mk.sigma ** 2 - 2.0 * mk.beta * kernels.eval_g1(t, mk)
        bprefL[k] = edge / (pf.gamma_L * phi_L)
        bpref1[k] = edge * coupling / phi_F * (1.0 / pf.gamma1 + pf.k1 / pf.gamma2)
        bpref2[k] = edge * coupling / phi_F * (1.0 / pf.gamma2 + pf.k2 / pf.gamma1)
    return PolicyArrays(kind, sim.t_start, sim.dt, p, q1, q2, bprefL, bpref1, bpref2)


_PERTURB_FIELDS = ("p", "q1", "q2", "bL", "b1", "b2")


def perturb_policy(
    base: PolicyArrays, cfg: CheckedScenario, which: str, factor: float
) -> PolicyArrays:
    """Scale one control of ``base`` by ``factor``, staying admissible.

    The premium clamps to the band and triggers fresh follower responses
    (the followers observe the announced premium); retentions clamp to
    [0, 1]; investment perturbations touch only the perturbed agent.
    """
    if which not in _PERTURB_FIELDS:
        raise ParameterError(
            f"perturbable fields are {_PERTURB_FIELDS}, got '{which}'"
        )
    arrays = dict(
        p=base.p.copy(), q1=base.q1.copy(), q2=base.q2.copy(),
        bprefL=base.bprefL.copy(), bpref1=base.bpref1.copy(),
        bpref2=base.bpref2.copy(),
    )
    if which == "p":
        p_new = np.clip(base.p * factor, cfg.c_F, cfg.c_bar)
        arrays["p"] = p_new
        for k, pk in enumerate(p_new):
            t = base.t0 + k * base.dt
            arrays["q1"][k], arrays["q2"][k] = follower_response(t, float(pk), cfg)
    elif which in ("q1", "q2"):
        arrays[which] = np.clip(arrays[which] * factor, 0.0, 1.0)
    else:
        key = {"bL": "bprefL", "b1": "bpref1", "b2": "bpref2"}[which]
        arrays[key] = arrays[key] * factor
    return PolicyArrays(
        f"{base.kind}+perturb:{which}={factor:g}", base.t0, base.dt, **arrays
    )


# ---------------------------------------------------------------------------
# Reference scalar stepper


def _lag_steps(spec: DelaySpec, dt: float) -> int:
    return int(round(spec.h / dt)) if spec.h else 0


@dataclass
class PathState:
    """One path's state with explicit delay ring buffers.

    ``bufs[a]`` holds the most recent ``lag+1`` wealth values of agent ``a``
    (L, 1, 2); reads at or before the start time return the initial wealth,
    matching the pre-history convention.
    """

    cfg: CheckedScenario
    dt: float
    t: float
    k: int
    S: float
    X: np.ndarray
    Y: np.ndarray
    bufs: list
    lags: list
    flagged: bool = False

    @classmethod
    def initial(cls, cfg: CheckedScenario, dt: float, t0: float = 0.0) -> "PathState":
        specs = (cfg.config.delay_L, cfg.config.delay_1, cfg.config.delay_2)
        x0 = np.array([cfg.config.x_L0, cfg.config.x_10, cfg.config.x_20])
        lags = [_lag_steps(s, dt) for s in specs]
        bufs = [np.full(lag + 1, x0[a]) for a, lag in enumerate(lags)]
        state = cls(cfg=cfg, dt=dt, t=t0, k=0, S=cfg.market.s0,
                    X=x0.copy(), Y=np.zeros(3), bufs=bufs, lags=lags)
        for a, spec in enumerate(specs):
            if lags[a]:
                state.Y[a] = x0[a] * cls._trap_weights(spec.alpha, lags[a], dt).sum()
        return state

    @staticmethod
    def _trap_weights(alpha: float, lag: int, dt: float) -> np.ndarray:
        h = lag * dt
        w = dt * np.exp(-alpha * (h - dt * np.arange(lag + 1)))
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def buffer_chrono(self, a: int) -> np.ndarray:
        """Agent ``a``'s buffer in chronological order (oldest first)."""
        lag = self.lags[a]
        idx = [(self.k + j) % (lag + 1) for j in range(lag + 1)]
        return self.bufs[a][idx]

    def recompute_y(self, a: int) -> float:
        """Trapezoid recomputation of the integrated delay state from the
        buffer; the incremental recursion must match this to rounding."""
        spec = (self.cfg.config.delay_L, self.cfg.config.delay_1,
                self.cfg.config.delay_2)[a]
        lag = self.lags[a]
        if not lag:
            return 0.0
        return float(self._trap_weights(spec.alpha, lag, self.dt)
                     @ self.buffer_chrono(a))

    def lagged_wealth(self, a: int) -> float:
        lag = self.lags[a]
        if not lag:
            return float(self.X[a])
        return float(self.bufs[a][self.k % (lag + 1)])


def step(
    state: PathState,
    policy: Callable[[float, float], tuple],
    increments: tuple[float, float, float],
    dt: float,
) -> PathState:
    """Advance the reference path one Euler step (in place, returns state).

    ``policy(t, S)`` supplies ``(p, q1, q2, bL, b1, b2)``; ``increments``
    are the raw standard normals ``(xi1, xi2, xi3)`` for the two claim
    drivers and the asset driver.
    """
    cfg = state.cfg
    mk, cl = cfg.market, cfg.claims
    if abs(dt - state.dt) > 1e-15:
        raise ParameterError("step size must match the state's grid")
    xi1, xi2, xi3 = increments
    sdt = math.sqrt(dt)
    dW1 = sdt * xi1
    dW2 = sdt * (cl.rho * xi1 + math.sqrt(1.0 - cl.rho ** 2) * xi2)
    dW = sdt * xi3

    p, q1, q2, bL, b1, b2 = policy(state.t, state.S)
    Sb = state.S ** mk.beta
    coeffs = (cfg.coeffs_L, cfg.coeffs_1, cfg.coeffs_2)
    specs = (cfg.config.delay_L, cfg.config.delay_1, cfg.config.delay_2)
    Z = [state.lagged_wealth(a) for a in range(3)]
    e1, e2 = 1.0 - q1, 1.0 - q2

    # log-space Euler keeps the price positive; exact when beta == 0
    newS = state.S * math.exp(
        (mk.r - 0.5 * mk.sigma ** 2 * Sb * Sb) * dt + mk.sigma * Sb * dW
    )
    if not (newS > _S_FLOOR and math.isfinite(newS)):
        state.flagged = True
        newS = _S_FLOOR

    drift = [
        (p - cl.a1) * e1 + (p - cl.a2) * e2 + coeffs[0].A * state.X[0]
        + (mk.r - mk.r0) * bL + coeffs[0].B * state.Y[0] + coeffs[0].C * Z[0],
        cl.theta1 * cl.a1 - (p - cl.a1) * e1 + coeffs[1].A * state.X[1]
        + coeffs[1].B * state.Y[1] + coeffs[1].C * Z[1] + (mk.r - mk.r0) * b1,
        cl.theta2 * cl.a2 - (p - cl.a2) * e2 + coeffs[2].A * state.X[2]
        + coeffs[2].B * state.Y[2] + coeffs[2].C * Z[2] + (mk.r - mk.r0) * b2,
    ]
    noise = [
        e1 * cl.sigma1 * dW1 + e2 * cl.sigma2 * dW2 + bL * mk.sigma * Sb * dW,
        q1 * cl.sigma1 * dW1 + b1 * mk.sigma * Sb * dW,
        q2 * cl.sigma2 * dW2 + b2 * mk.sigma * Sb * dW,
    ]
    newX = [state.X[a] + drift[a] * dt + noise[a] for a in range(3)]

    for a in range(3):
        lag = state.lags[a]
        if lag:
            L = lag + 1
            al = specs[a].alpha
            h = lag * dt
            old_slice = 0.5 * dt * (
                math.exp(-al * h) * state.bufs[a][state.k % L]
                + math.exp(-al * (h - dt)) * state.bufs[a][(state.k + 1) % L]
            )
            new_slice = 0.5 * dt * (state.X[a] + math.exp(al * dt) * newX[a])
            state.Y[a] = math.exp(-al * dt) * (state.Y[a] - old_slice + new_slice)
            state.bufs[a][state.k % L] = newX[a]
        state.X[a] = newX[a]
    state.S = newS
    state.k += 1
    state.t += dt
    return state


# ---------------------------------------------------------------------------
# Chunked kernel driver


def _thread_count() -> int:
    env = os.environ.get("STACKGAME_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParameterError(f"STACKGAME_THREADS must be an integer, got {env!r}")
    return 1


def _kernel_args(cfg: CheckedScenario, sim: SimConfig, policy: PolicyArrays):
    cl = cfg.claims
    mk = cfg.market
    coeffs = np.array(
        [
            [cfg.coeffs_L.A, cfg.coeffs_L.B, cfg.coeffs_L.C],
            [cfg.coeffs_1.A, cfg.coeffs_1.B, cfg.coeffs_1.C],
            [cfg.coeffs_2.A, cfg.coeffs_2.B, cfg.coeffs_2.C],
        ]
    )
    alphas = np.array([
        cfg.config.delay_L.alpha, cfg.config.delay_1.alpha, cfg.config.delay_2.alpha,
    ])
    lags = np.array(
        [
            _lag_steps(cfg.config.delay_L, sim.dt),
            _lag_steps(cfg.config.delay_1, sim.dt),
            _lag_steps(cfg.config.delay_2, sim.dt),
        ],
        dtype=np.int64,
    )
    x_init = np.array([cfg.config.x_L0, cfg.config.x_10, cfg.config.x_20])
    return dict(
        dt=sim.dt, s_init=mk.s0, x_init=x_init,
        p=policy.p, q1=policy.q1, q2=policy.q2,
        bprefL=policy.bprefL, bpref1=policy.bpref1, bpref2=policy.bpref2,
        r=mk.r, r0=mk.r0, sigma=mk.sigma, beta=mk.beta,
        sigma1=cl.sigma1, sigma2=cl.sigma2, rho=cl.rho,
        a1=cl.a1, a2=cl.a2, theta1=cl.theta1, theta2=cl.theta2,
        coeffs=coeffs, alphas=alphas, lags=lags, s_floor=_S_FLOOR,
    )


def _path_normals(seed: int, pid: int, n_steps: int, retry: int = 0) -> np.ndarray:
    key = [seed, pid] if retry == 0 else [seed, pid, retry]
    return np.random.default_rng(key).standard_normal((3, n_steps))


def _run_chunk(core, ids, seed, n_steps, args, out_block, zero_claims=False):
    z = np.empty((len(ids), 3, n_steps))
    for row, pid in enumerate(ids):
        z[row] = _path_normals(seed, int(pid), n_steps)
    if zero_claims:
        z[:, :2, :] = 0.0
    core.simulate_paths(z, out_block, **args)


def simulate_terminal_utilities(
    cfg: CheckedScenario,
    sim: SimConfig,
    policy: PolicyArrays | str = "equilibrium",
    backend: Optional[str] = None,
    estimator: str = "plain",
) -> SimResult:
    """Run the Monte Carlo and estimate all three terminal objectives.

    The reinsurer's objective applies its utility to terminal wealth plus
    the weighted integrated-delay state; each insurer's objective uses its
    delay-augmented wealth minus the competition-weighted rival quantity.
    Estimates carry standard errors; identical inputs give identical output
    arrays.

    ``estimator="plain"`` averages raw terminal utilities.  At the baseline
    risk aversions the insurers' terminal exponent has a standard deviation
    near 7, which puts the mean of the exponential far outside what raw
    sampling can see at any feasible path count.  ``estimator="conditional"``
    integrates the claims noise analytically given the asset path: the
    wealth system is linear with deterministic coefficients, so conditional
    on the asset driver the terminal argument is Gaussian with a path-free
    variance (computed exactly for the discretized system via impulse
    responses).  Both estimators target the same discretized expectation and
    share the asset draws.
    """
    sim.check_against(cfg)
    if isinstance(policy, str):
        policy = build_policy(cfg, sim, policy)
    t_end = cfg.market.T if sim.t_end is None else sim.t_end
    n_steps = int(round((t_end - sim.t_start) / sim.dt))
    if policy.p.shape[0] != n_steps:
        raise ParameterError("policy grid does not match the simulation grid")
    if estimator not in ("plain", "conditional"):
        raise ParameterError(f"estimator must be plain|conditional, got {estimator!r}")

    core = _core
    if backend == "python":
        core = _core_py
    elif backend == "cython" and _core.BACKEND_NAME != "cython":
        raise ParameterError("compiled kernel requested but not available")

    conditional = estimator == "conditional"
    args = _kernel_args(cfg, sim, policy)
    out = np.empty((sim.n_paths, 8))
    chunks = [
        range(lo, min(lo + _CHUNK_PATHS, sim.n_paths))
        for lo in range(0, sim.n_paths, _CHUNK_PATHS)
    ]
    threads = _thread_count()
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_run_chunk, core, ids, sim.seed, n_steps, args,
                            out[ids.start:ids.stop], conditional)
                for ids in chunks
            ]
            for fut in futures:
                fut.result()
    else:
        for ids in chunks:
            _run_chunk(core, ids, sim.seed, n_steps, args,
                       out[ids.start:ids.stop], conditional)

    if sim.price_floor_mode == "resample":
        for pid in np.nonzero(out[:, 7] > 0)[0]:
            for retry in range(1, 101):
                z = _path_normals(sim.seed, int(pid), n_steps, retry)[None]
                if conditional:
                    z[:, :2, :] = 0.0
                block = np.empty((1, 8))
                core.simulate_paths(z, block, **args)
                if block[0, 7] == 0.0:
                    out[pid] = block[0]
                    break
            else:
                raise NonPositivePrice(
                    f"path {pid}: price stayed non-positive after 100 resamples"
                )

    variances = claims_variances(cfg, sim, policy) if conditional else None
    return SimResult(
        *terminal_utilities_from_states(out, cfg, variances),
        flagged_fraction=float(out[:, 7].mean()),
        terminals=out,
    )


def terminal_utilities_from_states(
    out: np.ndarray,
    cfg: CheckedScenario,
    claims_var: Optional[tuple[float, float, float]] = None,
) -> tuple[MCEstimate, MCEstimate, MCEstimate]:
    """Map terminal states to the three agents' utilities and estimate.

    With ``claims_var`` given, the states are conditional means (claims
    noise off) and each utility picks up the exact Gaussian correction
    ``exp(gamma**2 * var / 2)``.
    """
    pf = cfg.prefs
    eta_L = cfg.config.delay_L.eta
    eta_1 = cfg.config.delay_1.eta
    eta_2 = cfg.config.delay_2.eta
    wL = out[:, 0] + eta_L * out[:, 3]
    w1 = out[:, 1] + eta_1 * out[:, 4]
    w2 = out[:, 2] + eta_2 * out[:, 5]
    vL = v1 = v2 = 0.0
    if claims_var is not None:
        vL, v1, v2 = claims_var
    uL = -np.exp(-pf.gamma_L * wL + 0.5 * pf.gamma_L ** 2 * vL) / pf.gamma_L
    u1 = -np.exp(-pf.gamma1 * (w1 - pf.k1 * w2) + 0.5 * pf.gamma1 ** 2 * v1) / pf.gamma1
    u2 = -np.exp(-pf.gamma2 * (w2 - pf.k2 * w1) + 0.5 * pf.gamma2 ** 2 * v2) / pf.gamma2

    def est(u: np.ndarray) -> MCEstimate:
        n = u.size
        se = float(u.std(ddof=1) / math.sqrt(n)) if n > 1 else float("inf")
        return MCEstimate(mean=float(u.mean()), std_error=se, n_paths=n)

    return est(uL), est(u1), est(u2)


def _impulse_response(cfg: CheckedScenario, agent: int, dt: float,
                      n_steps: int) -> np.ndarray:
    """Discrete response of ``X + eta*Y`` to a unit wealth shock.

    Entry ``m`` is the value after ``m`` homogeneous steps of the agent's
    (linear, time-invariant) wealth/delay recursion following a shock that
    lands in the wealth update of some step, exactly as a noise increment
    does.  Used to turn per-step claim noise into the exact terminal
    variance of the discretized system.
    """
    spec = (cfg.config.delay_L, cfg.config.delay_1, cfg.config.delay_2)[agent]
    co = (cfg.coeffs_L, cfg.coeffs_1, cfg.coeffs_2)[agent]
    eta = spec.eta
    lag = _lag_steps(spec, dt)
    R = np.empty(n_steps)
    if lag == 0:
        # Y sits at zero and the lagged read is the current wealth.
        R[:] = (1.0 + (co.A + co.C) * dt) ** np.arange(n_steps)
        return R
    L = lag + 1
    al = spec.alpha
    h = lag * dt
    decay = math.exp(-al * dt)
    w_old0 = math.exp(-al * h)
    w_old1 = math.exp(-al * (h - dt))
    w_new1 = math.exp(al * dt)
    buf = np.zeros(L)
    # Injection replicates the tail of the noisy update at step k0 = lag:
    # the shocked wealth enters buffer slot k0 % L and the fresh trapezoid
    # slice of Y (decay * dt/2 * w_new1 = dt/2).
    X = 1.0
    Y = 0.5 * dt
    buf[lag % L] = 1.0
    R[0] = X + eta * Y
    k = lag + 1
    for m in range(1, n_steps):
        Z = buf[k % L]
        newX = X + (co.A * X + co.B * Y + co.C * Z) * dt
        old_slice = 0.5 * dt * (w_old0 * buf[k % L] + w_old1 * buf[(k + 1) % L])
        new_slice = 0.5 * dt * (X + w_new1 * newX)
        Y = decay * (Y - old_slice + new_slice)
        buf[k % L] = newX
        X = newX
        k += 1
        R[m] = X + eta * Y
    return R


def claims_variances(
    cfg: CheckedScenario, sim: SimConfig, policy: PolicyArrays
) -> tuple[float, float, float]:
    """Exact terminal variance contributed by the claim drivers, per agent
    objective, under the discretized dynamics and the given policy."""
    cl, pf = cfg.claims, cfg.prefs
    t_end = cfg.market.T if sim.t_end is None else sim.t_end
    n_steps = int(round((t_end - sim.t_start) / sim.dt))
    dt = sim.dt
    RL = _impulse_response(cfg, 0, dt, n_steps)
    R1 = _impulse_response(cfg, 1, dt, n_steps)
    R2 = _impulse_response(cfg, 2, dt, n_steps)
    # Noise of step k propagates over the remaining n-1-k steps.
    m = n_steps - 1 - np.arange(n_steps)
    rL, r1, r2 = RL[m], R1[m], R2[m]
    e1 = (1.0 - policy.q1) * cl.sigma1 * rL
    e2 = (1.0 - policy.q2) * cl.sigma2 * rL
    var_L = float(np.sum(dt * (e1 ** 2 + e2 ** 2 + 2.0 * cl.rho * e1 * e2)))
    a1 = policy.q1 * cl.sigma1 * r1
    b1 = pf.k1 * policy.q2 * cl.sigma2 * r2
    var_1 = float(np.sum(dt * (a1 ** 2 + b1 ** 2 - 2.0 * cl.rho * a1 * b1)))
    a2 = policy.q2 * cl.sigma2 * r2
    b2 = pf.k2 * policy.q1 * cl.sigma1 * r1
    var_2 = float(np.sum(dt * (a2 ** 2 + b2 ** 2 - 2.0 * cl.rho * a2 * b2)))
    return var_L, var_1, var_2
