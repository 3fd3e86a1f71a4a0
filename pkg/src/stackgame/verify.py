"""Self-contained verification suites behind ``stackgame verify``.

Each suite returns a list of named checks with pass/fail and a detail
string; the CLI renders them and sets the exit status.  The same suites
back the acceptance tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable

import numpy as np

from . import oracle as orc
from .equilibrium import (
    CaseId,
    classify_case,
    equilibrium_point,
    investment_strategies,
    no_delay_strategy,
    premium_and_retention,
    single_insurer_strategy,
)
from .params import (
    CheckedScenario,
    CheckedSingleInsurer,
    ClaimModel,
    DelaySpec,
    EtaOutOfRange,
    FinancialMarket,
    Preferences,
    ScenarioConfig,
    SingleInsurerScenario,
    ValidationError,
    set_by_path,
    validate,
    validate_single,
)
from .value_functions import hjb_residual_F, hjb_residual_L

__all__ = [
    "CheckResult",
    "TABLE9",
    "random_scenario",
    "suite_table9",
    "suite_case_timeline",
    "suite_odes",
    "suite_oracle",
    "suite_hjb",
    "suite_signs",
    "SUITES",
    "run_suites",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _check(name: str, ok: bool, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=bool(ok), detail=detail)


# Reference strategy table for the baseline scenario: premium and the two
# retentions, with and without delay, at integer times 0..10.
TABLE9 = {
    "with": {
        "p": (12, 12, 12, 12, 12, 12, 12, 11.831, 11.419, 11.030, 10.661),
        "q1": (0.294, 0.310, 0.327, 0.345, 0.364, 0.384, 0.406,
               0.419, 0.419, 0.419, 0.419),
        "q2": (0.429, 0.452, 0.477, 0.504, 0.532, 0.561, 0.592,
               0.612, 0.612, 0.612, 0.612),
    },
    "without": {
        "p": (12, 12, 12, 12, 12, 12, 12, 11.739, 11.361, 11.002, 10.661),
        "q1": (0.305, 0.321, 0.337, 0.355, 0.373, 0.392, 0.412,
               0.419, 0.419, 0.419, 0.419),
        "q2": (0.446, 0.468, 0.492, 0.518, 0.544, 0.572, 0.601,
               0.612, 0.612, 0.612, 0.612),
    },
}

#: Entries match after rounding to the table's 3 decimals, within one ulp of
#: that rounding.
TABLE9_TOL = 1e-3 + 1e-9


def suite_table9(cfg: CheckedScenario) -> list[CheckResult]:
    """Compare the closed forms against the reference strategy table.

    Meaningful for the shipped baseline scenario; other scenarios will
    simply fail the comparison.
    """
    out = []
    worst = 0.0
    worst_cell = ""
    for t in range(11):
        pr = premium_and_retention(float(t), cfg)
        nd = no_delay_strategy(float(t), cfg.market.s0, cfg)
        for label, ref, got in (
            ("with.p", TABLE9["with"]["p"][t], pr.p_star),
            ("with.q1", TABLE9["with"]["q1"][t], pr.q1_star),
            ("with.q2", TABLE9["with"]["q2"][t], pr.q2_star),
            ("without.p", TABLE9["without"]["p"][t], nd.p_star),
            ("without.q1", TABLE9["without"]["q1"][t], nd.q1_star),
            ("without.q2", TABLE9["without"]["q2"][t], nd.q2_star),
        ):
            dev = abs(round(got, 3) - ref)
            if dev > worst:
                worst, worst_cell = dev, f"{label}@t={t}"
    out.append(
        _check(
            "strategy table (66 entries, 3-decimal rounding)",
            worst <= TABLE9_TOL,
            f"worst |dev|={worst:.4g} at {worst_cell}",
        )
    )
    return out


def suite_case_timeline(cfg: CheckedScenario) -> list[CheckResult]:
    """Case 8 on integer times 0..6 and case 10 on 7..10."""
    got = [int(classify_case(float(t), cfg)) for t in range(11)]
    want = [8] * 7 + [10] * 4
    return [
        _check(
            "case timeline 0..10",
            got == want,
            f"got {got}",
        )
    ]


def suite_odes(cfg: CheckedScenario) -> list[CheckResult]:
    """Kernel closed forms vs backward ODE runs; exponent accumulators vs
    both quadrature and ODE routes on the full-retention and both-ceding
    branches."""
    out = []
    rep = orc.ode_check_kernels(cfg, n_points=100)
    out.append(
        _check(
            "phi/g1 closed forms vs backward ODE (100 times)",
            rep.max_dev < 1e-9,
            f"max dev {rep.max_dev:.3e}",
        )
    )
    for case in (CaseId.CASE_1, CaseId.CASE_8, CaseId.CASE_9, CaseId.CASE_10):
        dev = orc.g2_case_vs_ode(case, cfg, n_points=9)
        out.append(
            _check(
                f"g2 quadrature vs case-generator ODE, case {int(case)}",
                dev < 1e-8,
                f"max dev {dev:.3e}",
            )
        )
    return out


def random_scenario(rng: np.random.Generator) -> CheckedScenario:
    """A random valid scenario in baseline-like parameter ranges."""
    for _ in range(200):
        r0 = rng.uniform(0.02, 0.08)
        market = FinancialMarket(
            r0=r0,
            r=r0 + rng.uniform(0.02, 0.08),
            sigma=rng.uniform(0.25, 0.6),
            beta=float(rng.choice([0.0, 0.5, 1.0])),
            s0=rng.uniform(0.5, 2.0),
            T=rng.uniform(5.0, 12.0),
        )
        th1, th2 = rng.uniform(0.5, 1.5, size=2)
        claims = ClaimModel(
            a1=rng.uniform(2.0, 6.0),
            a2=rng.uniform(2.0, 6.0),
            sigma1=rng.uniform(1.5, 4.0),
            sigma2=rng.uniform(1.5, 4.0),
            theta1=th1,
            theta2=th2,
            rho=rng.uniform(0.0, 0.6),
            theta_bar=max(th1, th2) + rng.uniform(0.3, 1.2),
        )
        prefs = Preferences(
            gamma_L=rng.uniform(0.05, 0.3),
            gamma1=rng.uniform(0.5, 4.0),
            gamma2=rng.uniform(0.5, 4.0),
            k1=rng.uniform(0.0, 0.7),
            k2=rng.uniform(0.0, 0.7),
        )
        cfg = ScenarioConfig(
            market=market,
            claims=claims,
            prefs=prefs,
            delay_L=DelaySpec(rng.uniform(0.5, 4.0), rng.uniform(0.15, 0.8),
                              rng.uniform(0.02, 0.3)),
            delay_1=DelaySpec(rng.uniform(0.5, 4.0), rng.uniform(0.15, 0.8),
                              rng.uniform(0.02, 0.3)),
            delay_2=DelaySpec(rng.uniform(0.5, 4.0), rng.uniform(0.15, 0.8), None),
        )
        try:
            return validate(cfg)
        except (ValidationError, EtaOutOfRange):
            continue
    raise RuntimeError("could not draw a valid random scenario in 200 tries")


def suite_oracle(
    cfg: CheckedScenario, seed: int = 2024, n_scenarios: int = 25
) -> list[CheckResult]:
    """Closed forms vs grid search and fixed-point iteration on random
    scenarios at random times (plus the given scenario)."""
    rng = np.random.default_rng(seed)
    grid = orc.GridSpec()
    out = []
    worst_p = worst_q = 0.0
    skipped = 0
    for j in range(n_scenarios):
        scen = cfg if j == 0 else random_scenario(rng)
        t = float(rng.uniform(0.0, scen.market.T))
        pr = premium_and_retention(t, scen)
        if pr.non_unique:
            skipped += 1
            continue
        p_bf = orc.brute_force_premium(t, scen, grid)
        p_step = grid.p_step(scen.c_F, scen.c_bar)
        worst_p = max(worst_p, abs(p_bf - pr.p_star) / p_step)
        q1, q2 = orc.nash_fixed_point(t, pr.p_star, scen)
        worst_q = max(
            worst_q,
            abs(q1 - pr.q1_star) / grid.q_step,
            abs(q2 - pr.q2_star) / grid.q_step,
        )
    out.append(
        _check(
            f"premium grid search within one step ({n_scenarios} draws)",
            worst_p <= 1.0 + 1e-9,
            f"worst {worst_p:.3f} steps; {skipped} indeterminate-premium draws skipped",
        )
    )
    out.append(
        _check(
            "retention fixed point within one grid step",
            worst_q <= 1.0 + 1e-9,
            f"worst {worst_q:.3f} steps",
        )
    )
    return out


def suite_hjb(
    cfg: CheckedScenario,
    seed: int = 2024,
    n_states: int = 10,
    n_perturb: int = 100,
) -> list[CheckResult]:
    """Generator residual at the equilibrium vs random admissible controls.

    At the optimum the residual must vanish relative to the largest
    generator term; everywhere else the generator must not exceed it.
    """
    rng = np.random.default_rng(seed)
    out = []
    worst_eq = 0.0
    violations = 0
    for _ in range(n_states):
        t = float(rng.uniform(0.0, cfg.market.T * 0.999))
        s = float(rng.uniform(0.5, 2.0))
        xs = rng.uniform(5.0, 15.0, size=3)
        ys = rng.uniform(5.0, 30.0, size=3)
        zs = rng.uniform(5.0, 15.0, size=3)
        ep = equilibrium_point(t, s, cfg)

        state_L = (xs[0], ys[0], zs[0], s)
        res_eq = hjb_residual_L(t, state_L, (ep.p_star, ep.bL_star), cfg)
        worst_eq = max(worst_eq, abs(res_eq.normalized))
        for _ in range(n_perturb):
            p = float(rng.uniform(cfg.c_F, cfg.c_bar))
            b = ep.bL_star * float(rng.uniform(-1.0, 3.0))
            res = hjb_residual_L(t, state_L, (p, b), cfg)
            if res.residual - res_eq.residual > 1e-9 * res.scale:
                violations += 1

        for i, (b_star, q_star) in enumerate(
            [(ep.b1_star, ep.q1_star), (ep.b2_star, ep.q2_star)], start=1
        ):
            own, other = (1, 2) if i == 1 else (2, 1)
            state_F = (xs[own], xs[other], ys[own], ys[other],
                       zs[own], zs[other], s)
            res_eq = hjb_residual_F(t, state_F, (q_star, b_star), i, cfg)
            worst_eq = max(worst_eq, abs(res_eq.normalized))
            for _ in range(n_perturb):
                q = float(rng.uniform(0.0, 1.0))
                b = b_star * float(rng.uniform(-1.0, 3.0))
                res = hjb_residual_F(t, state_F, (q, b), i, cfg)
                if res.residual - res_eq.residual > 1e-9 * res.scale:
                    violations += 1
    out.append(
        _check(
            f"equilibrium residual < 1e-6 of generator scale ({n_states} states)",
            worst_eq < 1e-6,
            f"worst |normalized| {worst_eq:.3e}",
        )
    )
    out.append(
        _check(
            f"no admissible perturbation beats the optimum "
            f"({3 * n_states * n_perturb} draws)",
            violations == 0,
            f"{violations} violations",
        )
    )
    return out


def _fd_sign(f: Callable[[float], float], x: float, rel: float = 1e-5) -> float:
    """Central finite difference of ``f`` at ``x`` with relative step."""
    hh = rel * max(abs(x), 1e-3)
    return (f(x + hh) - f(x - hh)) / (2.0 * hh)


def _rebuilt(cfg: CheckedScenario, path: str) -> Callable[[float], CheckedScenario]:
    def build(v: float) -> CheckedScenario:
        return validate(set_by_path(cfg.config, path, v))

    return build


def suite_signs(cfg: CheckedScenario, t: float = 0.0) -> list[CheckResult]:
    """Finite-difference sign suites for the investment and premium
    comparative statics, the delay branch switches and the terminal
    coincidence of the delayed and memory-free strategies."""
    out = []
    s0 = cfg.market.s0
    pf = cfg.prefs

    def b_of(path: str, agent: int) -> Callable[[float], float]:
        build = _rebuilt(cfg, path)
        return lambda v: investment_strategies(t, s0, build(v))[agent]

    fd_cols = [
        ("b_L vs gamma_L < 0", _fd_sign(b_of("prefs.gamma_L", 0), pf.gamma_L), -1),
        ("b_L vs h_L < 0", _fd_sign(b_of("delay_L.h", 0), cfg.config.delay_L.h), -1),
        ("b_1 vs gamma_1 < 0", _fd_sign(b_of("prefs.gamma1", 1), pf.gamma1), -1),
        ("b_2 vs gamma_2 < 0", _fd_sign(b_of("prefs.gamma2", 2), pf.gamma2), -1),
        ("b_1 vs k_1 > 0", _fd_sign(b_of("prefs.k1", 1), pf.k1), +1),
        ("b_2 vs k_2 > 0", _fd_sign(b_of("prefs.k2", 2), pf.k2), +1),
        ("b_1 vs h_1 < 0", _fd_sign(b_of("delay_1.h", 1), cfg.config.delay_1.h), -1),
        ("b_2 vs h_2 < 0", _fd_sign(b_of("delay_2.h", 2), cfg.config.delay_2.h), -1),
    ]
    for name, fd, sign in fd_cols:
        out.append(_check(name, fd * sign > 0.0, f"fd={fd:.3e}"))

    # Branch switches of the averaging-rate sensitivity, for the reinsurer
    # and insurer 1 (insurer 1's perturbations re-derive insurer 2's weight).
    r0 = cfg.market.r0
    for agent, path_a, idx in (
        ("L", "delay_L.alpha", 0),
        ("1", "delay_1.alpha", 1),
    ):
        h = getattr(cfg.config, f"delay_{agent}").h
        alpha_c = math.log(h) / h  # -(1/h)*ln(1/h)
        build = _rebuilt(cfg, path_a)
        for alpha, want in ((alpha_c * 1.5, +1), (alpha_c, 0), (alpha_c * 0.5, -1)):
            fd = _fd_sign(lambda v: investment_strategies(t, s0, build(v))[idx], alpha)
            scale = abs(investment_strategies(t, s0, cfg)[idx])
            ok = (fd * want > 0) if want else (abs(fd) < 1e-6 * max(scale, 1.0))
            out.append(
                _check(
                    f"b_{agent} vs alpha_{agent}, branch "
                    f"{'=' if not want else ('>' if want > 0 else '<')}",
                    ok,
                    f"fd={fd:.3e} at alpha={alpha:.4f}",
                )
            )

    # Branch switches of the delay-weight sensitivity on the reinsurer,
    # whose delay window constrains nobody else.  The short-window branch
    # for an insurer is incompatible with a positive derived weight for its
    # rival, so the insurer-side weight branches live in the single-insurer
    # checks below.
    alpha_L = cfg.config.delay_L.alpha
    if r0 + alpha_L < 1:
        h_c = -math.log(1.0 - r0 - alpha_L) / alpha_L
        build_h = _rebuilt(cfg, "delay_L.h")
        eta0 = cfg.config.delay_L.eta
        for h_val, want in ((h_c * 0.6, +1), (h_c, 0), (h_c * 1.6, -1)):
            cfg_h = build_h(h_val)
            build_e = _rebuilt(cfg_h, "delay_L.eta")
            fd = _fd_sign(
                lambda v: investment_strategies(t, s0, build_e(v))[0], eta0
            )
            scale = abs(investment_strategies(t, s0, cfg_h)[0])
            ok = (fd * want > 0) if want else (abs(fd) < 1e-6 * max(scale, 1.0))
            out.append(
                _check(
                    f"b_L vs eta_L, branch "
                    f"{'=' if not want else ('>' if want > 0 else '<')}",
                    ok,
                    f"fd={fd:.3e} at h={h_val:.4f}",
                )
            )

    # Terminal coincidence of delayed and memory-free strategies.
    T = cfg.market.T
    epT = equilibrium_point(T, s0, cfg)
    ndT = no_delay_strategy(T, s0, cfg)
    gap = max(
        abs(epT.p_star - ndT.p_star),
        abs(epT.q1_star - ndT.q1_star),
        abs(epT.q2_star - ndT.q2_star),
        abs(epT.bL_star - ndT.bL_star),
        abs(epT.b1_star - ndT.b1_star),
        abs(epT.b2_star - ndT.b2_star),
    )
    out.append(_check("delayed == memory-free at t=T", gap < 1e-10, f"max gap {gap:.2e}"))

    out.extend(single_insurer_sign_checks())
    return out


def interior_single_insurer(
    gamma_L: float = 0.1, gamma1: float = 0.3
) -> CheckedSingleInsurer:
    """A single-insurer market that stays in the interior premium branch."""
    return validate_single(
        SingleInsurerScenario(
            market=FinancialMarket(r0=0.05, r=0.1, sigma=0.4, beta=1.0, s0=1.0, T=10.0),
            a1=4.0,
            sigma1=3.0,
            theta1=0.2,
            theta_bar=2.0,
            gamma_L=gamma_L,
            gamma1=gamma1,
            delay_L=DelaySpec(2.0, 0.3, 0.05),
            delay_1=DelaySpec(2.0, 0.5, 0.05),
        )
    )


def single_insurer_sign_checks(t: float = 3.0) -> list[CheckResult]:
    """Comparative statics of the single-insurer interior equilibrium."""
    base = interior_single_insurer()
    s0 = base.market.s0
    out = []

    def point(cfg1: CheckedSingleInsurer):
        pt = single_insurer_strategy(t, s0, cfg1)
        if pt.case != 4:
            raise RuntimeError(f"fixture left the interior branch: case {pt.case}")
        return pt

    def rebuild(**kw) -> CheckedSingleInsurer:
        cfg1 = base.config
        for key, val in kw.items():
            if key in ("gamma_L", "gamma1"):
                cfg1 = replace(cfg1, **{key: val})
            elif key.startswith("delay_"):
                field_name, attr = key.rsplit(".", 1)
                cfg1 = replace(cfg1, **{field_name: replace(getattr(cfg1, field_name), **{attr: val})})
        return validate_single(cfg1)

    checks = [
        ("p~ vs gamma_L > 0", "gamma_L", base.config.gamma_L, lambda pt: pt.p_star, +1),
        ("p~ vs h_L > 0", "delay_L.h", base.config.delay_L.h, lambda pt: pt.p_star, +1),
        ("q~ vs gamma_1 < 0", "gamma1", base.config.gamma1, lambda pt: pt.q1_star, -1),
        ("q~ vs h_1 < 0", "delay_1.h", base.config.delay_1.h, lambda pt: pt.q1_star, -1),
        ("b~_L vs gamma_L < 0", "gamma_L", base.config.gamma_L, lambda pt: pt.bL_star, -1),
        ("b~_L vs h_L < 0", "delay_L.h", base.config.delay_L.h, lambda pt: pt.bL_star, -1),
        ("b~_1 vs gamma_1 < 0", "gamma1", base.config.gamma1, lambda pt: pt.b1_star, -1),
        ("b~_1 vs h_1 < 0", "delay_1.h", base.config.delay_1.h, lambda pt: pt.b1_star, -1),
    ]
    for name, key, x0, extract, sign in checks:
        fd = _fd_sign(lambda v: extract(point(rebuild(**{key: v}))), x0)
        out.append(_check(f"single-insurer {name}", fd * sign > 0, f"fd={fd:.3e}"))

    # Branch structure of the averaging-rate and weight sensitivities,
    # including the reversed premium branches.
    r0 = base.market.r0
    h = base.config.delay_L.h
    alpha_c = math.log(h) / h
    for alpha, want_b, want_p in ((alpha_c * 1.5, +1, -1), (alpha_c, 0, 0),
                                  (alpha_c * 0.5, -1, +1)):
        fd_b = _fd_sign(lambda v: point(rebuild(**{"delay_L.alpha": v})).bL_star, alpha)
        fd_p = _fd_sign(lambda v: point(rebuild(**{"delay_L.alpha": v})).p_star, alpha)
        lab = "=" if not want_b else ("> branch" if want_b > 0 else "< branch")
        scale_b = abs(point(base).bL_star)
        scale_p = abs(point(base).p_star)
        ok_b = (fd_b * want_b > 0) if want_b else abs(fd_b) < 1e-6 * max(scale_b, 1.0)
        ok_p = (fd_p * want_p > 0) if want_p else abs(fd_p) < 1e-6 * max(scale_p, 1.0)
        out.append(_check(f"single-insurer b~_L vs alpha_L {lab}", ok_b, f"fd={fd_b:.3e}"))
        out.append(_check(f"single-insurer p~ vs alpha_L {lab} (reversed)", ok_p,
                          f"fd={fd_p:.3e}"))
    alpha_L = base.config.delay_L.alpha
    if r0 + alpha_L < 1:
        h_c = -math.log(1.0 - r0 - alpha_L) / alpha_L
        eta0 = base.config.delay_L.eta
        for h_val, want_b, want_p in ((h_c * 0.6, +1, -1), (h_c, 0, 0),
                                      (h_c * 1.6, -1, +1)):
            def with_eta(v, _h=h_val):
                return point(rebuild(**{"delay_L.h": _h, "delay_L.eta": v}))

            fd_b = _fd_sign(lambda v: with_eta(v).bL_star, eta0)
            fd_p = _fd_sign(lambda v: with_eta(v).p_star, eta0)
            lab = "=" if not want_b else ("> branch" if want_b > 0 else "< branch")
            ok_b = (fd_b * want_b > 0) if want_b else abs(fd_b) < 1e-5
            ok_p = (fd_p * want_p > 0) if want_p else abs(fd_p) < 1e-5
            out.append(_check(f"single-insurer b~_L vs eta_L {lab}", ok_b, f"fd={fd_b:.3e}"))
            out.append(_check(f"single-insurer p~ vs eta_L {lab} (reversed)", ok_p,
                              f"fd={fd_p:.3e}"))

    # Insurer-side branch structure: investment and retention share the
    # same switch points in the averaging rate and the delay weight.
    h1 = base.config.delay_1.h
    alpha1_c = math.log(h1) / h1
    for alpha, want in ((alpha1_c * 1.5, +1), (alpha1_c, 0), (alpha1_c * 0.5, -1)):
        fd_b = _fd_sign(lambda v: point(rebuild(**{"delay_1.alpha": v})).b1_star, alpha)
        fd_q = _fd_sign(lambda v: point(rebuild(**{"delay_1.alpha": v})).q1_star, alpha)
        lab = "=" if not want else ("> branch" if want > 0 else "< branch")
        ok_b = (fd_b * want > 0) if want else abs(fd_b) < 1e-5
        ok_q = (fd_q * want > 0) if want else abs(fd_q) < 1e-5
        out.append(_check(f"single-insurer b~_1 vs alpha_1 {lab}", ok_b, f"fd={fd_b:.3e}"))
        out.append(_check(f"single-insurer q~_1 vs alpha_1 {lab}", ok_q, f"fd={fd_q:.3e}"))
    alpha_1 = base.config.delay_1.alpha
    if r0 + alpha_1 < 1:
        h1_c = -math.log(1.0 - r0 - alpha_1) / alpha_1
        eta1 = base.config.delay_1.eta
        for h_val, want in ((h1_c * 0.6, +1), (h1_c, 0), (h1_c * 1.6, -1)):
            def with_eta1(v, _h=h_val):
                return point(rebuild(**{"delay_1.h": _h, "delay_1.eta": v}))

            fd_b = _fd_sign(lambda v: with_eta1(v).b1_star, eta1)
            fd_q = _fd_sign(lambda v: with_eta1(v).q1_star, eta1)
            lab = "=" if not want else ("> branch" if want > 0 else "< branch")
            ok_b = (fd_b * want > 0) if want else abs(fd_b) < 1e-5
            ok_q = (fd_q * want > 0) if want else abs(fd_q) < 1e-5
            out.append(_check(f"single-insurer b~_1 vs eta_1 {lab}", ok_b, f"fd={fd_b:.3e}"))
            out.append(_check(f"single-insurer q~_1 vs eta_1 {lab}", ok_q, f"fd={fd_q:.3e}"))

    # Variance-style pricing of ceded risk in the interior branch.
    worst = 0.0
    for tt in np.linspace(0.0, base.market.T, 20, endpoint=False):
        pt = single_insurer_strategy(float(tt), s0, base)
        if pt.case != 4:
            continue
        from . import kernels as _k

        phi_L = _k.eval_phi(float(tt), base.rate_L, base.market.T)
        phi_F = _k.eval_phi(float(tt), base.rate_F, base.market.T)
        ceded = 1.0 - pt.q1_star
        lhs = pt.p_star * ceded
        rhs = base.config.a1 * ceded + (
            base.config.gamma1 * phi_F + base.config.gamma_L * phi_L
        ) * base.config.sigma1 ** 2 * ceded ** 2
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-30))
    out.append(
        _check(
            "single-insurer interior premium = mean + variance loading",
            worst < 1e-12,
            f"worst rel dev {worst:.2e}",
        )
    )
    return out


SUITES: dict[str, Callable[..., list[CheckResult]]] = {
    "table9": suite_table9,
    "timeline": suite_case_timeline,
    "odes": suite_odes,
    "oracle": suite_oracle,
    "hjb": suite_hjb,
    "signs": suite_signs,
}


def run_suites(cfg: CheckedScenario, names: Iterable[str]) -> list[CheckResult]:
    results = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite '{name}'; choose from {sorted(SUITES)} or 'all'")
        results.extend(SUITES[name](cfg))
    return results
