from dataclasses import replace

import numpy as np
import pytest

import stackgame as sg
from stackgame import kernels, oracle
from stackgame.verify import interior_single_insurer, random_scenario


class TestBruteForceInsurerResponse:
    def test_reference_point(self, default_config):
        q, b = oracle.brute_force_insurer_response(
            9.0, 11.030, 0.612, 1, default_config
        )
        assert abs(q - 0.419) <= 1e-3 + 1e-9
        # the investment argmax brackets the closed-form amount
        _, b1, _ = sg.investment_strategies(9.0, 1.0, default_config)
        # opponent exposure shifts the scanned quantity by k1*b2
        _, _, b2 = sg.investment_strategies(9.0, 1.0, default_config)
        assert b == pytest.approx(b1, abs=default_config.prefs.k1 * abs(b2)
                                  + 10.0 * abs(b1) / 1000.0)

    def test_uncoupled_quadratic_vertex(self, default_config):
        cfg = sg.validate(replace(
            default_config.config,
            prefs=replace(default_config.prefs, k1=0.0, k2=0.0),
        ))
        t, p = 6.0, 10.0
        q, _ = oracle.brute_force_insurer_response(t, p, 0.7, 1, cfg)
        phi = kernels.eval_phi(t, cfg.rate_F, 10.0)
        vertex = (p - cfg.claims.a1) / (cfg.prefs.gamma1 * cfg.claims.sigma1 ** 2 * phi)
        assert abs(q - vertex) <= 1e-3

    def test_thin_margin_stays_nonnegative(self):
        market = sg.FinancialMarket(r0=0.05, r=0.1, sigma=0.4, beta=1.0, s0=1.0, T=10.0)
        claims = sg.ClaimModel(a1=4.0, a2=4.0, sigma1=3.0, sigma2=2.0,
                               theta1=0.05, theta2=0.05, rho=0.3, theta_bar=2.0)
        cfg = sg.validate(sg.ScenarioConfig(
            market=market, claims=claims,
            prefs=sg.Preferences(0.1, 2.0, 3.0, 0.0, 0.0),
            delay_L=sg.DelaySpec(2.0, 0.3, 0.05),
            delay_1=sg.DelaySpec(2.0, 0.5, 0.05),
            delay_2=sg.DelaySpec(3.0, 0.3, None),
        ))
        q, _ = oracle.brute_force_insurer_response(0.0, cfg.c_F, 0.0, 1, cfg)
        assert 0.0 <= q < 0.1


class TestNashFixedPoint:
    def test_reference_solution(self, default_config):
        ke = kernels.eval_case_constants(9.0, default_config)
        q1, q2 = oracle.nash_fixed_point(9.0, ke.p_interior, default_config)
        assert round(q1, 3) == pytest.approx(0.419, abs=1.1e-3)
        assert round(q2, 3) == pytest.approx(0.612, abs=1.1e-3)

    def test_decoupled_when_uncompetitive(self, default_config):
        cfg = sg.validate(replace(
            default_config.config,
            prefs=replace(default_config.prefs, k1=0.0, k2=0.0),
        ))
        phi = kernels.eval_phi(5.0, cfg.rate_F, 10.0)
        q1, q2 = oracle.nash_fixed_point(5.0, 11.0, cfg)
        assert q1 == pytest.approx(
            (11.0 - 4.0) / (cfg.prefs.gamma1 * 9.0 * phi), rel=1e-12
        )
        assert q2 == pytest.approx(
            min(1.0, (11.0 - 4.0) / (cfg.prefs.gamma2 * 4.0 * phi)), rel=1e-12
        )

    def test_cap_binding_matches_boundary_formula(self, default_config):
        # weakly risk-averse insurer 1 caps out; insurer 2 follows linearly
        cfg = sg.validate(replace(
            default_config.config,
            prefs=replace(default_config.prefs, gamma1=0.08),
        ))
        t, p = 0.0, cfg.c_bar
        q1, q2 = oracle.nash_fixed_point(t, p, cfg)
        assert q1 == 1.0
        ke = kernels.eval_case_constants(t, cfg)
        m2 = cfg.prefs.k2 * cfg.claims.rho * cfg.claims.sigma1 / cfg.claims.sigma2
        assert q2 == pytest.approx(ke.N_cbar2 + m2, rel=1e-10)

    def test_vectorized_over_premiums(self, default_config):
        ps = np.linspace(8.8, 12.0, 11)
        q1, q2 = oracle.nash_fixed_point(3.0, ps, default_config)
        assert q1.shape == ps.shape
        for j, p in enumerate(ps):
            a, b = oracle.nash_fixed_point(3.0, float(p), default_config)
            assert (a, b) == (q1[j], q2[j])

    def test_contraction_monotone(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            cfg = random_scenario(rng)
            t = float(rng.uniform(0.0, cfg.market.T))
            p = float(rng.uniform(cfg.c_F, cfg.c_bar))
            cl, pf = cfg.claims, cfg.prefs
            phi = kernels.eval_phi(t, cfg.rate_F, cfg.market.T)
            n1 = (p - cl.a1) / (pf.gamma1 * cl.sigma1 ** 2 * phi)
            n2 = (p - cl.a2) / (pf.gamma2 * cl.sigma2 ** 2 * phi)
            m1 = pf.k1 * cl.rho * cl.sigma2 / cl.sigma1
            m2 = pf.k2 * cl.rho * cl.sigma1 / cl.sigma2
            q = np.array([0.5, 0.5])
            dists = []
            for _ in range(40):
                q_new = np.clip([n1 + m1 * q[1], n2 + m2 * q[0]], 0.0, 1.0)
                dists.append(float(np.max(np.abs(q_new - q))))
                q = q_new
            moving = [d for d in dists if d > 1e-15]
            assert all(a >= b for a, b in zip(moving, moving[1:]))


class TestBruteForcePremium:
    def test_cap_region(self, default_config):
        assert oracle.brute_force_premium(3.0, default_config) == 12.0

    def test_interior_region(self, default_config):
        grid = oracle.GridSpec()
        p = oracle.brute_force_premium(9.0, default_config, grid)
        step = grid.p_step(default_config.c_F, default_config.c_bar)
        assert abs(p - 11.030) <= step + 1e-3

    def test_single_insurer_interior_formula(self):
        # test-local scan of the reduced leader objective
        cfg = interior_single_insurer()
        c = cfg.config
        t = 6.0
        phi_L = kernels.eval_phi(t, cfg.rate_L, 10.0)
        phi_F = kernels.eval_phi(t, cfg.rate_F, 10.0)
        gs = c.gamma1 * c.sigma1 ** 2 * phi_F
        ps = np.linspace(cfg.c_F, cfg.c_bar, 2001)
        q = np.minimum((ps - c.a1) / gs, 1.0)
        ceded = 1.0 - q
        g = c.gamma_L * phi_L
        objective = g * (ps - c.a1) * ceded - 0.5 * g * g * (ceded * c.sigma1) ** 2
        p_scan = ps[int(np.argmax(objective))]
        pt = sg.single_insurer_strategy(t, 1.0, cfg)
        assert abs(p_scan - pt.p_star) <= (cfg.c_bar - cfg.c_F) / 2000 + 1e-12


class TestKernelOdes:
    def test_defaults(self, default_config):
        rep = oracle.ode_check_kernels(default_config, n_points=100)
        assert rep.max_dev < 1e-9

    def test_gbm_linear_kernel(self, default_config):
        cfg0 = sg.validate(replace(
            default_config.config,
            market=replace(default_config.market, beta=0.0),
        ))
        rep = oracle.ode_check_kernels(cfg0, n_points=50)
        assert rep.max_dev_g1 < 1e-12

    def test_zero_rate_kernel_constant(self):
        for t in (0.0, 5.0, 10.0):
            assert kernels.eval_phi(t, 0.0, 10.0) == 1.0


class TestOracleAgreement:
    def test_random_scenarios(self, default_config):
        rng = np.random.default_rng(17)
        grid = oracle.GridSpec()
        for j in range(5):
            cfg = default_config if j == 0 else random_scenario(rng)
            t = float(rng.uniform(0.0, cfg.market.T))
            pr = sg.premium_and_retention(t, cfg)
            if pr.non_unique:
                continue
            p_bf = oracle.brute_force_premium(t, cfg, grid)
            assert abs(p_bf - pr.p_star) <= grid.p_step(cfg.c_F, cfg.c_bar) + 1e-12
            q1, q2 = oracle.nash_fixed_point(t, pr.p_star, cfg)
            assert abs(q1 - pr.q1_star) <= grid.q_step
            assert abs(q2 - pr.q2_star) <= grid.q_step
