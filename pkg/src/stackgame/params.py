"""Model parameters, derived delay coefficients and scenario validation.

The game couples one reinsurer (leader) with two competing insurers
(followers).  A scenario bundles the financial market, the claim diffusions,
CARA preferences and one delay specification per agent.  Before any strategy
can be evaluated the delay specification must be turned into the capital-flow
coefficients ``(A, B, C)`` and the whole bundle checked against the
structural conditions the closed forms require, most importantly
``A_1 + eta_1 == A_2 + eta_2``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields, replace
from typing import Optional

__all__ = [
    "FinancialMarket",
    "ClaimModel",
    "DelaySpec",
    "NO_DELAY",
    "DerivedDelayCoeffs",
    "Preferences",
    "ScenarioConfig",
    "CheckedScenario",
    "SingleInsurerScenario",
    "CheckedSingleInsurer",
    "ParameterError",
    "EtaOutOfRange",
    "DegenerateBand",
    "ValidationError",
    "derive_delay_coefficients",
    "derive_eta2",
    "premium_bounds",
    "validate",
    "validate_single",
    "load_scenario",
    "load_scenario_file",
    "set_by_path",
    "PARAM_PATHS",
]


class ParameterError(ValueError):
    """Base class for parameter and validation failures."""


class EtaOutOfRange(ParameterError):
    """The derived terminal delay weight landed outside (0, 1)."""


class DegenerateBand(ParameterError):
    """Premium band is empty: the loading cap is too small."""


class ValidationError(ParameterError):
    """Scenario rejected; ``report`` lists every violated condition."""

    def __init__(self, report: list[str]):
        self.report = list(report)
        super().__init__("scenario validation failed:\n  - " + "\n  - ".join(report))


@dataclass(frozen=True)
class FinancialMarket:
    """Risk-free rate, risky-asset dynamics and horizon.

    The risky asset has drift ``r`` and volatility ``sigma * S**beta``;
    ``beta == 0`` is the geometric Brownian motion reduction.
    """

    r0: float
    r: float
    sigma: float
    beta: float
    s0: float
    T: float

    def problems(self) -> list[str]:
        out = []
        if not self.r0 > 0:
            out.append(f"r0 must be > 0, got {self.r0}")
        if not self.r > self.r0:
            out.append(f"r must exceed r0, got r={self.r}, r0={self.r0}")
        if not self.sigma > 0:
            out.append(f"sigma must be > 0, got {self.sigma}")
        if not self.T > 0:
            out.append(f"T must be > 0, got {self.T}")
        if not self.s0 > 0:
            out.append(f"s0 must be > 0, got {self.s0}")
        return out


@dataclass(frozen=True)
class ClaimModel:
    """Diffusion-approximated claim processes and premium loadings.

    ``a_i`` is the claim-rate mean (intensity times mean claim size) and
    ``sigma_i`` the diffusion scale of insurer i's claims; ``rho`` is the
    correlation induced by common shocks.  ``theta_i`` are the insurers'
    safety loadings, ``theta_bar`` the cap on the reinsurer's loading.
    """

    a1: float
    a2: float
    sigma1: float
    sigma2: float
    theta1: float
    theta2: float
    rho: float
    theta_bar: float

    @classmethod
    def from_poisson(
        cls,
        lambda1: float,
        mu1: float,
        m2_1: float,
        lambda2: float,
        mu2: float,
        m2_2: float,
        lambda_common: float,
        theta1: float,
        theta2: float,
        theta_bar: float,
    ) -> "ClaimModel":
        """Build the diffusion parameters from compound-Poisson primitives.

        ``lambda_i`` are the idiosyncratic claim intensities, ``lambda_common``
        the shared-shock intensity, ``mu_i`` mean claim sizes and ``m2_i``
        second moments.  The total intensity seen by insurer i is
        ``lambda_i + lambda_common``.
        """
        l1 = lambda1 + lambda_common
        l2 = lambda2 + lambda_common
        s1 = math.sqrt(l1 * m2_1)
        s2 = math.sqrt(l2 * m2_2)
        rho = lambda_common * mu1 * mu2 / (s1 * s2)
        return cls(l1 * mu1, l2 * mu2, s1, s2, theta1, theta2, rho, theta_bar)

    def problems(self) -> list[str]:
        out = []
        for name in ("a1", "a2", "sigma1", "sigma2", "theta1", "theta2"):
            v = getattr(self, name)
            if not v > 0:
                out.append(f"{name} must be > 0, got {v}")
        if self.rho < 0:
            out.append(f"rho < 0 is unsupported, got {self.rho}")
        elif not self.rho < 1:
            out.append(f"rho must lie in [0, 1), got {self.rho}")
        if not self.theta_bar > max(self.theta1, self.theta2):
            out.append(
                "theta_bar must exceed both insurer loadings, got "
                f"theta_bar={self.theta_bar}, theta1={self.theta1}, theta2={self.theta2}"
            )
        return out


@dataclass(frozen=True)
class DelaySpec:
    """Bounded-memory window: length ``h``, averaging rate ``alpha``,
    terminal weight ``eta``.

    ``eta=None`` marks a weight that must be derived from the other agents'
    delay parameters.  ``h == alpha == eta == 0`` is the documented no-delay
    degeneration (capital flows vanish, ``A`` collapses to the risk-free
    rate).
    """

    h: float
    alpha: float
    eta: Optional[float] = None

    @property
    def is_zero(self) -> bool:
        return self.h == 0.0 and self.alpha == 0.0 and self.eta == 0.0

    def problems(self) -> list[str]:
        if self.is_zero:
            return []
        out = []
        if not self.h > 0:
            out.append(f"h must be > 0, got {self.h}")
        if not self.alpha > 0:
            out.append(f"alpha must be > 0, got {self.alpha}")
        if self.eta is not None and not 0 < self.eta < 1:
            out.append(f"eta must lie in (0, 1), got {self.eta}")
        return out


NO_DELAY = DelaySpec(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class DerivedDelayCoeffs:
    """Capital-flow coefficients of the wealth dynamics.

    ``A`` multiplies current wealth, ``B`` the integrated past-wealth gap,
    ``C`` the lagged-wealth gap.  They satisfy ``A = r0 - B - C``,
    ``C = eta * exp(-alpha*h)`` and ``B*exp(-alpha*h) = (alpha+A+eta)*C``.
    """

    A: float
    B: float
    C: float

    def residuals(self, spec: DelaySpec, r0: float) -> tuple[float, float, float]:
        """Signed residuals of the three defining constraints."""
        eta = 0.0 if spec.eta is None else spec.eta
        decay = math.exp(-spec.alpha * spec.h)
        return (
            self.A - (r0 - self.B - self.C),
            self.C - eta * decay,
            self.B * decay - (spec.alpha + self.A + eta) * self.C,
        )


@dataclass(frozen=True)
class Preferences:
    """CARA risk aversions and the insurers' competition sensitivities."""

    gamma_L: float
    gamma1: float
    gamma2: float
    k1: float
    k2: float

    def problems(self) -> list[str]:
        out = []
        for name in ("gamma_L", "gamma1", "gamma2"):
            v = getattr(self, name)
            if not v > 0:
                out.append(f"{name} must be > 0, got {v}")
        for name in ("k1", "k2"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                out.append(f"{name} must lie in [0, 1], got {v}")
        if not self.k1 * self.k2 < 1:
            out.append(f"k1*k2 must be < 1, got {self.k1 * self.k2}")
        return out


@dataclass(frozen=True)
class ScenarioConfig:
    """Full parameter set of the three-agent game, before validation."""

    market: FinancialMarket
    claims: ClaimModel
    prefs: Preferences
    delay_L: DelaySpec
    delay_1: DelaySpec
    delay_2: DelaySpec
    x_L0: float = 10.0
    x_10: float = 10.0
    x_20: float = 10.0


def derive_delay_coefficients(spec: DelaySpec, r0: float) -> DerivedDelayCoeffs:
    """Solve the three delay constraints for ``(A, B, C)``.

    Closed form: ``A = [r0 - (alpha+eta)*eta - eta*exp(-alpha*h)] / (1+eta)``,
    then ``C = eta*exp(-alpha*h)`` and ``B = r0 - A - C``.
    """
    probs = spec.problems()
    if probs or spec.eta is None:
        if spec.eta is None:
            probs.append("eta is unset; derive it first")
        raise ParameterError("invalid delay spec: " + "; ".join(probs))
    if spec.is_zero:
        return DerivedDelayCoeffs(A=r0, B=0.0, C=0.0)
    eta = spec.eta
    decay = math.exp(-spec.alpha * spec.h)
    A = (r0 - (spec.alpha + eta) * eta - eta * decay) / (1.0 + eta)
    C = eta * decay
    B = r0 - A - C
    return DerivedDelayCoeffs(A=A, B=B, C=C)


def phi_rate(spec: DelaySpec, r0: float) -> float:
    """Discount-kernel rate ``A + eta`` for a delay spec."""
    if spec.is_zero:
        return r0
    return derive_delay_coefficients(spec, r0).A + spec.eta


def derive_eta2(delay1: DelaySpec, h2: float, alpha2: float, r0: float) -> float:
    """Terminal weight for the second agent that equalizes ``A + eta``.

    With ``u(h, a) = r0 - 1 + exp(-a*h) + a`` the matching weight is
    ``eta2 = u(h1, a1)*eta1 / (u(h2, a2) + (a2 - a1 + exp(-a2*h2)
    - exp(-a1*h1))*eta1)``.  Raises :class:`EtaOutOfRange` when the formula
    leaves (0, 1), which signals an inconsistent parameter choice.
    """
    if delay1.eta is None:
        raise ParameterError("delay1.eta must be set to derive eta2")
    u1 = r0 - 1.0 + math.exp(-delay1.alpha * delay1.h) + delay1.alpha
    u2 = r0 - 1.0 + math.exp(-alpha2 * h2) + alpha2
    den = u2 + (alpha2 - delay1.alpha + math.exp(-alpha2 * h2)
                - math.exp(-delay1.alpha * delay1.h)) * delay1.eta
    if den == 0.0:
        raise EtaOutOfRange("eta2 is undefined for these delay parameters")
    eta2 = u1 * delay1.eta / den
    if not 0.0 < eta2 < 1.0:
        raise EtaOutOfRange(
            f"derived eta2={eta2:.6g} outside (0, 1); "
            f"inputs h2={h2}, alpha2={alpha2} are inconsistent with insurer 1's delay"
        )
    return eta2


def premium_bounds(claims: ClaimModel) -> tuple[float, float]:
    """Admissible premium band ``[c_F, c_bar]``.

    The floor is the larger of the two insurers' own premium rates
    ``(1+theta_i)*a_i``; the cap applies the reinsurer's maximal loading to
    the larger claim-rate mean.
    """
    c_F = max((1.0 + claims.theta1) * claims.a1, (1.0 + claims.theta2) * claims.a2)
    c_bar = (1.0 + claims.theta_bar) * max(claims.a1, claims.a2)
    if not c_F < c_bar:
        raise DegenerateBand(
            f"premium band is empty: c_F={c_F} >= c_bar={c_bar}; increase theta_bar"
        )
    return c_F, c_bar


@dataclass(frozen=True)
class CheckedScenario:
    """Validated scenario plus everything derived from it.

    Construct only through :func:`validate`.  ``config.delay_2.eta`` is
    always filled in.  Hashable, so downstream layers may cache per-scenario
    work (case segmentation, quadratures) keyed on this object.
    """

    config: ScenarioConfig
    coeffs_L: DerivedDelayCoeffs
    coeffs_1: DerivedDelayCoeffs
    coeffs_2: DerivedDelayCoeffs
    c_F: float
    c_bar: float

    @property
    def market(self) -> FinancialMarket:
        return self.config.market

    @property
    def claims(self) -> ClaimModel:
        return self.config.claims

    @property
    def prefs(self) -> Preferences:
        return self.config.prefs

    @property
    def rate_L(self) -> float:
        """Discount-kernel rate ``A_L + eta_L`` of the reinsurer."""
        return self.coeffs_L.A + self.config.delay_L.eta

    @property
    def rate_F(self) -> float:
        """Common discount-kernel rate ``A_i + eta_i`` of the insurers."""
        return self.coeffs_1.A + self.config.delay_1.eta

    def coeffs(self, agent: str) -> DerivedDelayCoeffs:
        return {"L": self.coeffs_L, "1": self.coeffs_1, "2": self.coeffs_2}[agent]


_RATE_MATCH_RTOL = 1e-10


def validate(config: ScenarioConfig) -> CheckedScenario:
    """Check every structural condition and return a usable scenario.

    Validation is total: all violations are collected into a single
    :class:`ValidationError` instead of stopping at the first one.  A
    missing ``delay_2.eta`` is derived here; a user-supplied value is kept
    only if it already satisfies the rate-matching condition.
    """
    report: list[str] = []
    report += [f"market: {p}" for p in config.market.problems()]
    report += [f"claims: {p}" for p in config.claims.problems()]
    report += [f"prefs: {p}" for p in config.prefs.problems()]
    report += [f"delay_L: {p}" for p in config.delay_L.problems()]
    report += [f"delay_1: {p}" for p in config.delay_1.problems()]
    report += [f"delay_2: {p}" for p in config.delay_2.problems()]

    k1k2rho2 = config.prefs.k1 * config.prefs.k2 * config.claims.rho ** 2
    if not k1k2rho2 < 1:
        report.append(f"k1*k2*rho^2 must be < 1, got {k1k2rho2}")

    if config.delay_L.eta is None:
        report.append("delay_L: eta must be supplied")
    if config.delay_1.eta is None:
        report.append("delay_1: eta must be supplied")

    try:
        c_F, c_bar = premium_bounds(config.claims)
    except (DegenerateBand, ValueError) as exc:
        report.append(str(exc))
        c_F = c_bar = float("nan")

    delay_2 = config.delay_2
    if not report:
        r0 = config.market.r0
        if delay_2.eta is None:
            if config.delay_1.is_zero:
                # No-delay insurer 1 admits no positive matching weight.
                report.append("delay_2: eta cannot be derived from a zero delay_1")
            else:
                try:
                    delay_2 = replace(
                        delay_2,
                        eta=derive_eta2(config.delay_1, delay_2.h, delay_2.alpha, r0),
                    )
                except EtaOutOfRange as exc:
                    report.append(f"delay_2: {exc}")
        if not report:
            probs2 = delay_2.problems()
            report += [f"delay_2: {p}" for p in probs2]
    if report:
        raise ValidationError(report)

    config = replace(config, delay_2=delay_2)
    r0 = config.market.r0
    coeffs_L = derive_delay_coefficients(config.delay_L, r0)
    coeffs_1 = derive_delay_coefficients(config.delay_1, r0)
    coeffs_2 = derive_delay_coefficients(config.delay_2, r0)

    rate1 = coeffs_1.A + config.delay_1.eta
    rate2 = coeffs_2.A + config.delay_2.eta
    scale = max(abs(rate1), abs(rate2), 1e-30)
    if abs(rate1 - rate2) > _RATE_MATCH_RTOL * scale:
        raise ValidationError(
            [
                "A_1 + eta_1 must equal A_2 + eta_2: "
                f"{rate1!r} vs {rate2!r} (relative mismatch "
                f"{abs(rate1 - rate2) / scale:.3e})"
            ]
        )
    return CheckedScenario(
        config=config,
        coeffs_L=coeffs_L,
        coeffs_1=coeffs_1,
        coeffs_2=coeffs_2,
        c_F=c_F,
        c_bar=c_bar,
    )


# ---------------------------------------------------------------------------
# Single-insurer reduction (one reinsurer, one insurer)


@dataclass(frozen=True)
class SingleInsurerScenario:
    """Reduced market with one insurer; competition terms drop out."""

    market: FinancialMarket
    a1: float
    sigma1: float
    theta1: float
    theta_bar: float
    gamma_L: float
    gamma1: float
    delay_L: DelaySpec
    delay_1: DelaySpec
    x_L0: float = 10.0
    x_10: float = 10.0


@dataclass(frozen=True)
class CheckedSingleInsurer:
    config: SingleInsurerScenario
    coeffs_L: DerivedDelayCoeffs
    coeffs_1: DerivedDelayCoeffs
    c_F: float
    c_bar: float

    @property
    def market(self) -> FinancialMarket:
        return self.config.market

    @property
    def rate_L(self) -> float:
        return self.coeffs_L.A + self.config.delay_L.eta

    @property
    def rate_F(self) -> float:
        return self.coeffs_1.A + self.config.delay_1.eta


def validate_single(config: SingleInsurerScenario) -> CheckedSingleInsurer:
    """Validation for the single-insurer reduction."""
    report = [f"market: {p}" for p in config.market.problems()]
    if not config.a1 > 0:
        report.append(f"a1 must be > 0, got {config.a1}")
    if not config.sigma1 > 0:
        report.append(f"sigma1 must be > 0, got {config.sigma1}")
    if not config.theta1 > 0:
        report.append(f"theta1 must be > 0, got {config.theta1}")
    if not config.theta_bar > config.theta1:
        report.append("theta_bar must exceed theta1")
    for name in ("gamma_L", "gamma1"):
        if not getattr(config, name) > 0:
            report.append(f"{name} must be > 0")
    report += [f"delay_L: {p}" for p in config.delay_L.problems()]
    report += [f"delay_1: {p}" for p in config.delay_1.problems()]
    if config.delay_L.eta is None or config.delay_1.eta is None:
        report.append("both delay weights must be supplied")
    if report:
        raise ValidationError(report)
    r0 = config.market.r0
    return CheckedSingleInsurer(
        config=config,
        coeffs_L=derive_delay_coefficients(config.delay_L, r0),
        coeffs_1=derive_delay_coefficients(config.delay_1, r0),
        c_F=(1.0 + config.theta1) * config.a1,
        c_bar=(1.0 + config.theta_bar) * config.a1,
    )


# ---------------------------------------------------------------------------
# Scenario files


_MARKET_KEYS = {"r0", "r", "sigma", "beta", "s0", "t"}
_CLAIM_DIRECT_KEYS = {"a1", "a2", "sigma1", "sigma2", "theta1", "theta2", "rho", "theta_bar"}
_CLAIM_RAW_KEYS = {
    "lambda1", "mu1", "m2_1", "lambda2", "mu2", "m2_2", "lambda_common",
    "theta1", "theta2", "theta_bar",
}
_AGENT_KEYS = {"h", "alpha", "eta", "gamma", "k", "x0"}


def _section(cp: configparser.ConfigParser, name: str, allowed: set[str]) -> dict[str, float]:
    if not cp.has_section(name):
        raise ParameterError(f"scenario file is missing the [{name}] section")
    out = {}
    for key, raw in cp.items(name):
        if key not in allowed:
            raise ParameterError(f"unknown key '{key}' in [{name}]")
        try:
            out[key] = float(raw)
        except ValueError as exc:
            raise ParameterError(f"[{name}] {key}: not a number: {raw!r}") from exc
    return out


def load_scenario(text: str) -> ScenarioConfig:
    """Parse scenario text in INI form.

    Sections: ``[market]``, ``[claims]``, ``[reinsurer]``, ``[insurer1]``,
    ``[insurer2]``.  Claims accept either the direct diffusion form or the
    compound-Poisson raw form.  ``eta`` may be omitted for insurer 2, in
    which case validation derives it.  Unknown keys are errors.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParameterError(f"malformed scenario file: {exc}") from exc
    known = {"market", "claims", "reinsurer", "insurer1", "insurer2"}
    extra = set(cp.sections()) - known
    if extra:
        raise ParameterError(f"unknown sections: {sorted(extra)}")

    m = _section(cp, "market", _MARKET_KEYS)
    missing = _MARKET_KEYS - set(m)
    if missing:
        raise ParameterError(f"[market] is missing keys: {sorted(missing)}")
    market = FinancialMarket(r0=m["r0"], r=m["r"], sigma=m["sigma"],
                             beta=m["beta"], s0=m["s0"], T=m["t"])

    craw = dict(cp.items("claims")) if cp.has_section("claims") else None
    if craw is None:
        raise ParameterError("scenario file is missing the [claims] section")
    if "a1" in craw:
        c = _section(cp, "claims", _CLAIM_DIRECT_KEYS)
        missing = _CLAIM_DIRECT_KEYS - set(c)
        if missing:
            raise ParameterError(f"[claims] is missing keys: {sorted(missing)}")
        claims = ClaimModel(a1=c["a1"], a2=c["a2"], sigma1=c["sigma1"],
                            sigma2=c["sigma2"], theta1=c["theta1"],
                            theta2=c["theta2"], rho=c["rho"],
                            theta_bar=c["theta_bar"])
    else:
        c = _section(cp, "claims", _CLAIM_RAW_KEYS)
        missing = _CLAIM_RAW_KEYS - set(c)
        if missing:
            raise ParameterError(f"[claims] is missing keys: {sorted(missing)}")
        claims = ClaimModel.from_poisson(
            c["lambda1"], c["mu1"], c["m2_1"], c["lambda2"], c["mu2"], c["m2_2"],
            c["lambda_common"], c["theta1"], c["theta2"], c["theta_bar"],
        )

    agents = {}
    for section in ("reinsurer", "insurer1", "insurer2"):
        agents[section] = _section(cp, section, _AGENT_KEYS)
    for section in ("reinsurer", "insurer1"):
        need = {"h", "alpha", "eta", "gamma", "x0"}
        missing = need - set(agents[section])
        if missing:
            raise ParameterError(f"[{section}] is missing keys: {sorted(missing)}")
    need2 = {"h", "alpha", "gamma", "x0"}
    missing = need2 - set(agents["insurer2"])
    if missing:
        raise ParameterError(f"[insurer2] is missing keys: {sorted(missing)}")
    for section in ("insurer1", "insurer2"):
        if "k" not in agents[section]:
            raise ParameterError(f"[{section}] is missing keys: ['k']")
    if "k" in agents["reinsurer"]:
        raise ParameterError("unknown key 'k' in [reinsurer]")

    rein, in1, in2 = agents["reinsurer"], agents["insurer1"], agents["insurer2"]
    prefs = Preferences(gamma_L=rein["gamma"], gamma1=in1["gamma"],
                        gamma2=in2["gamma"], k1=in1["k"], k2=in2["k"])
    return ScenarioConfig(
        market=market,
        claims=claims,
        prefs=prefs,
        delay_L=DelaySpec(h=rein["h"], alpha=rein["alpha"], eta=rein["eta"]),
        delay_1=DelaySpec(h=in1["h"], alpha=in1["alpha"], eta=in1["eta"]),
        delay_2=DelaySpec(h=in2["h"], alpha=in2["alpha"], eta=in2.get("eta")),
        x_L0=rein["x0"],
        x_10=in1["x0"],
        x_20=in2["x0"],
    )


def load_scenario_file(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read())


# ---------------------------------------------------------------------------
# Parameter paths (sweep support)

PARAM_PATHS = tuple(
    f"{group}.{f.name}"
    for group, cls in (
        ("market", FinancialMarket),
        ("claims", ClaimModel),
        ("prefs", Preferences),
        ("delay_L", DelaySpec),
        ("delay_1", DelaySpec),
        ("delay_2", DelaySpec),
    )
    for f in fields(cls)
) + ("x_L0", "x_10", "x_20")


def set_by_path(config: ScenarioConfig, path: str, value: float) -> ScenarioConfig:
    """Return a copy of ``config`` with the dotted ``path`` replaced.

    Changing a delay parameter breaks the rate-matching condition, so the
    *other* insurer's terminal weight is re-derived: touching ``delay_1`` or
    the market re-derives insurer 2's weight; touching ``delay_2`` holds its
    own weight fixed and re-derives insurer 1's.  That keeps the perturbed
    agent's kernel rate actually moving, which is what parameter sweeps and
    sensitivity signs are about.
    """
    if path not in PARAM_PATHS:
        raise ParameterError(f"unknown parameter path '{path}'")
    if "." not in path:
        return replace(config, **{path: value})
    group, name = path.split(".", 1)
    new_group = replace(getattr(config, group), **{name: value})
    cfg = replace(config, **{group: new_group})
    if cfg.delay_1.is_zero and (cfg.delay_2.is_zero or cfg.delay_2.eta == 0.0):
        return cfg
    if group == "delay_2":
        if cfg.delay_2.eta is None:
            raise ParameterError(
                "cannot perturb delay_2 before its eta has been derived"
            )
        eta1 = derive_eta2(cfg.delay_2, cfg.delay_1.h, cfg.delay_1.alpha, cfg.market.r0)
        return replace(cfg, delay_1=replace(cfg.delay_1, eta=eta1))
    if group in ("delay_1", "market"):
        cfg = replace(cfg, delay_2=replace(cfg.delay_2, eta=None))
    return cfg
