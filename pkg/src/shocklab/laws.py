"""Limit-law constants and scaling transforms for the three shock scenarios.

Each scenario's law is a product G1(s) G2(s) of shifted/scaled Tracy-Widom
distributions; constants are stored as closed-form expressions evaluated in
double precision at query time, so tests can demand 1e-12 agreement.

The spatial transform maps fixed-time particle queries to passage-time
queries: with eta0 = 1 + v/nu, u = -(s + xi v/nu) nu^(-1/3) and
s~ = xi (beta mu'(beta/nu) - 1) nu^(-4/3), subject to the shock-locating
condition mu(beta/nu) = 1/nu.  Because the leading order of a shock's two
one-sided problems responds differently to the boundary parameter, the
mu'-term is tracked per factor; regenerating the particle-side constants
(densities rho and scales) from the passage-time side is an exact algebraic
identity used as a transcription check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError, ScenarioMismatchError
from .tracy_widom import tw_cdf

SCENARIOS = ("F1F1", "F2F1", "F2F2")


@dataclass(frozen=True)
class FactorLaw:
    """One side of the product law, in passage-time variables:
    G(s) = F_kind((s - shift*u - b_shift*b) / sigma)."""
    kind: str
    sigma: float
    shift: float
    b_shift: float = 0.0
    mu_prime: float = 0.0  # boundary sensitivity of this side's leading order

    def cdf(self, s, u: float = 0.0, b: float = 0.0, tabulated: bool = True):
        arg = (s - self.shift * u - self.b_shift * b) / self.sigma
        return tw_cdf(self.kind, arg, tabulated=tabulated)


@dataclass(frozen=True)
class ShockLaw:
    """All limit-law constants of one scenario."""
    scenario: str
    alpha: float
    beta_param: float         # passage-time-frame boundary parameter (F2F2)
    mu: float                 # leading constant, passage time per unit t
    eta0: float               # shock direction
    g1: FactorLaw
    g2: FactorLaw
    nu: float                 # particle-index fraction at the shock
    v: float                  # shock speed
    beta_spatial: float       # fixed-time-frame boundary parameter
    rho1: float
    rho2: float
    tasep_sigma1: float
    tasep_sigma2: float

    def product_cdf_lpp(self, s, u: float = 0.0, b: float = 0.0,
                        tabulated: bool = True):
        """Limit law of (max{L1, L2} - mu t)/t^(1/3) <= s."""
        return (self.g1.cdf(s, u, b, tabulated)
                * self.g2.cdf(s, u, b, tabulated))

    def product_cdf_tasep(self, s, xi: float = 0.0, tabulated: bool = True):
        """Limit law of x_{nu t + xi t^(1/3)}(t) >= v t - s t^(1/3)."""
        a1 = (s - xi / self.rho1) / self.tasep_sigma1
        a2 = (s - xi / self.rho2) / self.tasep_sigma2
        return (tw_cdf(self.g1.kind, a1, tabulated=tabulated)
                * tw_cdf(self.g2.kind, a2, tabulated=tabulated))


def law_constants(scenario: str, alpha: float,
                  beta_param: float = 0.0) -> ShockLaw:
    """Closed-form constants of one scenario (no numerics beyond
    arithmetic).  beta_param is the F2F2 boundary parameter; F1F1 and F2F1
    ignore it."""
    if scenario not in SCENARIOS:
        raise ParameterError(f"unknown scenario {scenario!r}")
    if scenario == "F1F1":
        if not (0.0 < alpha < 1.0):
            raise ParameterError("F1F1 needs alpha in (0,1)")
        a = alpha
        eta0 = a / (2.0 - a)
        mu = 4.0 / (2.0 - a)
        s1 = 2.0 ** (2.0 / 3.0) / (2.0 - a) ** (1.0 / 3.0)
        s2 = (2.0 ** (2.0 / 3.0) * (2.0 - 2.0 * a + a * a) ** (1.0 / 3.0)
              / (a ** (2.0 / 3.0) * (2.0 - a)))
        return ShockLaw(
            scenario=scenario, alpha=a, beta_param=0.0, mu=mu, eta0=eta0,
            g1=FactorLaw("F1", s1, 2.0),
            g2=FactorLaw("F1", s2, 2.0 / a),
            nu=(2.0 - a) / 4.0, v=-(1.0 - a) / 2.0, beta_spatial=0.0,
            rho1=0.5, rho2=(2.0 - a) / 2.0,
            tasep_sigma1=0.5,
            tasep_sigma2=(a ** (1.0 / 3.0)
                          * (2.0 - 2.0 * a + a * a) ** (1.0 / 3.0)
                          / (2.0 * (2.0 - a) ** (2.0 / 3.0))))
    if scenario == "F2F1":
        if not (0.0 < alpha < 1.0):
            raise ParameterError("F2F1 needs alpha in (0,1)")
        a = alpha
        eta0 = a * (3.0 - 2.0 * a) / (2.0 - a)
        beta0 = 1.0 - eta0
        poly = 6.0 - 10.0 * a + 6.0 * a * a - a ** 3
        s2 = (2.0 ** (2.0 / 3.0) * poly ** (1.0 / 3.0)
              / (a ** (2.0 / 3.0) * (2.0 - a)))
        v = -(1.0 - a) ** 2 / (2.0 * (2.0 - a))
        return ShockLaw(
            scenario=scenario, alpha=a, beta_param=beta0, mu=4.0, eta0=eta0,
            # the point-to-point side responds to the boundary wiggle with
            # mu' = 1 + 1/sqrt(eta0 + beta0) = 2; the half-line side not at all
            g1=FactorLaw("F2", 2.0 ** (4.0 / 3.0), 2.0, b_shift=2.0,
                         mu_prime=2.0),
            g2=FactorLaw("F1", s2, 2.0 / a),
            nu=0.25, v=v, beta_spatial=-v,
            rho1=0.5, rho2=(2.0 - a) / 2.0,
            tasep_sigma1=2.0 ** (-1.0 / 3.0),
            tasep_sigma2=(a ** (1.0 / 3.0) * poly ** (1.0 / 3.0)
                          / (2.0 * (2.0 - a))))
    # F2F2
    if alpha != 1.0:
        raise ParameterError("F2F2 is the homogeneous case alpha = 1")
    if beta_param <= 0.0:
        raise ParameterError("F2F2 needs beta_param > 0")
    b = beta_param
    root = math.sqrt(1.0 + b)
    mu = (1.0 + root) ** 2
    sig = (1.0 + root) ** (4.0 / 3.0) / (1.0 + b) ** (1.0 / 6.0)
    mu_prime = 1.0 + 1.0 / root
    beta_sp = (root - 1.0) ** 2 / b
    return ShockLaw(
        scenario=scenario, alpha=1.0, beta_param=b, mu=mu, eta0=1.0,
        g1=FactorLaw("F2", sig, 1.0 + 1.0 / root, mu_prime=mu_prime),
        g2=FactorLaw("F2", sig, 1.0 + root, mu_prime=mu_prime),
        nu=(1.0 - beta_sp) ** 2 / 4.0, v=0.0, beta_spatial=beta_sp,
        rho1=(1.0 - beta_sp) / 2.0, rho2=(1.0 + beta_sp) / 2.0,
        tasep_sigma1=((1.0 + beta_sp) ** (2.0 / 3.0)
                      / (2.0 ** (1.0 / 3.0) * (1.0 - beta_sp) ** (1.0 / 3.0))),
        tasep_sigma2=((1.0 - beta_sp) ** (2.0 / 3.0)
                      / (2.0 ** (1.0 / 3.0) * (1.0 + beta_sp) ** (1.0 / 3.0))))


def f2f2_law_from_spatial(beta_spatial: float) -> ShockLaw:
    """F2F2 law parameterized by the fixed-time-frame beta in (0,1)."""
    if not (0.0 < beta_spatial < 1.0):
        raise ParameterError("spatial beta must lie in (0,1)")
    return law_constants(
        "F2F2", 1.0, 4.0 * beta_spatial / (1.0 - beta_spatial) ** 2)


def predicted_product_cdf(law: ShockLaw, s, u: float = 0.0, b: float = 0.0,
                          xi: float = 0.0, query: str = "lpp",
                          tabulated: bool = True):
    """Product limit law in either variable set ('lpp' with u, b; 'tasep'
    with xi)."""
    if query == "lpp":
        return law.product_cdf_lpp(s, u=u, b=b, tabulated=tabulated)
    if query == "tasep":
        return law.product_cdf_tasep(s, xi=xi, tabulated=tabulated)
    raise ParameterError(f"unknown query form {query!r}")


def rescale_lpp(law: ShockLaw, t: float, u: float, L_raw):
    """s = (L - mu t)/t^(1/3); u only shifts the predicted law, not s."""
    if t <= 0:
        raise ParameterError("t must be positive")
    import numpy as np
    return (np.asarray(L_raw) - law.mu * t) / t ** (1.0 / 3.0)


def rescale_particle(law: ShockLaw, t: float, xi: float, x_raw):
    """s = (v t - x)/t^(1/3) for x = x_{nu t + xi t^(1/3)}(t)."""
    if t <= 0:
        raise ParameterError("t must be positive")
    import numpy as np
    return (law.v * t - np.asarray(x_raw)) / t ** (1.0 / 3.0)


def spatial_transform(beta: float, nu: float, xi: float, v: float, s: float,
                      beta_mu_prime: float = 0.0):
    """(eta0, u, s~) of the fixed-time -> passage-time change of variables.

    beta_mu_prime carries beta * mu'(beta/nu) for the factor at hand (0 for
    boundary-insensitive sides)."""
    if nu <= 0:
        raise ParameterError("nu must be positive")
    eta0 = 1.0 + v / nu
    u = -(s + xi * v / nu) * nu ** (-1.0 / 3.0)
    s_tilde = xi * (beta_mu_prime - 1.0) * nu ** (-4.0 / 3.0)
    return eta0, u, s_tilde


def tasep_constants_from_lpp(law: ShockLaw):
    """Regenerate (eta0, rho_i, tasep_sigma_i) from the passage-time-side
    constants through the spatial transform; exact rational/radical
    arithmetic, so agreement to 1e-12 is demanded by the tests."""
    if abs(law.mu - 1.0 / law.nu) > 1e-9:
        raise ScenarioMismatchError(
            f"shock-locating condition mu = 1/nu violated: "
            f"mu={law.mu}, 1/nu={1.0 / law.nu}")
    nu = law.nu
    eta0 = 1.0 + law.v / nu
    out = {"eta0": eta0}
    for idx, g in ((1, law.g1), (2, law.g2)):
        sigma_t = g.sigma * nu ** (1.0 / 3.0) / g.shift
        denom = 1.0 - law.beta_spatial * g.mu_prime - g.shift * law.v
        rho = g.sigma / (sigma_t * nu ** (-4.0 / 3.0) * denom)
        out[f"rho{idx}"] = rho
        out[f"tasep_sigma{idx}"] = sigma_t
    return out


def one_sided_point_law(eta: float):
    """Point-to-point leading order and scale: (mu, sigma) with
    lim P(L <= mu l + s sigma l^(1/3)) = F2(s)."""
    if eta <= 0:
        raise ParameterError("eta must be positive")
    return ((1.0 + math.sqrt(eta)) ** 2,
            eta ** (-1.0 / 6.0) * (1.0 + math.sqrt(eta)) ** (4.0 / 3.0))


def one_sided_plus_law(eta: float):
    """Upper half-line to point: (mu, sigma) with limit F1(2s/sigma) for
    the rescaled passage time."""
    if not (0.0 < eta < 1.0):
        raise ParameterError("eta must lie in (0,1)")
    return 2.0 * (1.0 + eta), 2.0 ** (4.0 / 3.0) * (1.0 + eta) ** (1.0 / 3.0)


def one_sided_minus_law(eta: float, alpha: float):
    """Lower half-line to point in the two-speed field: (mu, sigma) with
    limit F1(2s/sigma)."""
    if not (0.0 < alpha < 1.0):
        raise ParameterError("alpha must lie in (0,1)")
    if eta <= alpha ** 2 / (2.0 - alpha) ** 2:
        raise ParameterError("eta must exceed alpha^2/(2-alpha)^2")
    mu = 2.0 * (eta / alpha + 1.0 / (2.0 - alpha))
    sig = (2.0 ** (4.0 / 3.0) / alpha
           * (eta + alpha ** 3 / (2.0 - alpha) ** 3) ** (1.0 / 3.0))
    return mu, sig


def mu_one_sided_at(law: ShockLaw, eta: float) -> tuple[float, float]:
    """Leading orders of the two one-sided problems at direction eta; they
    coincide with law.mu exactly at eta0 (that is what defines the shock)."""
    if law.scenario == "F1F1":
        return 2.0 * (1.0 + eta), one_sided_minus_law(eta, law.alpha)[0]
    if law.scenario == "F2F1":
        beta0 = law.beta_param
        return ((1.0 + math.sqrt(eta + beta0)) ** 2,
                one_sided_minus_law(eta, law.alpha)[0])
    b = law.beta_param
    return ((1.0 + math.sqrt(eta + b)) ** 2,
            (math.sqrt(eta) + math.sqrt(1.0 + b)) ** 2)
