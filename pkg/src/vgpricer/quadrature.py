"""Gauss-Laguerre approximation of the density and the European price.

The Gamma time change turns the transition density into a Gamma mixture of
Gaussians; applying a Gauss-Laguerre rule to the mixing integral replaces it
by a finite convex combination

    f(x, t) ~ sum_i phi(x; theta nu u_i, sigma sqrt(nu u_i)) p(u_i, t/nu)

with mixture weights p(u_i, s) = w_i u_i^{s-1} / sum_j w_j u_j^{s-1}.  The
European call then becomes the same convex combination of Black-Scholes-like
terms, with an approximated martingale adjustment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model, specfun
from .errors import GammaOverflowError, InvalidParameters
from .model import MarketInputs, VgParams
from .series import PriceResult
from .specfun import QuadratureRule, laguerre_rule, normal_cdf

__all__ = ["GlWeights", "gl_weights", "gl_density", "gl_omega", "gl_european"]


@dataclass(frozen=True)
class GlWeights:
    """A Laguerre rule specialised to one Gamma shape: mixture probabilities p_i."""

    rule: QuadratureRule
    shape: float
    p_weights: np.ndarray


def gl_weights(n: int, shape: float) -> GlWeights:
    """Mixture probabilities p(u_i, shape) for the order-n rule.

    u_i^{shape-1} is taken on log scale so large orders do not overflow.
    """
    if not shape > 0.0:
        raise InvalidParameters(f"shape must be positive, got {shape!r}")
    rule = laguerre_rule(n)
    log_p = np.log(rule.weights) + (shape - 1.0) * np.log(rule.nodes)
    log_p -= log_p.max()
    p = np.exp(log_p)
    p /= p.sum()
    return GlWeights(rule=rule, shape=shape, p_weights=p)


def gl_density(params: VgParams, x: float, t: float, n: int) -> float:
    """Gaussian-mixture approximation of the transition density.

    Converges to model.density as the rule order grows; with n = 1 it is the
    single Gaussian phi(x; theta nu, sigma sqrt(nu)).
    """
    if not t > 0.0:
        raise InvalidParameters(f"gl_density requires t > 0, got {t!r}")
    gl = gl_weights(n, t / params.nu)
    u = gl.rule.nodes
    mean = params.theta * params.nu * u
    std = params.sigma * np.sqrt(params.nu * u)
    gaussians = np.exp(-0.5 * ((x - mean) / std) ** 2) / (std * math.sqrt(2.0 * math.pi))
    return float(np.sum(gaussians * gl.p_weights))


def gl_omega(params: VgParams, t: float, n: int) -> float:
    """Approximated martingale adjustment.

    omega_bar = -(1/t) ln sum_i p(u_i, t/nu) e^{theta nu u_i + sigma^2 nu u_i / 2}.
    """
    if not t > 0.0:
        raise InvalidParameters(f"gl_omega requires t > 0, got {t!r}")
    gl = gl_weights(n, t / params.nu)
    u = gl.rule.nodes
    exponents = params.theta * params.nu * u + 0.5 * params.sigma**2 * params.nu * u
    if exponents.max() > 700.0:
        raise GammaOverflowError(
            "martingale-adjustment exponent overflows; reduce the rule order"
        )
    return -math.log(float(np.sum(gl.p_weights * np.exp(exponents)))) / t


def gl_european(params: VgParams, market: MarketInputs, n: int) -> PriceResult:
    """European call as a convex combination of Black-Scholes prices.

    d1(u_i) = (ln(S/K) + (r + omega_bar) tau + (sigma^2 + theta) nu u_i) / (sigma sqrt(nu u_i)),
    d2 = d1 - sigma sqrt(nu u_i).  The mixing shape tau/nu below 1 puts
    Laguerre nodes against an integrable singularity of the clock density;
    the value is still returned but flagged in the diagnostics.
    """
    derived = model.derive(params, market)
    tau = market.tau
    shape = tau / params.nu
    gl = gl_weights(n, shape)
    u = gl.rule.nodes
    omega_bar = gl_omega(params, tau, n)
    vol = params.sigma * np.sqrt(params.nu * u)
    d1 = (
        math.log(market.spot / market.strike)
        + (derived.rate_effective + omega_bar) * tau
        + (params.sigma**2 + params.theta) * params.nu * u
    ) / vol
    d2 = d1 - vol
    growth = np.exp(
        params.theta * params.nu * u + omega_bar * tau + 0.5 * params.sigma**2 * params.nu * u
    )
    value = market.spot * float(np.sum(growth * normal_cdf(d1) * gl.p_weights)) - (
        market.strike
        * math.exp(-derived.rate_effective * tau)
        * float(np.sum(normal_cdf(d2) * gl.p_weights))
    )
    diagnostics = {"omega_bar": omega_bar, "order": n}
    if shape < 1.0:
        diagnostics["warning"] = (
            "tau/nu < 1: the Gamma clock density is singular at zero and the "
            "plain Laguerre rule converges slowly"
        )
    branch = "atm" if abs(derived.rn_moneyness) < 1e-12 else (
        "otm" if derived.rn_moneyness < 0.0 else "itm"
    )
    return PriceResult(
        value=value,
        method="quadrature",
        terms_evaluated=n,
        branch=branch,
        diagnostics=diagnostics,
    )
