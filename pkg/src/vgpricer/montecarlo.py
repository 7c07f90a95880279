"""Monte Carlo engine: Gamma-clock sampling and payoff estimators.

Increments are simulated through the time-change construction: draw the
Gamma clock G ~ Gamma(shape = t/nu, scale = nu), then X = theta G +
sigma sqrt(G) Z with Z standard normal.

The generator is a counter-based Philox stream keyed by the seed; draws are
consumed in fixed-size chunks (clock block, then normal block), so a given
(seed, n_paths) request is bit-reproducible.  Gamma variates use the
Marsaglia-Tsang squeeze for shape >= 1 and the Gamma(shape + 1) boost
U^{1/shape} for shape < 1 (short maturities routinely put t/nu below one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model
from .errors import InvalidParameters
from .model import MarketInputs, VgParams

__all__ = ["McConfig", "McEstimate", "sample_vg", "mc_price", "PAYOFF_NAMES"]

_CHUNK = 1 << 20
_Z95 = 1.96

PAYOFF_NAMES = (
    "european",
    "cash_or_nothing",
    "asset_or_nothing",
    "gap",
    "power_asset_or_nothing",
    "log_call",
)


@dataclass(frozen=True)
class McConfig:
    n_paths: int
    seed: int = 0
    antithetic: bool = False

    def __post_init__(self):
        if not self.n_paths >= 1:
            raise InvalidParameters(f"n_paths must be >= 1, got {self.n_paths!r}")
        if self.antithetic and self.n_paths % 2 != 0:
            raise InvalidParameters("antithetic sampling needs an even n_paths")


@dataclass(frozen=True)
class McEstimate:
    """Point estimate with its 95% confidence interval.

    confidence_ratio is the interval length divided by |value|.
    """

    value: float
    std_error: float
    ci_low: float
    ci_high: float
    confidence_ratio: float

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "McEstimate":
        value = float(samples.mean())
        if samples.size > 1:
            std_error = float(samples.std(ddof=1) / math.sqrt(samples.size))
        else:
            std_error = 0.0
        ci_low = value - _Z95 * std_error
        ci_high = value + _Z95 * std_error
        ratio = (ci_high - ci_low) / abs(value) if value != 0.0 else 0.0
        return cls(value, std_error, ci_low, ci_high, ratio)


def _gamma_marsaglia_tsang(rng: np.random.Generator, shape: float, size: int) -> np.ndarray:
    """Standard Gamma(shape) variates, vectorised rejection."""
    boost = None
    a = shape
    if shape < 1.0:
        boost = rng.random(size) ** (1.0 / shape)
        a = shape + 1.0
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    pending = np.arange(size)
    while pending.size:
        x = rng.standard_normal(pending.size)
        v = (1.0 + c * x) ** 3
        u = rng.random(pending.size)
        positive = v > 0.0
        x2 = x * x
        squeeze = positive & (u < 1.0 - 0.0331 * x2 * x2)
        with np.errstate(divide="ignore", invalid="ignore"):
            full = positive & ~squeeze & (
                np.log(u) < 0.5 * x2 + d * (1.0 - v + np.log(np.where(positive, v, 1.0)))
            )
        accepted = squeeze | full
        out[pending[accepted]] = d * v[accepted]
        pending = pending[~accepted]
    if boost is not None:
        out *= boost
    return out


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def sample_vg(params: VgParams, t: float, n: int, seed: int) -> np.ndarray:
    """n independent increments X(t), deterministic given the seed."""
    if not t > 0.0:
        raise InvalidParameters(f"sample_vg requires t > 0, got {t!r}")
    if not n >= 1:
        raise InvalidParameters(f"sample_vg requires n >= 1, got {n!r}")
    rng = _rng(seed)
    shape = t / params.nu
    out = np.empty(n)
    for start in range(0, n, _CHUNK):
        m = min(_CHUNK, n - start)
        clock = _gamma_marsaglia_tsang(rng, shape, m) * params.nu
        z = rng.standard_normal(m)
        out[start : start + m] = params.theta * clock + params.sigma * np.sqrt(clock) * z
    return out


def _terminal_payoff(payoff: str, s_t: np.ndarray, market: MarketInputs) -> np.ndarray:
    k = market.strike
    if payoff == "european":
        return np.maximum(s_t - k, 0.0)
    if payoff == "cash_or_nothing":
        return (s_t > k).astype(float)
    if payoff == "asset_or_nothing":
        return np.where(s_t > k, s_t, 0.0)
    if payoff == "gap":
        if market.trigger_strike is None:
            raise InvalidParameters("gap payoff requires trigger_strike")
        return np.where(s_t > market.trigger_strike, s_t - k, 0.0)
    if payoff == "power_asset_or_nothing":
        powered = s_t**market.power
        return np.where(powered > k, powered, 0.0)
    if payoff == "log_call":
        return np.maximum(np.log(s_t / k), 0.0)
    raise InvalidParameters(f"unknown payoff {payoff!r}; expected one of {PAYOFF_NAMES}")


def mc_price(
    payoff: str, params: VgParams, market: MarketInputs, cfg: McConfig
) -> McEstimate:
    """Discounted-payoff mean over S_T = S exp((r + omega) tau + X(tau)).

    With antithetic sampling the Gamma clock is shared between the paired
    paths and the normal draw is mirrored; the standard error is computed on
    the pair averages, which are the independent units.
    """
    derived = model.derive(params, market)
    tau = market.tau
    discount = math.exp(-derived.rate_effective * tau)
    drift = (derived.rate_effective + derived.omega) * tau
    rng = _rng(cfg.seed)
    shape = tau / params.nu

    n_units = cfg.n_paths // 2 if cfg.antithetic else cfg.n_paths
    samples = np.empty(n_units)
    for start in range(0, n_units, _CHUNK):
        m = min(_CHUNK, n_units - start)
        clock = _gamma_marsaglia_tsang(rng, shape, m) * params.nu
        z = rng.standard_normal(m)
        diffusion = params.sigma * np.sqrt(clock) * z
        x_up = params.theta * clock + diffusion
        s_t = market.spot * np.exp(drift + x_up)
        block = discount * _terminal_payoff(payoff, s_t, market)
        if cfg.antithetic:
            s_t_dn = market.spot * np.exp(drift + params.theta * clock - diffusion)
            block = 0.5 * (block + discount * _terminal_payoff(payoff, s_t_dn, market))
        samples[start : start + m] = block
    return McEstimate.from_samples(samples)
