"""Synthetic dependence generators.

Functional patterns with additive Gaussian noise, the shifted parabola
family, copula-coupled pairs with continuous or discrete margins, and
Gaussian Markov chains. Every generator is a deterministic function of its
arguments and seed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, stats

from .data import Dataset
from .exceptions import InvalidConfigError
from .tau import SamplePairs

__all__ = [
    "Pattern",
    "PatternSpec",
    "pattern_function",
    "noise_sd_from_index",
    "gen_pattern",
    "gen_parabola",
    "CopulaFamily",
    "Margin",
    "CopulaSpec",
    "tau_to_param",
    "sample_copula_uv",
    "sample_copula",
    "gen_markov_chain",
]


class Pattern(str, enum.Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    CUBIC = "cubic"
    FOURTH_ROOT = "fourth_root"
    SINUSOIDAL_LF = "sinusoidal_lf"
    SINUSOIDAL_HF = "sinusoidal_hf"
    CIRCULAR = "circular"
    STEP = "step"
    INDEPENDENT = "independent"


def _cubic(x):
    d = x - 1.0 / 3.0
    return 128.0 * d ** 3 - 48.0 * d ** 2 - 12.0 * d


_FUNCTIONS = {
    Pattern.LINEAR: lambda x: x,
    Pattern.QUADRATIC: lambda x: 4.0 * (x - 0.5) ** 2,
    Pattern.CUBIC: _cubic,
    Pattern.FOURTH_ROOT: lambda x: x ** 0.25,
    Pattern.SINUSOIDAL_LF: lambda x: np.sin(2.0 * np.pi * x),
    Pattern.SINUSOIDAL_HF: lambda x: np.sin(8.0 * np.pi * x),
    Pattern.STEP: lambda x: (x > 0.5).astype(float),
}

# Range of the noise-free signal; a noise index of 1 means sd equal to it.
_SIGNAL_RANGE = {
    Pattern.LINEAR: 1.0,
    Pattern.QUADRATIC: 1.0,
    Pattern.CUBIC: None,
    Pattern.FOURTH_ROOT: 1.0,
    Pattern.SINUSOIDAL_LF: 2.0,
    Pattern.SINUSOIDAL_HF: 2.0,
    Pattern.CIRCULAR: 2.0,
    Pattern.STEP: 1.0,
    Pattern.INDEPENDENT: 1.0,
}


def _coerce_pattern(pattern) -> Pattern:
    try:
        return Pattern(pattern)
    except ValueError:
        raise InvalidConfigError(f"unknown pattern {pattern!r}") from None


def pattern_function(pattern):
    """Noise-free f for ``Y = f(X)``; not defined for circular/independent."""
    p = _coerce_pattern(pattern)
    if p not in _FUNCTIONS:
        raise InvalidConfigError(f"pattern {p.value!r} is not a function of x")
    return _FUNCTIONS[p]


def _signal_range(p: Pattern) -> float:
    r = _SIGNAL_RANGE[p]
    if r is None:
        grid = np.linspace(0.0, 1.0, 100001)
        y = _FUNCTIONS[p](grid)
        r = float(y.max() - y.min())
    return r


def noise_sd_from_index(pattern, index: float) -> float:
    """Noise sd for a dimensionless noise index: ``index * range(f)``."""
    if not (index >= 0 and math.isfinite(index)):
        raise InvalidConfigError(f"noise index must be finite and >= 0, got {index}")
    return float(index) * _signal_range(_coerce_pattern(pattern))


@dataclass(frozen=True)
class PatternSpec:
    pattern: Pattern
    n: int
    noise_sd: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pattern", _coerce_pattern(self.pattern))
        if int(self.n) < 2:
            raise InvalidConfigError("n must be at least 2")
        if not (math.isfinite(self.noise_sd) and self.noise_sd >= 0):
            raise InvalidConfigError("noise_sd must be finite and >= 0")


def gen_pattern(spec: PatternSpec, *args, **kwargs) -> SamplePairs:
    """Draw ``n`` samples of a noisy association pattern.

    X ~ U(0, 1), or U(-1, 1) for the circle, whose y takes a random sign.
    Accepts a :class:`PatternSpec` or its fields positionally.

    >>> s = gen_pattern("linear", 5, 0.0, 1)
    >>> bool((s.xs == s.ys).all())
    True
    """
    if not isinstance(spec, PatternSpec):
        spec = PatternSpec(spec, *args, **kwargs)
    rng = np.random.default_rng(spec.seed)
    n = int(spec.n)
    p = spec.pattern
    if p is Pattern.CIRCULAR:
        x = rng.uniform(-1.0, 1.0, n)
        sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        y = sign * np.sqrt(1.0 - x * x)
    elif p is Pattern.INDEPENDENT:
        x = rng.random(n)
        y = rng.random(n)
    else:
        x = rng.random(n)
        y = _FUNCTIONS[p](x)
    if spec.noise_sd > 0:
        y = y + rng.normal(0.0, spec.noise_sd, n)
    return SamplePairs(x, y)


def gen_parabola(r: float, noise_sd: float, n: int, seed: int = 0) -> SamplePairs:
    """``Y = 4 (X - r)^2 + N(0, noise_sd^2)``, X ~ U(0, 1)."""
    if not (0.0 < r < 1.0):
        raise InvalidConfigError(f"vertex r must lie in (0, 1), got {r}")
    if not (noise_sd >= 0 and math.isfinite(noise_sd)):
        raise InvalidConfigError("noise_sd must be finite and >= 0")
    rng = np.random.default_rng(seed)
    x = rng.random(int(n))
    y = 4.0 * (x - r) ** 2
    if noise_sd > 0:
        y = y + rng.normal(0.0, noise_sd, int(n))
    return SamplePairs(x, y)


class CopulaFamily(str, enum.Enum):
    GAUSSIAN = "gaussian"
    FRANK = "frank"
    GUMBEL = "gumbel"
    CLAYTON = "clayton"


@dataclass(frozen=True)
class Margin:
    """Continuous standard normal margin, or ``levels`` equiprobable integers."""

    kind: str = "continuous"
    levels: int = 0

    def __post_init__(self):
        if self.kind not in ("continuous", "discrete"):
            raise InvalidConfigError(f"unknown margin kind {self.kind!r}")
        if self.kind == "discrete" and self.levels < 2:
            raise InvalidConfigError("a discrete margin needs at least 2 levels")

    @classmethod
    def parse(cls, m) -> "Margin":
        """Accept a Margin, ``"continuous"``, ``"discrete:L"`` or an int L."""
        if isinstance(m, Margin):
            return m
        if isinstance(m, (int, np.integer)):
            return cls("discrete", int(m))
        text = str(m)
        if text == "continuous":
            return cls()
        if text.startswith("discrete"):
            _, _, lv = text.partition(":")
            return cls("discrete", int(lv or 4))
        raise InvalidConfigError(f"cannot parse margin {m!r}")

    def inverse_cdf(self, u):
        if self.kind == "continuous":
            return stats.norm.ppf(u)
        return np.minimum(np.floor(u * self.levels), self.levels - 1)


@dataclass(frozen=True)
class CopulaSpec:
    family: CopulaFamily
    tau: float
    n: int
    margins: tuple = (Margin(), Margin())
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, "family", CopulaFamily(self.family))
        except ValueError:
            raise InvalidConfigError(f"unknown copula family {self.family!r}") from None
        m = self.margins
        if isinstance(m, (str, Margin, int)):
            m = (m, m)
        object.__setattr__(self, "margins", tuple(Margin.parse(x) for x in m))
        if int(self.n) < 2:
            raise InvalidConfigError("n must be at least 2")
        tau_to_param(self.family, self.tau)


def _debye1(theta):
    if theta == 0.0:
        return 1.0
    val, _ = integrate.quad(lambda t: t / math.expm1(t) if t != 0 else 1.0,
                            0.0, abs(theta), epsabs=1e-14, epsrel=1e-13)
    return val / abs(theta)


def _frank_tau(theta):
    if theta == 0.0:
        return 0.0
    t = abs(theta)
    tau = 1.0 - 4.0 / t * (1.0 - _debye1(t))
    return math.copysign(tau, theta)


def tau_to_param(family, tau: float) -> float:
    """Copula parameter with Kendall's tau equal to ``tau``.

    gaussian: sin(pi tau / 2); clayton: 2 tau / (1 - tau); gumbel: 1 / (1 - tau);
    frank: root of tau = 1 - 4/theta (1 - D_1(theta)), D_1 the Debye function.
    """
    family = CopulaFamily(family)
    tau = float(tau)
    if not math.isfinite(tau) or not (-1.0 < tau < 1.0):
        raise InvalidConfigError(f"tau {tau} not attainable (need -1 < tau < 1)")
    if family is CopulaFamily.GAUSSIAN:
        return math.sin(math.pi * tau / 2.0)
    if family in (CopulaFamily.CLAYTON, CopulaFamily.GUMBEL) and tau < 0:
        raise InvalidConfigError(f"{family.value} copula needs tau in [0, 1)")
    if family is CopulaFamily.CLAYTON:
        return 2.0 * tau / (1.0 - tau)
    if family is CopulaFamily.GUMBEL:
        return 1.0 / (1.0 - tau)
    if tau == 0.0:
        return 0.0
    t = abs(tau)
    hi = 1.0
    while _frank_tau(hi) < t:
        hi *= 2.0
    theta = optimize.brentq(lambda th: _frank_tau(th) - t, 1e-12, hi, xtol=1e-13, rtol=1e-14)
    return math.copysign(theta, tau)


def _positive_stable(rng, alpha, size):
    # Kanter's representation; Laplace transform exp(-s^alpha)
    w = rng.uniform(0.0, np.pi, size)
    e = rng.exponential(1.0, size)
    return (np.sin(alpha * w) / np.sin(w) ** (1.0 / alpha)
            * (np.sin((1.0 - alpha) * w) / e) ** ((1.0 - alpha) / alpha))


def sample_copula_uv(family, theta: float, n: int, rng) -> tuple:
    """Draw ``n`` pairs (U, V) on the unit square from a one-parameter copula."""
    family = CopulaFamily(family)
    if family is CopulaFamily.GAUSSIAN:
        z1 = rng.standard_normal(n)
        z2 = theta * z1 + math.sqrt(max(0.0, 1.0 - theta * theta)) * rng.standard_normal(n)
        return stats.norm.cdf(z1), stats.norm.cdf(z2)
    if family is CopulaFamily.CLAYTON:
        if theta == 0.0:
            return rng.random(n), rng.random(n)
        v = rng.gamma(1.0 / theta, 1.0, n)
        e = rng.exponential(1.0, (2, n))
        u = (1.0 + e / v) ** (-1.0 / theta)
        return u[0], u[1]
    if family is CopulaFamily.GUMBEL:
        if theta == 1.0:
            return rng.random(n), rng.random(n)
        alpha = 1.0 / theta
        s = _positive_stable(rng, alpha, n)
        e = rng.exponential(1.0, (2, n))
        u = np.exp(-(e / s) ** alpha)
        return u[0], u[1]
    u = rng.random(n)
    w = rng.random(n)
    if theta == 0.0:
        return u, w
    # invert the conditional distribution C(v | u) = w
    a = math.expm1(-theta)
    v = -np.log1p(w * a / (w + (1.0 - w) * np.exp(-theta * u))) / theta
    return u, np.clip(v, 0.0, 1.0)


def sample_copula(spec: CopulaSpec, *args, **kwargs) -> SamplePairs:
    """Draw a copula sample and push it through the requested margins.

    Discrete margins use the inverse CDF of a uniform distribution on
    ``{0, ..., L-1}``, which is how dependent discrete data is obtained
    from a continuous copula.
    """
    if not isinstance(spec, CopulaSpec):
        spec = CopulaSpec(spec, *args, **kwargs)
    rng = np.random.default_rng(spec.seed)
    theta = tau_to_param(spec.family, spec.tau)
    u, v = sample_copula_uv(spec.family, theta, int(spec.n), rng)
    return SamplePairs(spec.margins[0].inverse_cdf(u), spec.margins[1].inverse_cdf(v))


def gen_markov_chain(n_vars: int, n: int, link_tau: float, seed: int = 0) -> Dataset:
    """Gaussian chain X1 -> X2 -> ... with Kendall's tau ``link_tau`` per link."""
    if n_vars < 3:
        raise InvalidConfigError("a chain needs at least 3 variables")
    if not (0.0 <= link_tau < 1.0):
        raise InvalidConfigError("link_tau must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    rho = math.sin(math.pi * link_tau / 2.0)
    s = math.sqrt(1.0 - rho * rho)
    cols = {}
    x = rng.standard_normal(int(n))
    cols["X1"] = x
    for k in range(2, n_vars + 1):
        x = rho * x + s * rng.standard_normal(int(n))
        cols[f"X{k}"] = x
    return Dataset(cols)
