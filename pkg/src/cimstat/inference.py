"""Null distributions and significance tests for tau_KL and the CIM index.

Under independence tau_KL is asymptotically Gaussian. The null of the index
(a weighted sum of half-normal region taus) is skewed and bounded on [0, 1];
it is approximated by a Beta law fitted by the method of moments.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .cim import ScanConfig, compute_cim
from .exceptions import CalibrationError, InvalidConfigError, InvalidInputError
from .tau import DimensionKind, null_sd, tau_kl_hat

__all__ = [
    "NullModel",
    "calibrate_null",
    "fit_beta_moments",
    "p_value",
    "theoretical_cim_null_sampler",
    "hellinger_distance",
    "tau_to_gaussian_rho",
    "NULL_MODEL_VERSION",
    "DISCRETE_NULL_LEVELS",
]

NULL_MODEL_VERSION = 1
DISCRETE_NULL_LEVELS = 4
MIN_N = 10
MIN_REPLICATES = 100

_STATISTICS = ("tau_kl", "cim")


@dataclass(frozen=True)
class NullModel:
    """Calibrated null of one statistic at one sample size.

    ``fit`` is ``{"family": "gaussian", "mean": m, "sd": s}`` for tau_KL and
    ``{"family": "beta", "a": a, "b": b}`` for the index.
    """

    statistic: str
    n: int
    b_replicates: int
    samples: np.ndarray
    fit: dict
    kinds: tuple = (DimensionKind.CONTINUOUS, DimensionKind.CONTINUOUS)
    seed: int | None = None
    config_hash: str | None = None

    def quantile(self, q: float) -> float:
        if self.fit["family"] == "beta":
            return float(stats.beta.ppf(q, self.fit["a"], self.fit["b"]))
        return float(stats.norm.ppf(q, self.fit["mean"], self.fit["sd"]))

    def to_dict(self) -> dict:
        return {
            "version": NULL_MODEL_VERSION,
            "statistic": self.statistic,
            "n": self.n,
            "b_replicates": self.b_replicates,
            "kinds": [DimensionKind(k).value for k in self.kinds],
            "seed": self.seed,
            "config_hash": self.config_hash,
            "fit": dict(self.fit),
            "samples": [float(s) for s in self.samples],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "NullModel":
        if d.get("version") != NULL_MODEL_VERSION:
            raise InvalidConfigError(f"unsupported null model version {d.get('version')}")
        return cls(d["statistic"], int(d["n"]), int(d["b_replicates"]),
                   np.asarray(d["samples"], dtype=float), dict(d["fit"]),
                   tuple(DimensionKind(k) for k in d["kinds"]), d.get("seed"),
                   d.get("config_hash"))

    @classmethod
    def from_json(cls, text: str) -> "NullModel":
        return cls.from_dict(json.loads(text))


def fit_beta_moments(samples) -> tuple:
    """Method-of-moments Beta parameters (a, b); sample variance uses ddof=1."""
    x = np.asarray(samples, dtype=float)
    m = float(np.mean(x))
    v = float(np.var(x, ddof=1))
    if np.ptp(x) == 0.0 or not (0.0 < m < 1.0) or v <= 0.0 or v >= m * (1.0 - m):
        raise CalibrationError(f"cannot fit a Beta law to mean={m}, var={v}")
    c = m * (1.0 - m) / v - 1.0
    return m * c, (1.0 - m) * c


def _draw_margin(rng, n, kind):
    if DimensionKind(kind) is DimensionKind.DISCRETE:
        return rng.integers(0, DISCRETE_NULL_LEVELS, n).astype(float)
    return rng.random(n)


def _replicate(args):
    statistic, n, kinds, seed_seq, cfg = args
    rng = np.random.default_rng(seed_seq)
    x = _draw_margin(rng, n, kinds[0])
    y = _draw_margin(rng, n, kinds[1])
    if statistic == "tau_kl":
        return tau_kl_hat(x, y, kinds=kinds, hybrid_overlap=cfg.hybrid_overlap,
                          ooctzt=cfg.ooctzt).value
    return compute_cim(x, y, cfg).value


def calibrate_null(statistic: str, n: int, b: int = 500, kinds=None, seed: int = 0,
                   config: ScanConfig | None = None, jobs: int = 1) -> NullModel:
    """Simulate ``b`` independent datasets of size ``n`` and fit the null law.

    Parameters
    ----------
    statistic : {"tau_kl", "cim"}
    kinds : pair of DimensionKind, optional
        Continuous margins are U(0, 1); discrete margins take 4 equiprobable
        levels. Defaults to two continuous margins.
    seed : int
        Replicate ``i`` draws from the ``i``-th child of ``SeedSequence(seed)``,
        so results do not depend on ``jobs``.
    jobs : int
        Worker processes; ``1`` runs in-process.
    """
    if statistic not in _STATISTICS:
        raise InvalidConfigError(f"unknown statistic {statistic!r}")
    if n < MIN_N:
        raise InvalidConfigError(f"n must be at least {MIN_N}, got {n}")
    if b < MIN_REPLICATES:
        raise InvalidConfigError(f"need at least {MIN_REPLICATES} replicates, got {b}")
    if seed is None:
        raise InvalidConfigError("a seed is required for calibration")
    kinds = tuple(DimensionKind(k) for k in (kinds or ("continuous", "continuous")))
    cfg = config or ScanConfig()
    children = np.random.SeedSequence(seed).spawn(b)
    tasks = [(statistic, n, kinds, c, cfg) for c in children]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            values = list(ex.map(_replicate, tasks, chunksize=max(1, b // (4 * jobs))))
    else:
        values = [_replicate(t) for t in tasks]
    samples = np.asarray(values, dtype=float)

    if statistic == "tau_kl":
        sd = float(np.std(samples, ddof=1))
        if sd <= 0.0:
            raise CalibrationError("null samples have zero variance")
        fit = {"family": "gaussian", "mean": float(np.mean(samples)), "sd": sd}
        chash = None
    else:
        a, bb = fit_beta_moments(samples)
        fit = {"family": "beta", "a": a, "b": bb}
        chash = cfg.config_hash()
    return NullModel(statistic, n, b, samples, fit, kinds, seed, chash)


def p_value(model: NullModel, observed: float, config: ScanConfig | None = None) -> float:
    """Right-tail probability of ``observed`` under the fitted null.

    One-sided for the index; two-sided on ``|observed - mean|`` for tau_KL.
    Passing ``config`` checks it against the configuration the null was
    calibrated with.
    """
    observed = float(observed)
    if model.statistic == "cim":
        if config is not None and model.config_hash not in (None, config.config_hash()):
            raise InvalidConfigError("null model was calibrated with a different scan config")
        if not (0.0 <= observed <= 1.0):
            raise InvalidInputError(f"index value {observed} outside [0, 1]")
        return float(stats.beta.sf(observed, model.fit["a"], model.fit["b"]))
    if not (-1.0 <= observed <= 1.0):
        raise InvalidInputError(f"tau value {observed} outside [-1, 1]")
    z = abs(observed - model.fit["mean"]) / model.fit["sd"]
    return float(min(1.0, 2.0 * stats.norm.sf(z)))


def theoretical_cim_null_sampler(region_weights, region_ns, draws: int, seed=0) -> np.ndarray:
    """Draw from sum_i w_i |N(0, sigma_i)|, sigma_i the tau null sd at n_i samples."""
    w = np.asarray(region_weights, dtype=float)
    ns = np.asarray(region_ns, dtype=float)
    if w.shape != ns.shape or w.ndim != 1 or w.size == 0:
        raise InvalidInputError("weights and sample counts must be equal-length 1-D")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise InvalidInputError("region weights must be nonnegative and sum to 1")
    if np.any(ns < 2):
        raise InvalidInputError("every region needs at least 2 samples")
    rng = np.random.default_rng(seed)
    z = np.abs(rng.standard_normal((int(draws), w.size))) * null_sd(ns)
    return z @ w


def hellinger_distance(p_samples, beta_fit, bins: int = 50) -> float:
    """Hellinger distance between binned samples and a Beta law on [0, 1].

    Both are reduced to probabilities on ``bins`` equal-width bins, the
    Beta mass per bin coming from its CDF.
    """
    x = np.asarray(p_samples, dtype=float)
    if x.size == 0:
        raise InvalidInputError("no samples")
    if bins < 10:
        raise InvalidConfigError("need at least 10 bins")
    a, b = beta_fit
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts, _ = np.histogram(np.clip(x, 0.0, 1.0), bins=edges)
    p = counts / x.size
    q = np.diff(stats.beta.cdf(edges, a, b))
    bc = float(np.sum(np.sqrt(p * q)))
    return math.sqrt(max(0.0, 1.0 - bc))


def tau_to_gaussian_rho(tau: float) -> float:
    """Gaussian-copula correlation implied by Kendall's tau, sin(pi tau / 2)."""
    tau = float(tau)
    if not (-1.0 <= tau <= 1.0):
        raise InvalidInputError(f"tau {tau} outside [-1, 1]")
    return math.sin(math.pi * tau / 2.0)
