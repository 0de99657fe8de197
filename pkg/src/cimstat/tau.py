"""Pseudo-observations, concordance counts and the Kendall tau family.

Four estimators share one set of pair counts:

* ``tau_hat``     -- (C - D) / C(n, 2), for tie-free data
* ``tau_b_hat``   -- (C - D) / sqrt((C(n,2) - u)(C(n,2) - v))
* ``tau_n_hat``   -- the same tie-scaled form, written with the per-dimension
  tie sums u, v of discrete margins
* ``tau_kl_hat``  -- tie-scaled for discrete/continuous pairs, and for hybrid
  pairs (C - D) / (C(n,2) - t) with t = max(u, v) - K

``u`` and ``v`` are the numbers of pairs tied in x and in y.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from . import _kernels
from ._kernels import OOCTZT, closeness_to_zero_ties
from .exceptions import InvalidInputError, TieWarning

__all__ = [
    "DimensionKind",
    "SamplePairs",
    "PseudoObservations",
    "ConcordanceCounts",
    "TauResult",
    "as_samples",
    "pseudo_observations",
    "count_concordance",
    "classify_dimension",
    "tau_hat",
    "tau_b_hat",
    "tau_n_hat",
    "tau_kl_hat",
    "null_sd",
    "OOCTZT",
    "closeness_to_zero_ties",
]


class DimensionKind(str, enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class SamplePairs:
    """Paired observations ``(xs[i], ys[i])``; validated on construction."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or ys.ndim != 1:
            raise InvalidInputError("xs and ys must be one-dimensional")
        if xs.shape != ys.shape:
            raise InvalidInputError(
                f"length mismatch: {xs.shape[0]} xs vs {ys.shape[0]} ys")
        if xs.shape[0] < 2:
            raise InvalidInputError("need at least 2 samples")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise InvalidInputError("samples must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return self.xs.shape[0]

    def swapped(self) -> "SamplePairs":
        return SamplePairs(self.ys, self.xs)


def as_samples(xs, ys=None) -> SamplePairs:
    """Coerce ``(xs, ys)`` or an existing :class:`SamplePairs` to SamplePairs."""
    if isinstance(xs, SamplePairs):
        return xs
    return SamplePairs(xs, ys)


@dataclass(frozen=True)
class PseudoObservations:
    """Max-rank pseudo-observations; ``us = u_ranks / n``."""

    u_ranks: np.ndarray
    v_ranks: np.ndarray

    @property
    def n(self) -> int:
        return self.u_ranks.shape[0]

    @property
    def us(self) -> np.ndarray:
        return self.u_ranks / self.n

    @property
    def vs(self) -> np.ndarray:
        return self.v_ranks / self.n


@dataclass(frozen=True)
class ConcordanceCounts:
    concordant: int
    discordant: int
    ties_x_pairs: int
    ties_y_pairs: int
    ties_xy_pairs: int
    distinct_x: int
    distinct_y: int
    n_pairs: int

    @property
    def numerator(self) -> int:
        return self.concordant - self.discordant


@dataclass(frozen=True)
class TauResult:
    value: float
    counts: ConcordanceCounts
    estimator: str
    hybrid_correction_k: int = 0
    degenerate: bool = False

    def __float__(self):
        return float(self.value)


def _max_ranks(values):
    return rankdata(values, method="max").astype(np.int64)


def pseudo_observations(xs, ys=None) -> PseudoObservations:
    """Rank-transform both margins onto (0, 1].

    Ties share the largest rank of their group, so ``us == u_ranks / n``
    keeps duplicated raw values identical and the maximum is exactly 1.

    >>> pseudo_observations([3, 1, 2], [30, 10, 20]).us.tolist()
    [1.0, 0.3333333333333333, 0.6666666666666666]
    """
    s = as_samples(xs, ys)
    return PseudoObservations(_max_ranks(s.xs), _max_ranks(s.ys))


def count_concordance(xs, ys=None) -> ConcordanceCounts:
    """Classify all C(n, 2) pairs as concordant, discordant or tied.

    Uses a sort plus merge-sort inversion count, O(n log n).
    """
    s = as_samples(xs, ys)
    c, d, tx, ty, txy, rx, ry = _kernels.count_pairs(s.xs, s.ys)
    n = s.n
    return ConcordanceCounts(int(c), int(d), int(tx), int(ty), int(txy),
                             int(rx), int(ry), n * (n - 1) // 2)


def _tied_pairs(values) -> int:
    _, mult = np.unique(np.asarray(values), return_counts=True)
    mult = mult.astype(np.int64)
    return int(np.sum(mult * (mult - 1) // 2))


def classify_dimension(values, ooctzt: int = OOCTZT) -> DimensionKind:
    """Continuous unless the number of tied pairs exceeds C(n // ooctzt, 2).

    The threshold grows with the sample size so a handful of accidental
    duplicates in a large continuous sample does not flip the kind.
    """
    values = np.asarray(values)
    if values.shape[0] < 2:
        raise InvalidInputError("need at least 2 values to classify")
    if _tied_pairs(values) > closeness_to_zero_ties(values.shape[0], ooctzt):
        return DimensionKind.DISCRETE
    return DimensionKind.CONTINUOUS


def _tie_scaled(counts: ConcordanceCounts):
    a = counts.n_pairs - counts.ties_x_pairs
    b = counts.n_pairs - counts.ties_y_pairs
    if a == 0 or b == 0:
        return 0.0, True
    den = float(a) if a == b else math.sqrt(float(a) * float(b))
    return counts.numerator / den, False


def tau_hat(xs, ys=None, on_ties: str = "warn") -> TauResult:
    """Classic Kendall estimator (C - D) / C(n, 2).

    Parameters
    ----------
    on_ties : {"warn", "raise", "ignore"}
        What to do when either margin has ties; the estimator is biased
        towards zero there and ``tau_n_hat``/``tau_kl_hat`` should be used.
    """
    counts = count_concordance(xs, ys)
    if counts.ties_x_pairs or counts.ties_y_pairs:
        msg = "ties present; use tau_n_hat or tau_kl_hat for tied data"
        if on_ties == "raise":
            raise InvalidInputError(msg)
        if on_ties == "warn":
            warnings.warn(msg, TieWarning, stacklevel=2)
    return TauResult(counts.numerator / counts.n_pairs, counts, "tau")


def tau_b_hat(xs, ys=None) -> TauResult:
    """Tie-scaled tau-b; 0 with ``degenerate=True`` if a margin is constant."""
    counts = count_concordance(xs, ys)
    value, degenerate = _tie_scaled(counts)
    return TauResult(value, counts, "tau_b", degenerate=degenerate)


def tau_n_hat(xs, ys=None) -> TauResult:
    """Tie-corrected estimator for discrete margins.

    Subtracts each margin's tied-pair count u, v from C(n, 2) under the
    square roots; for tie-free data this is exactly :func:`tau_hat`.
    """
    counts = count_concordance(xs, ys)
    value, degenerate = _tie_scaled(counts)
    return TauResult(value, counts, "tau_n", degenerate=degenerate)


def _is_continuous(kind) -> bool:
    return DimensionKind(kind) is DimensionKind.CONTINUOUS


def tau_kl_hat(xs, ys=None, kinds=None, hybrid_overlap: bool = True,
               ooctzt: int = OOCTZT) -> TauResult:
    """Kendall tau usable for continuous, discrete and hybrid pairs.

    Parameters
    ----------
    xs, ys : array_like or SamplePairs
    kinds : pair of DimensionKind, optional
        Margin types; inferred with :func:`classify_dimension` when omitted.
    hybrid_overlap : bool
        Apply the overlap correction K for hybrid pairs. With ``False`` the
        hybrid denominator is C(n, 2) - max(u, v).

    Returns
    -------
    TauResult
        A perfectly comonotone hybrid sample gives exactly 1.0.
    """
    s = as_samples(xs, ys)
    counts = count_concordance(s)
    if kinds is None:
        kinds = (classify_dimension(s.xs, ooctzt), classify_dimension(s.ys, ooctzt))
    cont_x, cont_y = _is_continuous(kinds[0]), _is_continuous(kinds[1])
    tx, ty = counts.ties_x_pairs, counts.ties_y_pairs
    k = 0
    if hybrid_overlap and ((cont_x and ty > 0) or (cont_y and tx > 0)):
        if cont_x and not cont_y:
            k = int(_kernels.overlap_correction(s.xs, s.ys))
        elif cont_y and not cont_x:
            k = int(_kernels.overlap_correction(s.ys, s.xs))
        elif tx > ty:
            k = int(_kernels.overlap_correction(s.ys, s.xs))
        else:
            k = int(_kernels.overlap_correction(s.xs, s.ys))
    value, _, degenerate = _kernels.tau_kl_from_counts(
        counts.numerator, counts.n_pairs, tx, ty, cont_x, cont_y, k)
    return TauResult(value, counts, "tau_kl", hybrid_correction_k=k,
                     degenerate=degenerate)


def null_sd(n) -> float:
    """Std. dev. of Kendall's tau under independence for n tie-free samples."""
    n = np.asarray(n, dtype=float)
    return np.sqrt(2.0 * (2.0 * n + 5.0) / (9.0 * n * (n - 1.0)))
