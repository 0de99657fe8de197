"""Copula index for dependence and monotonicity.

The unit square of pseudo-observations is scanned along one axis in
increments of width ``si``. A running tau_KL is kept for the current
region; when adding an increment drops |tau_KL| by more than

    sigma_C / sqrt(n_R) * z_{1 - alpha/2},    sigma_C = 4 (1 - tau^2),

the increment starts a new region. The index is the sample-weighted sum of
per-region |tau_KL|, maximised over increments, both scan orientations and
equal splits of the other axis.
"""

from __future__ import annotations

import enum
import functools
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from . import _kernels
from ._kernels import OOCTZT
from .exceptions import InvalidConfigError, InvalidInputError
from .streaming import TauStream
from .tau import PseudoObservations, as_samples, pseudo_observations, tau_kl_hat

__all__ = [
    "Orientation",
    "ScanConfig",
    "Region",
    "CimResult",
    "scan_unit_square",
    "compute_cim",
    "region_count",
    "cim",
]


class Orientation(str, enum.Enum):
    U_SCANS_V = "uv"   # slabs along u (the x margin)
    V_SCANS_U = "vu"   # slabs along v (the y margin)


@functools.lru_cache(maxsize=64)
def _z_crit(alpha: float) -> float:
    return float(norm.ppf(1.0 - alpha / 2.0))


def _is_dyadic(si: float) -> bool:
    if not (0.0 < si <= 1.0):
        return False
    k = math.log2(1.0 / si)
    return abs(k - round(k)) < 1e-12 and 2.0 ** -round(k) == si


@dataclass(frozen=True)
class ScanConfig:
    """Hyperparameters of the region scan.

    ``msi`` is the smallest scanning increment; every ``1/2^k`` from 1 down
    to ``msi`` is tried. ``subinterval_splits`` are the numbers of equal
    strips the non-scanned axis is cut into (each strip scanned on its own).
    """

    msi: float = 1.0 / 64
    alpha: float = 0.2
    orientations: tuple = (Orientation.U_SCANS_V, Orientation.V_SCANS_U)
    subinterval_splits: tuple = (1, 2, 4)
    sigma_coef: float = 4.0
    hybrid_overlap: bool = True
    ooctzt: int = OOCTZT

    def __post_init__(self):
        if not _is_dyadic(self.msi):
            raise InvalidConfigError(f"msi must be 1/2^k, got {self.msi}")
        if not (0.0 < self.alpha < 1.0):
            raise InvalidConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        orients = tuple(Orientation(o) for o in self.orientations)
        if not orients:
            raise InvalidConfigError("at least one orientation is required")
        splits = tuple(int(s) for s in self.subinterval_splits)
        if not splits or any(s < 1 for s in splits):
            raise InvalidConfigError("subinterval splits must be positive integers")
        if self.ooctzt < 1:
            raise InvalidConfigError("ooctzt must be positive")
        object.__setattr__(self, "orientations", orients)
        object.__setattr__(self, "subinterval_splits", splits)

    @property
    def increments(self) -> list:
        k = int(round(math.log2(1.0 / self.msi)))
        return [2.0 ** -i for i in range(k + 1)]

    @property
    def z_crit(self) -> float:
        return _z_crit(self.alpha)

    def to_dict(self) -> dict:
        return {
            "msi": self.msi,
            "alpha": self.alpha,
            "orientations": [o.value for o in self.orientations],
            "subinterval_splits": list(self.subinterval_splits),
            "sigma_coef": self.sigma_coef,
            "hybrid_overlap": self.hybrid_overlap,
            "ooctzt": self.ooctzt,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class Region:
    """One detected region; intervals are in pseudo-observation space."""

    scan_axis_interval: tuple
    cross_axis_interval: tuple
    tau_kl: float
    sample_count: int
    orientation: Orientation = Orientation.U_SCANS_V

    @property
    def u_interval(self):
        if self.orientation is Orientation.U_SCANS_V:
            return self.scan_axis_interval
        return self.cross_axis_interval

    @property
    def v_interval(self):
        if self.orientation is Orientation.U_SCANS_V:
            return self.cross_axis_interval
        return self.scan_axis_interval


@dataclass(frozen=True)
class CimResult:
    value: float
    regions: tuple
    winning_si: float
    winning_orientation: Orientation
    winning_split: int
    n: int
    tau_kl: float = 0.0
    config: ScanConfig = field(default_factory=ScanConfig)

    @property
    def weights(self) -> np.ndarray:
        return np.array([r.sample_count / self.n for r in self.regions])

    @property
    def n_regions(self) -> int:
        return sum(1 for r in self.regions if r.sample_count > 0)

    def boundaries(self) -> dict:
        """Interior edges of the non-empty regions, per pseudo-observation axis."""
        edges = {"u": set(), "v": set()}
        for r in self.regions:
            if r.sample_count == 0:
                continue
            for axis, (lo, hi) in (("u", r.u_interval), ("v", r.v_interval)):
                for e in (lo, hi):
                    if 0.0 < e < 1.0:
                        edges[axis].add(e)
        return {k: sorted(v) for k, v in edges.items()}

    def __float__(self):
        return float(self.value)


def _orient(pobs: PseudoObservations, orientation):
    if Orientation(orientation) is Orientation.U_SCANS_V:
        return pobs.u_ranks, pobs.v_ranks
    return pobs.v_ranks, pobs.u_ranks


def _scan_sorted(scan, cross):
    order = np.argsort(scan, kind="stable")
    return (np.ascontiguousarray(scan[order], dtype=np.int64),
            np.ascontiguousarray(cross[order], dtype=np.int64))


def _strip(scan, cross, n, lo, hi, presorted=False):
    """Samples whose cross pseudo-observation lies in (lo, hi], sorted by scan."""
    if not presorted:
        scan, cross = _scan_sorted(scan, cross)
    keep = (cross > lo * n) & (cross <= hi * n)
    return scan[keep], cross[keep]


def _cells(a, n, ncells):
    # pseudo-observation r/n falls in cell ceil(r * ncells / n) - 1
    return (a * ncells + n - 1) // n - 1


def _scan_kernel(a, b, n, ncells, z, cfg):
    cell = _cells(a, n, ncells)
    lo = np.empty(ncells, dtype=np.int64)
    hi = np.empty(ncells, dtype=np.int64)
    tau = np.empty(ncells, dtype=np.float64)
    cnt = np.empty(ncells, dtype=np.int64)
    k = _kernels.scan_sorted(a, b, cell, ncells, z, cfg.sigma_coef, cfg.ooctzt,
                             cfg.hybrid_overlap, lo, hi, tau, cnt)
    return lo[:k], hi[:k], tau[:k], cnt[:k]


def _scan_reference(a, b, n, ncells, z, cfg):
    """Same scan driven by :class:`TauStream`; slow, used for cross-checks."""
    cell = _cells(a, n, ncells)
    us, vs = a / n, b / n
    out = []
    stream = TauStream(cfg.hybrid_overlap, cfg.ooctzt)
    start_cell = 0
    m_prev = tau_prev = 0.0
    is_new = True
    p = 0
    m = a.shape[0]
    for c in range(ncells):
        q = p
        while q < m and cell[q] == c:
            q += 1
        if q == p:
            continue
        mm_before, tau_before = len(stream), tau_prev
        for j in range(p, q):
            stream.consume(us[j], vs[j])
        tau = stream.current()
        cur = abs(tau)
        mm = len(stream)
        boundary = False
        if not is_new and mm >= 2:
            sig = cfg.sigma_coef * (1.0 - tau * tau)
            boundary = cur < m_prev - sig / math.sqrt(mm) * z
        is_new = False
        if boundary:
            out.append((start_cell, c, tau_before, mm_before))
            stream.reset()
            start_cell = c
            for j in range(p, q):
                stream.consume(us[j], vs[j])
            tau = stream.current()
            cur = abs(tau)
            is_new = True
        m_prev, tau_prev = cur, tau
        p = q
    out.append((start_cell, ncells, tau_prev, len(stream)))
    lo, hi, tau, cnt = zip(*out)
    return (np.array(lo, dtype=np.int64), np.array(hi, dtype=np.int64),
            np.array(tau, dtype=np.float64), np.array(cnt, dtype=np.int64))


_ENGINES = {"kernel": _scan_kernel, "stream": _scan_reference}


def _check_si(si, msi):
    if not _is_dyadic(si):
        raise InvalidConfigError(f"scanning increment must be 1/2^k, got {si}")
    if si < msi:
        raise InvalidConfigError(f"scanning increment {si} is below msi={msi}")


def _to_regions(raw, si, cross_interval, orientation):
    lo, hi, tau, cnt = raw
    return [Region((float(l * si), float(h * si)), tuple(cross_interval),
                   float(t), int(c), orientation)
            for l, h, t, c in zip(lo, hi, tau, cnt)]


def scan_unit_square(pobs, si: float, orientation=Orientation.U_SCANS_V,
                     cross_interval=(0.0, 1.0), alpha: float = 0.2,
                     config: ScanConfig | None = None, engine: str = "kernel"):
    """Partition one strip of the unit square into regions of monotonicity.

    Parameters
    ----------
    pobs : PseudoObservations or SamplePairs
    si : float
        Scanning increment, ``1/2^k`` and not below ``config.msi``.
    orientation : Orientation
        Which pseudo-observation axis is scanned.
    cross_interval : (lo, hi)
        Only samples whose other coordinate lies in ``(lo, hi]`` are used.
    alpha : float
        Confidence level of the boundary test; overrides ``config.alpha``.
    engine : {"kernel", "stream"}
        ``"stream"`` runs the identical procedure through :class:`TauStream`.

    Returns
    -------
    list of Region
    """
    if not isinstance(pobs, PseudoObservations):
        pobs = pseudo_observations(pobs)
    cfg = config or ScanConfig(alpha=alpha)
    if cfg.alpha != alpha:
        cfg = ScanConfig(cfg.msi, alpha, cfg.orientations, cfg.subinterval_splits,
                         cfg.sigma_coef, cfg.hybrid_overlap, cfg.ooctzt)
    _check_si(si, cfg.msi)
    orientation = Orientation(orientation)
    lo, hi = float(cross_interval[0]), float(cross_interval[1])
    if not (0.0 <= lo < hi <= 1.0):
        raise InvalidConfigError(f"bad cross interval {cross_interval}")
    n = pobs.n
    scan, cross = _orient(pobs, orientation)
    a, b = _strip(scan, cross, n, lo, hi)
    if a.shape[0] < 2:
        raise InvalidInputError("cross interval holds fewer than 2 samples")
    ncells = int(round(1.0 / si))
    raw = _ENGINES[engine](a, b, n, ncells, cfg.z_crit, cfg)
    return _to_regions(raw, si, (lo, hi), orientation)


def _sweep_kernel(strips, n, increments, z, cfg):
    ncells = np.array([int(round(1.0 / si)) for si in increments], dtype=np.int64)
    sizes = [a.shape[0] for _, a, _ in strips]
    offsets = np.zeros(len(strips) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(sizes)
    a_all = np.concatenate([a for _, a, _ in strips])
    b_all = np.concatenate([b for _, _, b in strips])
    cap = len(strips) * int(ncells.sum())
    lo = np.empty(cap, dtype=np.int64)
    hi = np.empty(cap, dtype=np.int64)
    tau = np.empty(cap, dtype=np.float64)
    cnt = np.empty(cap, dtype=np.int64)
    shape = (len(strips), len(increments))
    nreg = np.empty(shape, dtype=np.int64)
    nonempty = np.empty(shape, dtype=np.int64)
    partial = np.empty(shape, dtype=np.float64)
    _kernels.sweep(a_all, b_all, offsets, ncells, n, z, cfg.sigma_coef, cfg.ooctzt,
                   cfg.hybrid_overlap, lo, hi, tau, cnt, nreg, nonempty, partial)
    ends = np.cumsum(nreg.ravel()).reshape(shape)

    def raw(s_idx, k):
        e = ends[s_idx, k]
        b_ = e - nreg[s_idx, k]
        return lo[b_:e], hi[b_:e], tau[b_:e], cnt[b_:e]

    return raw, nonempty, partial


def _sweep_reference(strips, n, increments, z, cfg):
    raws = {}
    partial = np.empty((len(strips), len(increments)))
    nonempty = np.empty((len(strips), len(increments)), dtype=np.int64)
    for s_idx, (_, a, b) in enumerate(strips):
        for k, si in enumerate(increments):
            ncells = int(round(1.0 / si))
            if a.shape[0] == 0:
                raw = (np.array([0]), np.array([ncells]), np.array([0.0]), np.array([0]))
            else:
                raw = _scan_reference(a, b, n, ncells, z, cfg)
            acc = 0.0
            for t, c in zip(raw[2], raw[3]):
                acc += (c / n) * abs(t)
            raws[s_idx, k] = raw
            partial[s_idx, k] = acc
            nonempty[s_idx, k] = int(np.count_nonzero(raw[3]))
    return (lambda s_idx, k: raws[s_idx, k]), nonempty, partial


_SWEEPS = {"kernel": _sweep_kernel, "stream": _sweep_reference}


def compute_cim(xs, ys=None, config: ScanConfig | None = None,
                engine: str = "kernel") -> CimResult:
    """Estimate the index and the region partition that maximises it.

    Every combination of increment, orientation and strip split in
    ``config`` is scanned; strips of one split are scanned independently
    and their regions weighted by sample count over the full ``n``. Ties in
    the maximum go to the configuration with fewer regions, then the larger
    increment.
    """
    s = as_samples(xs, ys)
    cfg = config or ScanConfig()
    pobs = pseudo_observations(s)
    n = s.n
    z = cfg.z_crit
    increments = cfg.increments
    sweep_fn = _SWEEPS[engine]

    best = None
    best_key = None
    for orientation in cfg.orientations:
        scan, cross = _scan_sorted(*_orient(pobs, orientation))
        strips, groups = [], []
        for split in cfg.subinterval_splits:
            first = len(strips)
            for k in range(split):
                lo, hi = k / split, (k + 1) / split
                strips.append(((lo, hi), *_strip(scan, cross, n, lo, hi, presorted=True)))
            groups.append((split, range(first, len(strips))))
        raw, nonempty, partial = sweep_fn(strips, n, increments, z, cfg)
        for split, idx in groups:
            for k, si in enumerate(increments):
                total = 0.0
                nreg = 0
                for s_idx in idx:
                    total += float(partial[s_idx, k])
                    nreg += int(nonempty[s_idx, k])
                key = (total, -nreg, si)
                if best_key is None or key > best_key:
                    best_key = key
                    best = (orientation, split, si,
                            [(strips[s_idx][0], raw(s_idx, k)) for s_idx in idx])

    orientation, split, si, chosen = best
    regions = []
    for interval, raw in chosen:
        regions.extend(_to_regions(raw, si, interval, orientation))
    value = min(max(best_key[0], 0.0), 1.0)
    global_tau = tau_kl_hat(s, hybrid_overlap=cfg.hybrid_overlap,
                            ooctzt=cfg.ooctzt).value
    return CimResult(value, tuple(regions), si, orientation, split, n,
                     global_tau, cfg)


def cim(xs, ys=None, config: ScanConfig | None = None) -> float:
    """Shorthand returning only the index value."""
    return compute_cim(xs, ys, config).value


def region_count(result: CimResult, single_region_tolerance: float = 0.05) -> int:
    """Number of monotone regions, collapsing to 1 when a single tau explains the index.

    A dependence is reported as monotone when the global |tau_KL| is within
    ``single_region_tolerance`` (relative) of the index value.
    """
    if abs(result.tau_kl) >= (1.0 - single_region_tolerance) * result.value:
        return 1
    return max(result.n_regions, 1)
