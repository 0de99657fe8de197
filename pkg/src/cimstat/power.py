"""Monte-Carlo power of the index test against noisy association patterns."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cim import ScanConfig, compute_cim
from .exceptions import InvalidConfigError
from .inference import calibrate_null
from .synth import PatternSpec, _coerce_pattern, gen_pattern, noise_sd_from_index
from .tau import DimensionKind

__all__ = ["PowerRow", "power_table", "min_n_for_power"]


@dataclass(frozen=True)
class PowerRow:
    pattern: str
    noise: float
    noise_sd: float
    n: int
    power: float
    threshold: float
    replicates: int


def _rejections(args):
    pattern, n, sd, seeds, cfg, thr = args
    hits = 0
    for s in seeds:
        xy = gen_pattern(PatternSpec(pattern, n, sd, s))
        hits += compute_cim(xy, config=cfg).value > thr
    return hits


def power_table(patterns, noise_grid, n_grid, replicates: int = 500, seed: int = 0,
                sig_level: float = 0.05, noise_mode: str = "index",
                config: ScanConfig | None = None, null_replicates: int = 500,
                nulls: dict | None = None, jobs: int = 1) -> list:
    """Rejection rate of the level-``sig_level`` test per (pattern, noise, n).

    The critical value is the ``1 - sig_level`` quantile of the fitted Beta
    null for continuous margins at that ``n``. ``noise_mode="index"`` reads
    the grid through :func:`noise_sd_from_index`, ``"sd"`` as raw sd.
    ``nulls`` may map ``n`` to a pre-calibrated :class:`NullModel`.
    """
    if not patterns or not noise_grid or not n_grid:
        raise InvalidConfigError("pattern, noise and n grids must be nonempty")
    if noise_mode not in ("index", "sd"):
        raise InvalidConfigError(f"unknown noise mode {noise_mode!r}")
    if replicates < 1:
        raise InvalidConfigError("replicates must be positive")
    cfg = config or ScanConfig()
    nulls = dict(nulls or {})
    kinds = (DimensionKind.CONTINUOUS, DimensionKind.CONTINUOUS)
    thresholds = {}
    for n_idx, n in enumerate(n_grid):
        if n not in nulls:
            nulls[n] = calibrate_null("cim", int(n), null_replicates, kinds,
                                      int(np.random.SeedSequence([seed, 1, n_idx]).generate_state(1)[0]),
                                      cfg, jobs)
        thresholds[n] = nulls[n].quantile(1.0 - sig_level)

    tasks, meta = [], []
    for p_idx, pattern in enumerate(patterns):
        pattern = _coerce_pattern(pattern)
        for z_idx, noise in enumerate(noise_grid):
            sd = noise_sd_from_index(pattern, noise) if noise_mode == "index" else float(noise)
            for n_idx, n in enumerate(n_grid):
                ss = np.random.SeedSequence([seed, 0, p_idx, z_idx, n_idx])
                seeds = [int(c.generate_state(1)[0]) for c in ss.spawn(replicates)]
                tasks.append((pattern.value, int(n), sd, seeds, cfg, thresholds[n]))
                meta.append((pattern.value, float(noise), sd, int(n)))
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            hits = list(ex.map(_rejections, tasks))
    else:
        hits = [_rejections(t) for t in tasks]
    return [PowerRow(p, z, sd, n, h / replicates, thresholds[n], replicates)
            for (p, z, sd, n), h in zip(meta, hits)]


def min_n_for_power(rows, target_power: float = 0.8) -> dict:
    """Smallest grid ``n`` reaching ``target_power``, per (pattern, noise); None if never."""
    out = {}
    for r in sorted(rows, key=lambda r: r.n):
        key = (r.pattern, r.noise)
        if key not in out:
            out[key] = None
        if out[key] is None and r.power >= target_power:
            out[key] = r.n
    return out
