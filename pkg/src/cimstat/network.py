"""Pairwise dependence matrices, monotonicity census and MRNET reconstruction."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .cim import ScanConfig, compute_cim, region_count
from .data import Dataset
from .exceptions import InvalidInputError
from .inference import NullModel, calibrate_null, p_value
from .tau import DimensionKind

__all__ = [
    "NullRegistry",
    "DependencyMatrix",
    "CensusSummary",
    "Network",
    "pairwise_matrix",
    "monotonicity_census",
    "mrmr_scores",
    "mrmr_ranking",
    "mrnet",
    "aupr_top_k",
]

_KIND_CODE = {DimensionKind.CONTINUOUS: 0, DimensionKind.DISCRETE: 1}


class NullRegistry:
    """Cache of index nulls keyed by (n, kinds, config hash).

    Missing entries are calibrated on first use with a seed derived from
    ``seed`` and the key, so the cache content does not depend on the order
    of requests.
    """

    def __init__(self, replicates: int = 500, seed: int = 0, jobs: int = 1):
        self.replicates = replicates
        self.seed = seed
        self.jobs = jobs
        self._models = {}

    def _key(self, n, kinds, cfg):
        kinds = tuple(sorted((DimensionKind(k) for k in kinds), key=_KIND_CODE.get))
        return int(n), kinds, cfg.config_hash()

    def add(self, model: NullModel, cfg: ScanConfig | None = None):
        cfg = cfg or ScanConfig()
        self._models[self._key(model.n, model.kinds, cfg)] = model

    def get(self, n, kinds, cfg: ScanConfig) -> NullModel:
        key = self._key(n, kinds, cfg)
        if key not in self._models:
            entropy = [self.seed, key[0]] + [_KIND_CODE[k] for k in key[1]]
            child = int(np.random.SeedSequence(entropy).generate_state(1)[0])
            self._models[key] = calibrate_null("cim", key[0], self.replicates, key[1],
                                               child, cfg, self.jobs)
        return self._models[key]

    def __len__(self):
        return len(self._models)


@dataclass
class DependencyMatrix:
    labels: list
    values: np.ndarray
    p_values: np.ndarray
    region_counts: np.ndarray
    degenerate: np.ndarray = None

    def __post_init__(self):
        d = len(self.labels)
        if self.degenerate is None:
            self.degenerate = np.zeros((d, d), dtype=bool)

    def pairs(self):
        d = len(self.labels)
        for i in range(d):
            for j in range(i + 1, d):
                yield i, j

    def long_rows(self) -> list:
        return [(self.labels[i], self.labels[j], float(self.values[i, j]),
                 float(self.p_values[i, j]), int(self.region_counts[i, j]),
                 bool(self.degenerate[i, j])) for i, j in self.pairs()]

    def to_csv(self, digits: int = 6) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "value", "p", "regions", "degenerate"])
        for a, b, v, p, r, dg in self.long_rows():
            w.writerow([a, b, f"{v:.{digits}g}", f"{p:.{digits}g}", r, int(dg)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "values": self.values.tolist(),
            "p_values": self.p_values.tolist(),
            "region_counts": self.region_counts.tolist(),
            "degenerate": self.degenerate.tolist(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _is_constant(x) -> bool:
    return bool(np.all(x == x[0]))


def pairwise_matrix(data: Dataset, cfg: ScanConfig | None = None,
                    nulls: NullRegistry | None = None) -> DependencyMatrix:
    """Index, p-value and region count for every unordered column pair.

    Pairs involving a constant column are flagged degenerate with value 0,
    p-value 1 and zero regions. The diagonal holds value 1 and p-value 0.
    """
    if not isinstance(data, Dataset):
        data = Dataset(dict(data))
    labels = data.labels
    d = len(labels)
    if d < 2:
        raise InvalidInputError("need at least 2 columns")
    if data.n_rows < 2:
        raise InvalidInputError("need at least 2 rows")
    cfg = cfg or ScanConfig()
    nulls = nulls if nulls is not None else NullRegistry()

    values = np.eye(d)
    pvals = np.zeros((d, d))
    regions = np.eye(d, dtype=np.int64)
    degenerate = np.zeros((d, d), dtype=bool)
    cols = [data[c] for c in labels]
    for i in range(d):
        for j in range(i + 1, d):
            if _is_constant(cols[i]) or _is_constant(cols[j]):
                v, p, r, dg = 0.0, 1.0, 0, True
            else:
                res = compute_cim(cols[i], cols[j], cfg)
                model = nulls.get(data.n_rows, (data.kinds[labels[i]],
                                                data.kinds[labels[j]]), cfg)
                v, p, r, dg = res.value, p_value(model, res.value, cfg), region_count(res), False
            values[i, j] = values[j, i] = v
            pvals[i, j] = pvals[j, i] = p
            regions[i, j] = regions[j, i] = r
            degenerate[i, j] = degenerate[j, i] = dg
    return DependencyMatrix(list(labels), values, pvals, regions, degenerate)


@dataclass(frozen=True)
class CensusSummary:
    n_pairs: int
    n_significant: int
    n_monotone: int
    fraction_monotone: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def monotonicity_census(matrix: DependencyMatrix, strength_min: float = 0.4,
                        alpha: float = 0.05) -> CensusSummary:
    """Share of significant, strong dependencies that are monotone.

    A pair counts when ``p < alpha`` and ``value > strength_min``; it is
    monotone when its region count is 1. ``fraction_monotone`` is 0 when no
    pair qualifies.
    """
    n_pairs = n_sig = n_mono = 0
    for i, j in matrix.pairs():
        n_pairs += 1
        if matrix.degenerate[i, j]:
            continue
        if matrix.p_values[i, j] < alpha and matrix.values[i, j] > strength_min:
            n_sig += 1
            n_mono += int(matrix.region_counts[i, j] == 1)
    frac = n_mono / n_sig if n_sig else 0.0
    return CensusSummary(n_pairs, n_sig, n_mono, frac)


def _values(matrix) -> np.ndarray:
    if isinstance(matrix, DependencyMatrix):
        return matrix.values
    return np.asarray(matrix, dtype=float)


def mrmr_scores(matrix, target: int, selected=()) -> dict:
    """Relevance to ``target`` minus mean redundancy with ``selected``.

    Returns ``{candidate: score}`` over all variables that are neither the
    target nor already selected.
    """
    m = _values(matrix)
    selected = list(selected)
    if target in selected:
        raise InvalidInputError("target cannot be among the selected variables")
    out = {}
    for i in range(m.shape[0]):
        if i == target or i in selected:
            continue
        redundancy = float(np.mean(m[i, selected])) if selected else 0.0
        out[i] = float(m[i, target]) - redundancy
    return out


def mrmr_ranking(matrix, target: int) -> list:
    """Greedy forward selection to exhaustion.

    Returns ``[(candidate, score_at_selection), ...]`` in selection order;
    equal scores go to the lower index.
    """
    m = _values(matrix)
    selected = []
    order = []
    while len(selected) < m.shape[0] - 1:
        scores = mrmr_scores(m, target, selected)
        best = max(scores, key=lambda i: (scores[i], -i))
        order.append((best, scores[best]))
        selected.append(best)
    return order


@dataclass
class Network:
    labels: list
    edge_scores: np.ndarray
    edges: list = field(default_factory=list)

    def top(self, k: int) -> list:
        return self.edges[:k]

    def edge_set(self, k: int | None = None) -> set:
        es = self.edges if k is None else self.edges[:k]
        return {frozenset((i, j)) for i, j, _ in es}

    def to_csv(self, digits: int = 6) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "score"])
        for i, j, s in self.edges:
            w.writerow([self.labels[i], self.labels[j], f"{s:.{digits}g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "edge_scores": self.edge_scores.tolist(),
            "edges": [{"i": self.labels[i], "j": self.labels[j], "score": s}
                      for i, j, s in self.edges],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def mrnet(matrix, threshold: float = 0.0, labels=None) -> Network:
    """Maximum-relevance network from a dependence matrix.

    Each variable is taken as target and every other variable is scored at
    the step mRMR selects it; the edge score is the larger of the two
    directional scores, floored at 0. Edges scoring above ``threshold`` are
    returned ranked by score.
    """
    m = _values(matrix)
    d = m.shape[0]
    if d < 3:
        raise InvalidInputError("MRNET needs at least 3 variables")
    if labels is None:
        labels = matrix.labels if isinstance(matrix, DependencyMatrix) else [str(i) for i in range(d)]
    directional = np.full((d, d), -np.inf)
    for t in range(d):
        for cand, score in mrmr_ranking(m, t):
            directional[t, cand] = score
    scores = np.maximum(directional, directional.T)
    np.fill_diagonal(scores, 0.0)
    scores = np.maximum(scores, 0.0)
    edges = [(i, j, float(scores[i, j])) for i in range(d) for j in range(i + 1, d)
             if scores[i, j] > threshold]
    edges.sort(key=lambda e: (-e[2], e[0], e[1]))
    return Network(list(labels), scores, edges)


def aupr_top_k(network: Network, true_edges, k: int = 20) -> float:
    """Area under the precision-recall curve of the ``k`` best-ranked edges.

    ``true_edges`` is an iterable of index pairs. The area is the sum of
    precision at each correct prediction times the recall step it adds.
    """
    truth = {frozenset(e) for e in true_edges}
    if not truth:
        raise InvalidInputError("no true edges given")
    hits = 0
    area = 0.0
    for rank, (i, j, _) in enumerate(network.edges[:k], start=1):
        if frozenset((i, j)) in truth:
            hits += 1
            area += (hits / rank) / len(truth)
    return area
