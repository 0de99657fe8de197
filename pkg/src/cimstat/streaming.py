"""Incremental tau_KL over a stream of samples sorted along the scan axis.

Each :meth:`TauStream.consume` compares the new sample against every sample
already held (O(m) work), so a full pass over n samples costs O(n^2) pair
comparisons. All counters are Python integers.
"""

from __future__ import annotations

import math
from collections import defaultdict

import numpy as np

from . import _kernels
from ._kernels import OOCTZT
from .exceptions import InvalidInputError

__all__ = ["TauStream", "stream_new", "stream_consume", "stream_current"]


class TauStream:
    """Running tau_KL of the samples consumed so far.

    Parameters
    ----------
    hybrid_overlap : bool
        Recompute the hybrid overlap correction on every consume (an extra
        O(m) pass). Without it the hybrid denominator uses K = 0.
    ooctzt : int
        Sample-count cadence of the closeness-to-zero-ties threshold that
        decides whether a margin is treated as continuous.
    """

    def __init__(self, hybrid_overlap: bool = True, ooctzt: int = OOCTZT):
        self.hybrid_overlap = hybrid_overlap
        self.ooctzt = ooctzt
        self.reset()

    def reset(self):
        self.processed_count = 0
        self.running_pair_count = 0
        self.running_numerator = 0
        self.tie_count_u = 0
        self.tie_count_v = 0
        self.multiplicity_u = defaultdict(int)
        self.multiplicity_v = defaultdict(int)
        self.mm_groups = 0
        self.ctzt = 0
        self.overlap_k = 0
        self._us = []
        self._vs = []
        self._value = 0.0

    def __len__(self):
        return self.processed_count

    @property
    def consumed(self):
        return list(zip(self._us, self._vs))

    def consume(self, u: float, v: float) -> float:
        """Add one sample (``u`` on the scan axis) and return the new tau_KL."""
        u = float(u)
        v = float(v)
        if not (math.isfinite(u) and math.isfinite(v)):
            raise InvalidInputError("stream samples must be finite")

        if self._us:
            pu = np.asarray(self._us)
            pv = np.asarray(self._vs)
            du = u - pu
            dv = v - pv
            u_plus = int(np.count_nonzero((du > 0) & (dv != 0)))
            u_minus = int(np.count_nonzero((du < 0) & (dv != 0)))
            v_plus = int(np.count_nonzero((dv > 0) & (du != 0)))
            v_minus = int(np.count_nonzero((dv < 0) & (du != 0)))
            if u_plus < u_minus:
                self.running_numerator += v_minus - v_plus
            else:
                self.running_numerator += v_plus - v_minus

        self._us.append(u)
        self._vs.append(v)
        self.processed_count += 1
        self.running_pair_count += self.processed_count - 1

        self.multiplicity_u[u] += 1
        self.tie_count_u += self.multiplicity_u[u] - 1
        self.multiplicity_v[v] += 1
        self.tie_count_v += self.multiplicity_v[v] - 1

        if self.processed_count % self.ooctzt == 0:
            self.mm_groups += 1
            self.ctzt += self.mm_groups - 1

        self._value = self._evaluate()
        return self._value

    def _evaluate(self) -> float:
        uu, vv = self.tie_count_u, self.tie_count_v
        cont_u = uu <= self.ctzt
        cont_v = vv <= self.ctzt
        k = 0
        if self.hybrid_overlap and ((cont_u and vv > 0) or (cont_v and uu > 0)):
            us = np.asarray(self._us)
            vs = np.asarray(self._vs)
            if cont_u and not cont_v:
                k = int(_kernels.overlap_correction(us, vs))
            elif cont_v and not cont_u:
                k = int(_kernels.overlap_correction(vs, us))
            elif uu > vv:
                k = int(_kernels.overlap_correction(vs, us))
            else:
                k = int(_kernels.overlap_correction(us, vs))
        self.overlap_k = k
        value, _, _ = _kernels.tau_kl_from_counts(
            self.running_numerator, self.running_pair_count, uu, vv,
            cont_u, cont_v, k)
        return value

    def current(self) -> float:
        return self._value


def stream_new(hybrid_overlap: bool = True, ooctzt: int = OOCTZT) -> TauStream:
    return TauStream(hybrid_overlap=hybrid_overlap, ooctzt=ooctzt)


def stream_consume(stream: TauStream, pair) -> float:
    u, v = pair
    return stream.consume(u, v)


def stream_current(stream: TauStream) -> float:
    return stream.current()
