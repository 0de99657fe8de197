import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cimstat import InvalidInputError, TauStream, pseudo_observations, tau_kl_hat
from cimstat._kernels import tau_kl_from_counts
from cimstat.streaming import stream_consume, stream_current, stream_new
from cimstat.tau import count_concordance


def scan_order(x, y):
    p = pseudo_observations(x, y)
    o = np.argsort(p.u_ranks, kind="stable")
    return p.us[o], p.vs[o]


def check_prefixes(us, vs, hybrid_overlap=True):
    s = TauStream(hybrid_overlap=hybrid_overlap)
    for k in range(len(us)):
        v = s.consume(us[k], vs[k])
        if k >= 1:
            assert v == tau_kl_hat(us[:k + 1], vs[:k + 1], hybrid_overlap=hybrid_overlap).value
    return s


def test_empty_and_single():
    s = stream_new()
    assert stream_current(s) == 0
    stream_consume(s, (0.5, 0.5))
    assert s.current() == 0


def test_new_equals_reset():
    s = stream_new()
    for i in range(5):
        s.consume(i / 5, (i * 3 % 5) / 5)
    s.reset()
    fresh = stream_new()
    assert vars(s) == vars(fresh)


def test_comonotone_prefix():
    s = stream_new()
    out = [stream_consume(s, p) for p in [(1 / 3, 1 / 3), (2 / 3, 2 / 3), (1.0, 1.0)]]
    assert out == [0, 1, 1]
    assert stream_current(s) == out[-1]


def test_two_concordant():
    s = stream_new()
    s.consume(0.1, 0.2)
    assert s.consume(0.3, 0.4) == 1.0


def test_non_finite_rejected():
    with pytest.raises(InvalidInputError):
        stream_new().consume(float("nan"), 0.5)


def test_step_function_stream():
    rng = np.random.default_rng(0)
    x = rng.random(1000)
    us, vs = scan_order(x, np.floor(2 * x))
    s = TauStream()
    for u, v in zip(us, vs):
        s.consume(u, v)
    assert s.current() == 1.0


def test_counters_track_definitions():
    rng = np.random.default_rng(1)
    x = rng.integers(0, 4, 250).astype(float)
    y = rng.integers(0, 5, 250).astype(float)
    us, vs = scan_order(x, y)
    s = TauStream()
    for k, (u, v) in enumerate(zip(us, vs), start=1):
        s.consume(u, v)
        assert s.running_pair_count == math.comb(k, 2)
        assert isinstance(s.running_numerator, int) and isinstance(s.tie_count_u, int)
    c = count_concordance(us, vs)
    assert s.tie_count_u == c.ties_x_pairs and s.tie_count_v == c.ties_y_pairs
    assert s.running_numerator == c.numerator


def test_continuous_prefix_equivalence_500():
    rng = np.random.default_rng(2)
    x = rng.random(500)
    us, vs = scan_order(x, x + rng.normal(0, 0.5, 500))
    check_prefixes(us, vs)


def test_discrete_prefix_equivalence():
    rng = np.random.default_rng(3)
    x = rng.integers(0, 5, 300).astype(float)
    us, vs = scan_order(x, np.floor(x / 2) + rng.integers(0, 3, 300))
    check_prefixes(us, vs)


@pytest.mark.parametrize("hybrid_overlap", [True, False])
def test_hybrid_prefix_equivalence(hybrid_overlap):
    rng = np.random.default_rng(4)
    x = rng.random(300)
    us, vs = scan_order(x, np.digitize(x + rng.normal(0, 0.2, 300), [0.25, 0.5, 0.75]))
    check_prefixes(us, vs, hybrid_overlap)


def test_hybrid_without_overlap_uses_k_zero():
    rng = np.random.default_rng(5)
    x = rng.random(400)
    y = np.digitize(x + rng.normal(0, 0.3, 400), [0.3, 0.6])
    us, vs = scan_order(x, y)
    s = TauStream(hybrid_overlap=False)
    for u, v in zip(us, vs):
        s.consume(u, v)
    c = count_concordance(us, vs)
    expected = c.numerator / (c.n_pairs - max(c.ties_x_pairs, c.ties_y_pairs))
    assert s.overlap_k == 0
    assert s.current() == pytest.approx(expected, abs=0, rel=1e-15)
    value, hybrid, _ = tau_kl_from_counts(c.numerator, c.n_pairs, c.ties_x_pairs,
                                          c.ties_y_pairs, True, False, 0)
    assert hybrid and s.current() == value


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 120), st.integers(0, 10_000), st.sampled_from(["cont", "disc", "hyb"]))
def test_prefix_equivalence_property(n, seed, kind):
    rng = np.random.default_rng(seed)
    x = rng.random(n)
    y = x + rng.normal(0, 0.4, n)
    if kind == "disc":
        x, y = np.floor(3 * x), np.floor(2 * y)
    elif kind == "hyb":
        y = np.floor(3 * y)
    us, vs = scan_order(x, y)
    check_prefixes(us, vs)


def test_quadratic_cost_scaling():
    import time

    from cimstat._kernels import _consume_range

    def inputs(n):
        rng = np.random.default_rng(n)
        return np.arange(1, n + 1, dtype=np.int64), rng.permutation(n).astype(np.int64) + 1

    def once(a, b):
        n = a.shape[0]
        umap = np.zeros(n + 1, dtype=np.int64)
        vmap = np.zeros(n + 1, dtype=np.int64)
        st_ = np.zeros(6, dtype=np.int64)
        t0 = time.perf_counter()
        _consume_range(a, b, 0, 0, n, umap, vmap, st_, 100)
        return time.perf_counter() - t0

    once(*inputs(100))
    data = {n: inputs(n) for n in (4000, 8000)}
    ts = {n: [] for n in data}
    for _ in range(7):
        for n, ab in data.items():
            ts[n].append(once(*ab))
    assert 3.0 <= min(ts[8000]) / min(ts[4000]) <= 5.0
