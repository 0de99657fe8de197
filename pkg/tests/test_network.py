import json

import numpy as np
import pytest

from cimstat import InvalidInputError
from cimstat.data import Dataset
from cimstat.network import (
    DependencyMatrix,
    NullRegistry,
    aupr_top_k,
    monotonicity_census,
    mrmr_ranking,
    mrmr_scores,
    mrnet,
    pairwise_matrix,
)
from cimstat.power import min_n_for_power, power_table
from cimstat.synth import gen_markov_chain, gen_parabola


@pytest.fixture(scope="module")
def nulls():
    return NullRegistry(replicates=150, seed=0)


def test_identical_columns(nulls):
    x = np.random.default_rng(0).random(200)
    m = pairwise_matrix(Dataset({"a": x, "b": x.copy()}), nulls=nulls)
    assert m.values[0, 1] == 1.0 and m.p_values[0, 1] < 1e-6 and m.region_counts[0, 1] == 1


def test_parabola_pair_has_two_regions(nulls):
    s = gen_parabola(0.5, 0.0, 1000, 0)
    m = pairwise_matrix(Dataset({"x": s.xs, "y": s.ys}), nulls=nulls)
    assert m.region_counts[0, 1] == 2


def test_matrix_shape_and_symmetry(nulls):
    d = gen_markov_chain(4, 200, 0.6, 1)
    m = pairwise_matrix(d, nulls=nulls)
    assert m.values.shape == (4, 4)
    assert np.array_equal(m.values, m.values.T) and np.array_equal(m.p_values, m.p_values.T)
    assert np.all(np.diag(m.values) == 1.0)
    assert len(m.long_rows()) == 6


def test_permutation_equivariance(nulls):
    d = gen_markov_chain(4, 150, 0.6, 2)
    m = pairwise_matrix(d, nulls=nulls)
    perm = [2, 0, 3, 1]
    pm = pairwise_matrix(d.select([d.labels[i] for i in perm]), nulls=nulls)
    assert np.array_equal(pm.values, m.values[np.ix_(perm, perm)])
    assert np.array_equal(pm.p_values, m.p_values[np.ix_(perm, perm)])


def test_constant_column_degenerate(nulls):
    rng = np.random.default_rng(3)
    m = pairwise_matrix(Dataset({"a": rng.random(50), "b": np.ones(50), "c": rng.random(50)}),
                        nulls=nulls)
    assert m.degenerate[0, 1] and m.values[0, 1] == 0 and m.p_values[0, 1] == 1
    assert m.region_counts[0, 1] == 0 and not m.degenerate[0, 2]


def test_matrix_validation():
    with pytest.raises(InvalidInputError):
        pairwise_matrix(Dataset({"a": np.arange(5.0)}))


def test_registry_order_independent():
    a, b = NullRegistry(120, 5), NullRegistry(120, 5)
    from cimstat import ScanConfig

    cfg = ScanConfig()
    a.get(30, ("continuous", "continuous"), cfg)
    ma = a.get(40, ("discrete", "continuous"), cfg)
    mb = b.get(40, ("continuous", "discrete"), cfg)
    assert np.array_equal(ma.samples, mb.samples) and len(a) == 2


def test_serialization(nulls):
    d = gen_markov_chain(3, 100, 0.5, 4)
    m = pairwise_matrix(d, nulls=nulls)
    lines = m.to_csv().splitlines()
    assert lines[0] == "i,j,value,p,regions,degenerate" and len(lines) == 4
    assert json.loads(m.to_json())["labels"] == d.labels


def census_matrix(labels, values, pvals, regions):
    n = len(labels)
    v, p, r = np.eye(n), np.zeros((n, n)), np.eye(n, dtype=int)
    for (i, j), a, b, c in zip([(i, j) for i in range(n) for j in range(i + 1, n)], values, pvals, regions):
        v[i, j] = v[j, i] = a
        p[i, j] = p[j, i] = b
        r[i, j] = r[j, i] = c
    return DependencyMatrix(labels, v, p, r)


def test_census_examples():
    # pairs (a,b),(a,c),(b,c): strong monotone, strong two-region, weak
    m = census_matrix(["a", "b", "c"], [0.9, 0.8, 0.2], [0.0, 0.001, 0.01], [1, 2, 1])
    s = monotonicity_census(m)
    assert (s.n_pairs, s.n_significant, s.n_monotone) == (3, 2, 1)
    assert s.fraction_monotone == 0.5
    none = census_matrix(["a", "b", "c"], [0.1, 0.1, 0.1], [0.5, 0.5, 0.5], [1, 1, 1])
    assert monotonicity_census(none).fraction_monotone == 0.0


def test_census_parabola_and_linear_mix(nulls):
    cols = {}
    for k in range(2):
        s = gen_parabola(0.5, 0.01, 500, k)
        cols[f"px{k}"], cols[f"py{k}"] = s.xs, s.ys
        x = np.random.default_rng(100 + k).random(500)
        cols[f"lx{k}"], cols[f"ly{k}"] = x, 2 * x + np.random.default_rng(200 + k).normal(0, 0.01, 500)
    m = pairwise_matrix(Dataset(cols), nulls=nulls)
    s = monotonicity_census(m)
    assert s.n_significant == 4 and s.fraction_monotone == 0.5


def test_mrmr_examples():
    m = np.array([[1.0, 0.9, 0.5, 0.1],
                  [0.9, 1.0, 0.6, 0.2],
                  [0.5, 0.6, 1.0, 0.3],
                  [0.1, 0.2, 0.3, 1.0]])
    assert mrmr_scores(m, 0) == {1: 0.9, 2: 0.5, 3: 0.1}
    s = mrmr_scores(m, 0, [1])
    assert s[2] == pytest.approx(0.5 - 0.6) and s[3] == pytest.approx(0.1 - 0.2)
    order = mrmr_ranking(m, 0)
    assert [c for c, _ in order] == [1, 2, 3]
    with pytest.raises(InvalidInputError):
        mrmr_scores(m, 0, [0])


def test_mrmr_tie_goes_to_lower_index():
    m = np.array([[1.0, 0.5, 0.5], [0.5, 1.0, 0.0], [0.5, 0.0, 1.0]])
    assert mrmr_ranking(m, 0)[0][0] == 1


def test_mrnet_redundant_copy():
    rng = np.random.default_rng(5)
    x1 = rng.random(300)
    x3 = x1 + rng.normal(0, 0.01, 300)
    x2 = x1 + rng.normal(0, 0.5, 300)
    d = Dataset({"X1": x1, "X2": x2, "X3": x3, "X4": rng.random(300)})
    m = pairwise_matrix(d, nulls=NullRegistry(120, 0))
    assert mrmr_ranking(m, 0)[0][0] == 2
    net = mrnet(m)
    assert net.edges[0][:2] == (0, 2)
    assert np.all(net.edge_scores >= 0) and np.array_equal(net.edge_scores, net.edge_scores.T)


def test_mrnet_threshold_and_output():
    m = np.array([[1.0, 0.9, 0.1], [0.9, 1.0, 0.2], [0.1, 0.2, 1.0]])
    net = mrnet(m, threshold=0.5, labels=["a", "b", "c"])
    assert [(i, j) for i, j, _ in net.edges] == [(0, 1)]
    assert net.to_csv().splitlines() == ["i,j,score", "a,b,0.9"]
    assert json.loads(net.to_json())["edges"][0]["score"] == 0.9
    with pytest.raises(InvalidInputError):
        mrnet(np.eye(2))


def test_mrnet_chain_recovery(nulls):
    d = gen_markov_chain(5, 300, 0.7, 6)
    net = mrnet(pairwise_matrix(d, nulls=nulls))
    truth = [(0, 1), (1, 2), (2, 3), (3, 4)]
    assert net.edge_set(4) == {frozenset(e) for e in truth}
    assert aupr_top_k(net, truth, k=10) == pytest.approx(1.0)


def test_aupr_examples():
    from cimstat.network import Network

    net = Network(["a", "b", "c"], np.zeros((3, 3)), [(0, 1, 0.9), (0, 2, 0.5), (1, 2, 0.1)])
    assert aupr_top_k(net, [(0, 1)]) == 1.0
    assert aupr_top_k(net, [(0, 2)]) == 0.5
    assert aupr_top_k(net, [(0, 1), (1, 2)]) == pytest.approx(0.5 + (2 / 3) / 2)
    with pytest.raises(InvalidInputError):
        aupr_top_k(net, [])


def test_power_table_small():
    rows = power_table(["linear", "independent"], [0.0], [50], replicates=40, seed=1,
                       null_replicates=120)
    by = {r.pattern: r for r in rows}
    assert by["linear"].power == 1.0 and by["independent"].power <= 0.2
    again = power_table(["linear", "independent"], [0.0], [50], replicates=40, seed=1,
                        null_replicates=120)
    assert rows == again
    best = min_n_for_power(rows)
    assert best[("linear", 0.0)] == 50 and best[("independent", 0.0)] is None


def test_power_table_jobs_invariant():
    a = power_table(["quadratic"], [0.5], [40], replicates=20, seed=2, null_replicates=100)
    b = power_table(["quadratic"], [0.5], [40], replicates=20, seed=2, null_replicates=100, jobs=2)
    assert a == b

