import numpy as np
import pytest

from cimstat import InvalidConfigError, compute_cim, tau_hat, tau_kl_hat
from cimstat.synth import (
    CopulaSpec,
    Margin,
    Pattern,
    PatternSpec,
    gen_markov_chain,
    gen_parabola,
    gen_pattern,
    noise_sd_from_index,
    sample_copula,
    tau_to_param,
)
from cimstat.tau import null_sd

FUNCTIONAL = [p for p in Pattern if p not in (Pattern.CIRCULAR, Pattern.INDEPENDENT)]


def test_linear_noiseless():
    assert tau_hat(gen_pattern("linear", 200, 0.0, 1)).value == 1.0


def test_quadratic_noiseless():
    s = gen_pattern("quadratic", 1000, 0.0, 2)
    assert abs(tau_hat(s).value) < 0.1
    assert compute_cim(s).value > 0.99


@pytest.mark.parametrize("pattern", list(Pattern))
def test_pattern_determinism(pattern):
    a, b = gen_pattern(pattern, 100, 0.3, 7), gen_pattern(pattern, 100, 0.3, 7)
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.ys, b.ys)


@pytest.mark.parametrize("pattern", FUNCTIONAL)
def test_noiseless_is_functional(pattern):
    s = gen_pattern(pattern, 500, 0.0, 3)
    seen = {}
    for x, y in zip(s.xs, s.ys):
        assert seen.setdefault(x, y) == y
    assert np.all((s.xs >= 0) & (s.xs <= 1))


def test_circle_both_branches():
    s = gen_pattern("circular", 1000, 0.0, 4)
    assert np.allclose(s.xs ** 2 + s.ys ** 2, 1.0)
    assert (s.ys > 0).any() and (s.ys < 0).any() and s.xs.min() < -0.9


def test_step_single_jump():
    s = gen_pattern("step", 500, 0.0, 5)
    assert set(np.unique(s.ys)) == {0.0, 1.0}
    assert np.all((s.xs > 0.5) == (s.ys == 1.0))


def test_pattern_validation():
    with pytest.raises(InvalidConfigError):
        PatternSpec("zigzag", 10)
    with pytest.raises(InvalidConfigError):
        PatternSpec("linear", 1)
    with pytest.raises(InvalidConfigError):
        PatternSpec("linear", 10, -1.0)


def test_noise_index_scales_linearly():
    assert noise_sd_from_index("linear", 0.5) == 0.5
    assert noise_sd_from_index("sinusoidal_lf", 1.0) == 2.0
    assert noise_sd_from_index("cubic", 2.0) == pytest.approx(2 * noise_sd_from_index("cubic", 1.0))


def test_parabola_vertex():
    s = gen_parabola(0.5, 0.0, 1000, 1)
    assert np.allclose(s.ys, 4 * (s.xs - 0.5) ** 2)
    assert s.ys.min() >= 0 and s.ys.min() < 1e-4
    s = gen_parabola(0.25, 0.0, 1000, 1)
    assert abs(s.xs[np.argmin(s.ys)] - 0.25) < 0.01
    with pytest.raises(InvalidConfigError):
        gen_parabola(1.0, 0.0, 10)


def test_tau_to_param_closed_forms():
    assert tau_to_param("clayton", 0.5) == 2.0
    assert tau_to_param("gumbel", 0.5) == 2.0
    assert tau_to_param("gaussian", 0.5) == pytest.approx(np.sin(np.pi / 4))
    assert tau_to_param("frank", 0.5) == pytest.approx(5.736, abs=1e-3)
    assert tau_to_param("frank", -0.5) == -tau_to_param("frank", 0.5)
    for fam in ("clayton", "gumbel"):
        with pytest.raises(InvalidConfigError):
            tau_to_param(fam, 1.0)
        with pytest.raises(InvalidConfigError):
            tau_to_param(fam, -0.2)


def test_frank_inversion_accuracy():
    from cimstat.synth import _frank_tau

    for t in (0.05, 0.2, 0.5, 0.8, 0.95):
        assert abs(_frank_tau(tau_to_param("frank", t)) - t) < 1e-10


def test_gaussian_independence():
    s = sample_copula(CopulaSpec("gaussian", 0.0, 1000, seed=1))
    assert abs(tau_hat(s).value) < 3 * null_sd(1000)


def test_clayton_round_trip():
    s = sample_copula(CopulaSpec("clayton", 0.5, 2000, seed=2))
    assert abs(tau_hat(s).value - 0.5) < 0.03


@pytest.mark.parametrize("family", ["gaussian", "frank", "gumbel", "clayton"])
@pytest.mark.parametrize("tau", [0.2, 0.5, 0.8])
def test_copula_round_trip(family, tau):
    s = sample_copula(CopulaSpec(family, tau, 5000, seed=3))
    assert abs(tau_hat(s).value - tau) < 0.03


def test_discrete_margins():
    spec = CopulaSpec("gaussian", 0.5, 1000, ("continuous", "discrete:4"), seed=4)
    s = sample_copula(spec)
    assert set(np.unique(s.ys)) <= {0.0, 1.0, 2.0, 3.0}
    est = [tau_kl_hat(sample_copula(CopulaSpec("gaussian", 0.5, 1000, (Margin(), Margin("discrete", 4)),
                                                seed=k))).value for k in range(30)]
    assert abs(np.mean(est) - 0.5) < 0.05


def test_copula_spec_validation():
    with pytest.raises(InvalidConfigError):
        CopulaSpec("student", 0.5, 100)
    with pytest.raises(InvalidConfigError):
        CopulaSpec("gumbel", 1.0, 100)
    with pytest.raises(InvalidConfigError):
        Margin("discrete", 1)


def test_markov_chain():
    d = gen_markov_chain(4, 500, 0.8, 1)
    assert d.labels == ["X1", "X2", "X3", "X4"]
    t12 = tau_hat(d["X1"], d["X2"]).value
    t13 = tau_hat(d["X1"], d["X3"]).value
    t14 = tau_hat(d["X1"], d["X4"]).value
    assert abs(t12 - 0.8) < 0.05 and t12 > t13 > t14
    again = gen_markov_chain(4, 500, 0.8, 1)
    assert all(np.array_equal(d[c], again[c]) for c in d.labels)
    z = gen_markov_chain(3, 500, 0.0, 2)
    for a, b in (("X1", "X2"), ("X1", "X3"), ("X2", "X3")):
        assert abs(tau_hat(z[a], z[b]).value) < 3 * null_sd(500)
    with pytest.raises(InvalidConfigError):
        gen_markov_chain(2, 10, 0.5)


def test_dpi_chain_taus():
    ok = 0
    for seed in range(200):
        d = gen_markov_chain(4, 500, 0.8, seed)
        t = [tau_hat(d["X1"], d[c]).value for c in ("X2", "X3", "X4")]
        ok += t[0] > t[1] > t[2]
    assert ok >= 190
