import numpy as np
import pytest

from cohqec.noise import (
    AngleDistribution,
    DiscretePauli,
    GlobalHamiltonian,
    LocalHamiltonian,
    NoiseModel,
    TimeCorrelated,
    distribution_moment,
    draw_trajectory_noise,
    init_process,
    parse_distribution_token,
    parse_noise_spec,
    parse_noise_token,
    sample_cycle,
)


def test_moment_centered_normal_closed_form():
    dist = AngleDistribution("normal", 0.0, 0.1)
    assert distribution_moment(dist, 4) == pytest.approx(3e-4, rel=1e-12)
    assert distribution_moment(dist, 6) == pytest.approx(15 * 0.1**6, rel=1e-12)
    assert distribution_moment(dist, 3) == 0.0
    assert distribution_moment(dist, 0) == 1.0


def test_moment_constant():
    dist = AngleDistribution("constant", 0.05)
    for k in range(6):
        assert distribution_moment(dist, k) == pytest.approx(0.05**k)


def test_moment_uniform_quadrature():
    # uniform on [mean-hw, mean+hw] with hw = std*sqrt(3); E[x^2] about 0 is std^2
    dist = AngleDistribution("uniform", 0.0, 0.2)
    assert distribution_moment(dist, 2) == pytest.approx(0.04, rel=1e-9)
    hw = 0.2 * np.sqrt(3)
    assert distribution_moment(dist, 4) == pytest.approx(hw**4 / 5, rel=1e-9)


def test_moment_noncentered_normal_quadrature():
    dist = AngleDistribution("normal", 0.03, 0.05)
    # oracle: binomial expansion with standard normal moments
    mu, s = 0.03, 0.05
    want = mu**4 + 6 * mu**2 * s**2 + 3 * s**4
    assert distribution_moment(dist, 4) == pytest.approx(want, rel=1e-9)


def test_cutoff_respected_and_moments_shrink():
    dist = AngleDistribution("normal", 0.0, 0.1, cutoff=0.1)
    gen = np.random.default_rng(1)
    draws = dist.draw(gen, 20_000)
    assert np.max(np.abs(draws)) <= 0.1
    m2 = distribution_moment(dist, 2)
    assert m2 < 0.01  # truncation reduces the variance
    assert np.mean(draws**2) == pytest.approx(m2, rel=0.05)


def test_empirical_moments_match_quadrature():
    gen = np.random.default_rng(42)
    dist = AngleDistribution("normal", 0.0, 0.1)
    draws = dist.draw(gen, 1_000_000)
    for k in (2, 4, 6):
        want = distribution_moment(dist, k)
        got = float(np.mean(draws**k))
        se = float(np.std(draws**k) / np.sqrt(draws.size))
        assert abs(got - want) < 5 * se


def test_parse_tokens():
    comp = parse_noise_token("ln:x:normal:0:0.1")
    assert isinstance(comp, LocalHamiltonian) and comp.dist.std == 0.1
    comp = parse_noise_token("gn:x:const:0.05")
    assert isinstance(comp, GlobalHamiltonian) and comp.dist.mean == 0.05
    comp = parse_noise_token("tc:x:global:beta=1:normal:0:0.1")
    assert isinstance(comp, TimeCorrelated) and comp.beta == 1.0 and comp.spatial == "global"
    comp = parse_noise_token("disc:z:p=0.0025")
    assert isinstance(comp, DiscretePauli) and comp.p == 0.0025
    model = parse_noise_spec("gn:x:const:0.05+disc:z:p=0.01")
    assert len(model.components) == 2
    assert parse_noise_spec("none").components == ()
    dist = parse_distribution_token("normal:0:0.1:cut=0.2")
    assert dist.cutoff == 0.2


@pytest.mark.parametrize(
    "bad",
    [
        "ln:y:normal:0:0.1",
        "gn:x:normal:0",
        "tc:x:diagonal:beta=1:const:0.1",
        "tc:x:global:b=1:const:0.1",
        "disc:x:0.1",
        "foo:x:const:0.1",
        "disc:x:p=1.5",
        "tc:x:local:beta=2:const:0.1",
    ],
)
def test_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_noise_spec(bad)


def test_duplicate_component_rejected():
    with pytest.raises(ValueError):
        parse_noise_spec("disc:x:p=0.1+disc:x:p=0.2")


def test_constant_global_angles_equal():
    model = parse_noise_spec("gn:x:const:0.05")
    rng = np.random.default_rng(0)
    state = init_process(model, 4, rng)
    sample = sample_cycle(model, state, 0, 4, rng)
    assert np.allclose(sample.x_angles, 0.05)
    assert not sample.z_angles.any() and not sample.x_flips.any()


def test_discrete_p_zero_never_flips():
    model = parse_noise_spec("disc:x:p=0")
    rng = np.random.default_rng(0)
    state = init_process(model, 3, rng)
    for c in range(200):
        assert not sample_cycle(model, state, c, 3, rng).x_flips.any()


def test_local_normal_sample_variance():
    model = parse_noise_spec("ln:x:normal:0:0.1")
    rng = np.random.default_rng(10)
    state = init_process(model, 1, rng)
    draws = np.array([sample_cycle(model, state, c, 1, rng).x_angles[0] for c in range(100_000)])
    var = draws.var()
    se = 0.01 * np.sqrt(2.0 / draws.size)  # var estimator sd for normal data
    assert abs(var - 0.01) < 3 * se


def test_ar1_beta_one_is_frozen():
    model = parse_noise_spec("tc:x:global:beta=1:normal:0:0.1")
    rng = np.random.default_rng(3)
    state = init_process(model, 5, rng)
    first = sample_cycle(model, state, 0, 5, rng).x_angles.copy()
    assert np.allclose(first, first[0])  # spatially global
    for c in range(1, 50):
        assert np.allclose(sample_cycle(model, state, c, 5, rng).x_angles, first)


def test_ar1_beta_zero_is_iid():
    model = parse_noise_spec("tc:x:local:beta=0:normal:0:0.1")
    rng = np.random.default_rng(4)
    state = init_process(model, 1, rng)
    draws = np.array([sample_cycle(model, state, c, 1, rng).x_angles[0] for c in range(50_000)])
    # lag-1 autocorrelation vanishes for beta=0
    corr = np.corrcoef(draws[:-1], draws[1:])[0, 1]
    assert abs(corr) < 5.0 / np.sqrt(draws.size)
    assert abs(draws.std() - 0.1) < 0.002


def test_ar1_stationary_std():
    # AR(1) with sqrt-weights has stationary std equal to the innovation std
    model = parse_noise_spec("tc:x:local:beta=0.5:normal:0:0.1")
    rng = np.random.default_rng(5)
    state = init_process(model, 1, rng)
    draws = np.array([sample_cycle(model, state, c, 1, rng).x_angles[0] for c in range(100_000)])
    a = np.sqrt(0.5)  # lag-1 correlation
    n_eff = draws.size * (1 - a) / (1 + a)
    se = 0.1 / np.sqrt(2 * n_eff)
    assert abs(draws.std() - 0.1) < 3 * se
    corr = np.corrcoef(draws[:-1], draws[1:])[0, 1]
    assert corr == pytest.approx(a, abs=0.02)


def test_ar1_stationary_mean_with_bias():
    beta, mu = 0.25, 0.2
    model = NoiseModel(
        (TimeCorrelated("x", "global", beta, AngleDistribution("normal", mu, 0.05)),)
    )
    rng = np.random.default_rng(6)
    state = init_process(model, 1, rng)
    want_mean = np.sqrt(1 - beta) * mu / (1 - np.sqrt(beta))
    draws = np.array([sample_cycle(model, state, c, 1, rng).x_angles[0] for c in range(50_000)])
    assert draws.mean() == pytest.approx(want_mean, rel=0.02)


def test_same_seed_bit_identical():
    model = parse_noise_spec("ln:x:normal:0:0.1+disc:z:p=0.3")

    def draw():
        gen = np.random.Generator(np.random.Philox(key=np.uint64(99)))
        return draw_trajectory_noise(model, 4, 50, gen)

    a, b = draw(), draw()
    assert np.array_equal(a.x_angles, b.x_angles)
    assert np.array_equal(a.z_flip_masks, b.z_flip_masks)


def test_trajectory_blocks_match_model_shape():
    model = parse_noise_spec("gn:z:normal:0:0.2+disc:x:p=0.5")
    gen = np.random.default_rng(8)
    blocks = draw_trajectory_noise(model, 3, 20, gen)
    assert blocks.x_angles is None
    assert blocks.z_angles.shape == (20, 3)
    # global component: one angle per cycle shared across qubits
    assert np.allclose(blocks.z_angles, blocks.z_angles[:, :1])
    assert blocks.x_flip_masks.shape == (20,)
    sample = blocks.cycle_sample(0, 3)
    assert sample.z_angles.shape == (3,)
    assert set(sample.x_flips) <= {0, 1}
