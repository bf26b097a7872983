import numpy as np
import pytest
from scipy import stats

from fraclimit import (
    M_cdf,
    ModelParams,
    advance,
    constant_sigma,
    estimate_density,
    init_ensemble,
    nu_continuum,
    perturbed_sigma,
    sample_M,
)
from fraclimit.montecarlo import _rng_for
from fraclimit.params import FieldSpec
from fraclimit.errors import NonMonotoneTime

L = 4 * np.pi


def _params(**kw):
    base = dict(
        alpha=1.5,
        cross_section=constant_sigma(1.0),
        field_spec=FieldSpec("zero"),
        domain_length=L,
        final_time=0.5,
        epsilon_schedule=(0.2, 0.1),
        seed=3,
        particles=20_000,
    )
    base.update(kw)
    return ModelParams(**base)


def test_sample_M_distribution():
    rng = _rng_for(0, 0)
    for alpha in (1.0, 1.5):
        v = sample_M(rng, alpha, 200_000)
        ks = stats.kstest(v, lambda q: M_cdf(q, alpha)).statistic
        assert ks < 0.005
        # tail frequency matches the analytic tail mass
        from fraclimit import tail_gamma

        thresh = 25.0
        expect = 2 * tail_gamma(alpha) * thresh ** (-alpha) / alpha
        got = np.mean(np.abs(v) > thresh)
        assert got == pytest.approx(expect, rel=0.15)


def test_bitwise_reproducibility():
    p = _params()
    runs = []
    for _ in range(2):
        ens = init_ensemble(p.particles, L, p.alpha, p.seed, n_partitions=4)
        ens = advance(ens, 0.1, p, p.field_spec, 0.2)
        runs.append((ens.x.copy(), ens.v.copy(), ens.collisions))
    assert np.array_equal(runs[0][0], runs[1][0])
    assert np.array_equal(runs[0][1], runs[1][1])
    assert runs[0][2] == runs[1][2]


def test_seed_changes_stream():
    a = init_ensemble(1000, L, 1.5, 1)
    b = init_ensemble(1000, L, 1.5, 2)
    assert not np.array_equal(a.v, b.v)


def test_ballistic_characteristics_exact():
    # collisions off, constant field: quadratic-in-time flight, no error
    p = _params(field_spec=FieldSpec("constant", 0.5))
    eps, T = 0.1, 0.3
    ens = init_ensemble(2000, L, p.alpha, p.seed)
    x0, v0 = ens.x.copy(), ens.v.copy()
    out = advance(ens, eps, p, p.field_spec, T, collisions_off=True)
    xf = eps ** (1 - p.alpha)
    expect_x = np.mod(x0 + xf * (v0 * T + 0.5 * 0.5 * T**2 / eps), L)
    expect_v = v0 + 0.5 * T / eps
    assert np.max(np.abs(out.x - expect_x)) < 1e-10
    assert np.max(np.abs(out.v - expect_v)) < 1e-12


def test_collision_count_rate():
    # constant sigma: expected nu0 * T / eps^alpha collisions per particle
    p = _params(particles=20_000)
    eps, T = 0.2, 0.5
    ens = init_ensemble(p.particles, L, p.alpha, p.seed)
    out = advance(ens, eps, p, p.field_spec, T)
    expect = p.particles * T / eps**p.alpha
    assert out.collisions == pytest.approx(expect, rel=0.02)


def test_high_field_rate():
    p = _params()
    eps, T = 0.2, 0.5
    ens = init_ensemble(p.particles, L, p.alpha, p.seed)
    out = advance(ens, eps, p, p.field_spec, T, scaling="high_field")
    assert out.collisions == pytest.approx(p.particles * T / eps, rel=0.03)


def test_time_monotonicity_guard():
    p = _params()
    ens = init_ensemble(100, L, p.alpha, p.seed)
    ens = advance(ens, 0.2, p, p.field_spec, 0.3)
    with pytest.raises(NonMonotoneTime):
        advance(ens, 0.2, p, p.field_spec, 0.1)


def test_estimate_density_mass():
    ens = init_ensemble(5000, L, 1.5, 0)
    dens = estimate_density(ens, 32)
    assert dens.mass == pytest.approx(1.0, abs=1e-12)
    assert dens.n == 32


def test_init_from_density():
    rho = lambda x: (1.0 + np.cos(2 * np.pi * x / L)) / L
    ens = init_ensemble(200_000, L, 1.5, 5, rho_init=rho)
    dens = estimate_density(ens, 16)
    centers = dens.x + dens.dx / 2
    assert np.max(np.abs(dens.rho - rho(centers))) < 0.01


def test_nu_continuum_bounds():
    cs = perturbed_sigma(1.0, 0.5)
    nu = nu_continuum(cs, 1.5)
    v = np.linspace(-100, 100, 401)
    vals = nu(v)
    assert np.all(vals > cs.nu1) and np.all(vals < cs.nu2)
    assert nu(0.0) > nu(50.0)  # perturbation decays in |v|
    flat = nu_continuum(constant_sigma(2.0), 1.5)
    assert np.all(flat(v) == 2.0)


def test_perturbed_collisions_relax_to_M():
    # thinning + kernel rejection must still equilibrate the velocity marginal
    p = _params(cross_section=perturbed_sigma(1.0, 0.5), particles=100_000)
    ens = init_ensemble(p.particles, L, p.alpha, p.seed)
    out = advance(ens, 0.2, p, p.field_spec, 0.5)
    ks = stats.kstest(out.v, lambda q: M_cdf(q, p.alpha)).statistic
    assert ks < 0.01
