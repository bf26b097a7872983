import numpy as np
import pytest
from scipy.integrate import quad

from fraclimit import (
    VelocityProfile,
    build_grid,
    equilibrium_profile,
    eval_M,
    moment,
    norm_Z,
    tail_gamma,
)
from fraclimit.equilibrium import eval_M_deriv
from fraclimit.errors import GridMismatch, NonPositiveExtent, OddNodeCount


def test_build_grid_validation():
    with pytest.raises(OddNodeCount):
        build_grid(100, 50.0)  # not a multiple of 32
    with pytest.raises(OddNodeCount):
        build_grid(-64, 50.0)
    with pytest.raises(NonPositiveExtent):
        build_grid(128, -1.0)
    with pytest.raises(NonPositiveExtent):
        build_grid(128, 50.0, stretch=60.0)


def test_grid_symmetry(grid128):
    g = grid128
    assert g.n == 128
    assert np.allclose(g.nodes, -g.nodes[::-1])
    assert np.allclose(g.weights, g.weights[::-1])
    assert np.all(g.weights > 0)
    assert g.nodes[-1] < g.vmax
    with pytest.raises(ValueError):
        g.nodes[0] = 0.0  # read-only


@pytest.mark.parametrize("alpha", [1.0, 1.5, 1.75])
def test_equilibrium_mass(grid128, alpha):
    m = equilibrium_profile(grid128, alpha)
    # tail-corrected mass matches the analytic normalization
    assert moment(m, 0) == pytest.approx(1.0, abs=1e-8)
    # plain grid sum misses the analytic tail mass (tau is first order in
    # vmax^-alpha; the next term is O(vmax^-alpha-2))
    tau = 2.0 * tail_gamma(alpha) * grid128.vmax ** (-alpha) / alpha
    assert moment(m, 0, tail=False) == pytest.approx(1.0 - tau, abs=1e-7)


def test_odd_moment_vanishes(grid128):
    m = equilibrium_profile(grid128, 1.5)
    assert abs(moment(m, 1)) < 1e-12


def test_moment_against_adaptive_quadrature(grid128):
    # int |v|^(1/2) M dv = 1 exactly for alpha = 3/2 (Beta-function identity);
    # the |v|^(1/2) kink at v=0 limits the inner panel to algebraic accuracy
    alpha = 1.5
    m = equilibrium_profile(grid128, alpha)
    ref, _ = quad(lambda v: abs(v) ** 0.5 * eval_M(v, alpha), 0, np.inf, limit=200)
    assert 2.0 * ref == pytest.approx(1.0, rel=1e-9)
    assert moment(m, 0.5) == pytest.approx(1.0, rel=1e-4)


def test_moment_richardson():
    # halving the resolution changes tail-corrected moments below 1e-6
    vals = []
    for n in (128, 256):
        g = build_grid(n, 200.0)
        vals.append(moment(equilibrium_profile(g, 1.5), 0.5))
    assert abs(vals[1] - vals[0]) < 1e-6


def test_interp_exact_at_nodes(grid128):
    m = eval_M(grid128.nodes, 1.5)
    assert np.array_equal(grid128.interp(m, grid128.nodes), m)


def test_interp_off_node(grid128):
    m = eval_M(grid128.nodes, 1.5)
    x = np.linspace(-150, 150, 1001)
    assert np.max(np.abs(grid128.interp(m, x) - eval_M(x, 1.5))) < 1e-9
    # scalar in, scalar out
    assert np.ndim(grid128.interp(m, 0.37)) == 0


def test_interp_power_law_tail(grid128):
    m = eval_M(grid128.nodes, 1.5)
    for x in (250.0, -400.0, 2.0 * grid128.vmax):
        assert grid128.interp(m, x) == pytest.approx(eval_M(x, 1.5), rel=1e-3)


def test_spectral_derivative(grid128):
    m = eval_M(grid128.nodes, 1.5)
    d = grid128.deriv(m)
    assert np.max(np.abs(d - eval_M_deriv(grid128.nodes, 1.5))) < 1e-7


def test_antiderivative(grid128):
    m = eval_M(grid128.nodes, 1.5)
    n2 = grid128.n // 2
    _, edge_cum = grid128.antideriv_pos(m[n2:])
    half_mass = float(np.sum(grid128.weights[n2:] * m[n2:]))
    assert edge_cum[-1] == pytest.approx(half_mass, abs=1e-11)


def test_profile_algebra(grid128):
    a = equilibrium_profile(grid128, 1.5)
    b = 2.0 * a
    assert np.allclose((b - a).values, a.values)
    assert np.allclose((a + a).values, b.values)
    other = build_grid(160, 200.0)
    with pytest.raises(GridMismatch):
        a + equilibrium_profile(other, 1.5)
    with pytest.raises(GridMismatch):
        VelocityProfile(grid128, np.full(grid128.n, np.nan))
    with pytest.raises(GridMismatch):
        VelocityProfile(grid128, np.zeros(3))


def test_profile_call_and_csv(grid128, tmp_path):
    m = equilibrium_profile(grid128, 1.5)
    assert m(0.5) == pytest.approx(eval_M(0.5, 1.5), rel=1e-10)
    path = tmp_path / "m.csv"
    m.to_csv(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (grid128.n, 2)
    assert np.allclose(data[:, 1], m.values)


def test_callable_weight(grid128):
    m = equilibrium_profile(grid128, 1.5)
    got = moment(m, lambda v: np.exp(-(v**2)))
    ref, _ = quad(lambda v: np.exp(-(v**2)) * eval_M(v, 1.5), -np.inf, np.inf)
    assert got == pytest.approx(ref, rel=1e-8)


def test_norm_Z_value():
    # alpha = 1 is the Cauchy density: Z = pi
    assert norm_Z(1.0) == pytest.approx(np.pi, rel=1e-14)
    assert tail_gamma(1.0) == pytest.approx(1.0 / np.pi, rel=1e-14)
