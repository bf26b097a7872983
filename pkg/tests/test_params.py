import json

import numpy as np
import pytest

from fraclimit import (
    CrossSection,
    FieldSpec,
    ModelParams,
    constant_sigma,
    from_config,
    load_config,
    perturbed_sigma,
    validate,
)
from fraclimit.errors import (
    AlphaOutOfRange,
    CrossSectionBoundsViolated,
    EmptyEpsilonSchedule,
    NonPositiveDomain,
)
from fraclimit.params import with_seed


def test_defaults_validate():
    p = validate(ModelParams())
    assert p.alpha == 1.5
    assert p.vmax == pytest.approx(10.0 / 0.05)


@pytest.mark.parametrize("alpha", [0.5, 0.99, 2.0, 2.5])
def test_alpha_range(alpha):
    with pytest.raises(AlphaOutOfRange):
        validate(ModelParams(alpha=alpha))


def test_epsilon_schedule_checks():
    with pytest.raises(EmptyEpsilonSchedule):
        validate(ModelParams(epsilon_schedule=()))
    with pytest.raises(EmptyEpsilonSchedule):
        validate(ModelParams(epsilon_schedule=(0.1, 0.2)))
    with pytest.raises(EmptyEpsilonSchedule):
        validate(ModelParams(epsilon_schedule=(0.2, -0.1)))


def test_domain_checks():
    with pytest.raises(NonPositiveDomain):
        validate(ModelParams(domain_length=0.0))
    with pytest.raises(NonPositiveDomain):
        validate(ModelParams(final_time=-1.0))


def test_cross_section_bounds():
    # nu1 = nu0 - |a| must stay positive
    with pytest.raises(CrossSectionBoundsViolated):
        validate(ModelParams(cross_section=perturbed_sigma(1.0, 1.5)))
    cs = perturbed_sigma(1.0, 0.5)
    assert cs.nu1 == 0.5 and cs.nu2 == 1.5
    v = np.linspace(-50, 50, 101)
    s = cs.sigma(v[:, None], v[None, :])
    assert np.all(s >= cs.nu1) and np.all(s <= cs.nu2)
    assert np.allclose(s, s.T)  # symmetric
    # |sigma - nu0| <= |a| / (1+|v|)
    assert np.all(np.abs(s - 1.0) <= 0.5 / (1.0 + np.abs(v))[:, None] + 1e-15)


def test_constant_sigma_is_flat():
    cs = constant_sigma(2.0)
    assert np.all(cs.sigma(np.array([0.0, 5.0]), np.array([1.0, -3.0])) == 2.0)
    assert cs.nu1 == cs.nu2 == 2.0


def test_field_spec():
    L = 2 * np.pi
    x = np.linspace(0, L, 7)
    zero = FieldSpec("zero")
    assert np.all(zero(x, L) == 0.0) and zero.sup == 0.0
    const = FieldSpec("constant", 0.5)
    assert np.all(const(x, L) == 0.5) and const.is_constant
    sin = FieldSpec("sinusoidal", 1.0, 2)
    assert not sin.is_constant
    assert sin(x, L) == pytest.approx(np.sin(2 * x), abs=1e-12)
    assert sin.dx(x, L) == pytest.approx(2 * np.cos(2 * x), abs=1e-12)


def test_from_config_round_trip(tmp_path):
    cfg = {
        "alpha": 1.25,
        "dim": 1,
        "cross_section": {"kind": "PerturbedConstant", "nu0": 1.0, "amplitude": 0.25},
        "field": {"kind": "constant", "e0": 0.5},
        "domain_length": 6.0,
        "final_time": 0.25,
        "epsilon_schedule": [0.2, 0.1],
        "seed": 7,
        "particles": 1000,
        "velocity_grid": {"nodes": 96, "vmax_over_inv_eps": 5.0},
        "x_bins": 16,
        "time_step_macro": 0.01,
    }
    p = from_config(cfg)
    assert p.cross_section.kind == "perturbed"
    assert p.field_spec.e0 == 0.5
    assert p.vmax == pytest.approx(50.0)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    assert load_config(path) == p


def test_with_seed():
    p = ModelParams(seed=0)
    q = with_seed(p, 42)
    assert q.seed == 42 and p.seed == 0
    assert q.alpha == p.alpha
