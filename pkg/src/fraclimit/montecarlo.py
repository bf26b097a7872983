"""Event-driven Monte Carlo for the scaled kinetic equation.

Per particle: free flight with drift E/eps, collision candidates from a
Poisson clock with the majorant rate nu2/eps^alpha, thinning acceptance
nu(v)/nu2, post-collision velocity from the gain kernel.  Counter-based
(Philox) streams keyed by (seed, partition) make runs bitwise reproducible
for a fixed partition count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import NonMonotoneTime
from .macro import MacroState
from .params import CrossSection, FieldSpec, ModelParams
from .velocity import eval_M


def _rng_for(seed: int, partition: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.random.SeedSequence([seed, partition]).generate_state(2, np.uint64)))


def sample_M(rng: np.random.Generator, alpha: float, size=None):
    """Exact equilibrium sample: v = Z / sqrt(W), Z normal, W chi-square(alpha).

    (M is the Student-t(alpha) density contracted by sqrt(alpha): the t
    variate is Z/sqrt(W/alpha), and dividing by sqrt(alpha) gives Z/sqrt(W).)
    """
    z = rng.standard_normal(size)
    w = rng.chisquare(alpha, size)
    return z / np.sqrt(w)


def M_cdf(v, alpha: float):
    """Analytic CDF of M via the Student-t distribution."""
    from scipy.stats import t as student_t

    return student_t.cdf(np.sqrt(alpha) * np.asarray(v, dtype=float), df=alpha)


def nu_continuum(cross_section: CrossSection, alpha: float):
    """Continuum collision frequency nu(v) = int sigma(v',v) M(v') dv' as a callable."""
    if cross_section.kind == "constant":
        nu0 = cross_section.nu0
        return lambda v: np.full_like(np.asarray(v, dtype=float), nu0)
    i1, _ = quad(lambda u: eval_M(u, alpha) / (1.0 + abs(u)), -np.inf, np.inf)
    nu0, a = cross_section.nu0, cross_section.amplitude

    def nu(v):
        return nu0 + a * i1 / (1.0 + np.abs(np.asarray(v, dtype=float)))

    return nu


@dataclass
class ParticleEnsemble:
    x: np.ndarray
    v: np.ndarray
    L: float
    t: float
    seed: int
    n_partitions: int
    rngs: tuple = field(repr=False, default=())
    collisions: int = 0

    @property
    def N(self) -> int:
        return len(self.x)

    def partitions(self):
        edges = np.linspace(0, self.N, self.n_partitions + 1).astype(int)
        return [slice(a, b) for a, b in zip(edges[:-1], edges[1:])]


def init_ensemble(
    N: int,
    L: float,
    alpha: float,
    seed: int,
    rho_init=None,
    n_partitions: int = 1,
) -> ParticleEnsemble:
    """Well-prepared data: x from rho_init (uniform if None), v from M."""
    rngs = tuple(_rng_for(seed, p) for p in range(n_partitions))
    xs, vs = [], []
    if rho_init is not None:
        # inverse-CDF table of the initial density
        xe = np.linspace(0.0, L, 4097)
        pdf = np.maximum(rho_init(xe), 0.0)
        cdf = np.concatenate([[0.0], np.cumsum((pdf[1:] + pdf[:-1]) / 2 * np.diff(xe))])
        cdf /= cdf[-1]
    edges = np.linspace(0, N, n_partitions + 1).astype(int)
    for p, rng in enumerate(rngs):
        n_p = edges[p + 1] - edges[p]
        u = rng.random(n_p)
        if rho_init is None:
            xs.append(u * L)
        else:
            xs.append(np.interp(u, cdf, xe))
        vs.append(sample_M(rng, alpha, n_p))
    return ParticleEnsemble(
        np.concatenate(xs), np.concatenate(vs), L, 0.0, seed, n_partitions, rngs
    )


def _flight(x, v, E_of_x, L, dt, eps, alpha, scaling, field_constant):
    """Advance positions/velocities by dt of free flight with frozen field.

    Diffusive scaling: dx/dt = eps^(1-alpha) v, dv/dt = E/eps.
    High-field scaling: dx/dt = v, dv/dt = E/eps.
    x-dependent fields are frozen per substep with |dx| <= L/64.
    """
    xfac = eps ** (1.0 - alpha) if scaling == "diffusive" else 1.0
    remaining = np.full_like(x, dt) if np.ndim(dt) == 0 else dt.copy()
    while True:
        act = remaining > 0
        if not act.any():
            break
        E = E_of_x(x[act])
        if field_constant:
            s = remaining[act]
        else:
            # bound |dx| per substep; dx ~ xfac*(v s + E s^2/(2 eps))
            vmag = np.abs(v[act]) + np.abs(E) + 1e-30
            cap = (L / 64.0) / (xfac * vmag)
            s = np.minimum(remaining[act], cap)
        x[act] = x[act] + xfac * (v[act] * s + E * s**2 / (2.0 * eps))
        v[act] = v[act] + (E / eps) * s
        remaining[act] -= s
        if field_constant:
            break
    np.mod(x, L, out=x)


def advance(
    ens: ParticleEnsemble,
    eps: float,
    params: ModelParams,
    field: FieldSpec,
    until: float,
    scaling: str = "diffusive",
    collisions_off: bool = False,
) -> ParticleEnsemble:
    """Advance the ensemble to t=until (macroscopic time)."""
    if until < ens.t - 1e-15:
        raise NonMonotoneTime(f"until={until} < current t={ens.t}")
    cs = params.cross_section
    alpha = params.alpha
    nu2 = cs.nu2
    rate = nu2 / eps**alpha if scaling == "diffusive" else nu2 / eps
    nu_fun = nu_continuum(cs, alpha)
    field_constant = field.is_constant
    E_of_x = lambda xx: field(xx, ens.L)
    n_coll = ens.collisions
    for p, sl in zip(range(ens.n_partitions), ens.partitions()):
        rng = ens.rngs[p]
        x = ens.x[sl]
        v = ens.v[sl]
        t = np.full(len(x), ens.t)
        alive = np.ones(len(x), dtype=bool)
        while alive.any():
            idx = np.nonzero(alive)[0]
            if collisions_off:
                dt = until - t[idx]
                hit = np.zeros(len(idx), dtype=bool)
            else:
                cand = rng.exponential(1.0 / rate, len(idx))
                dt = np.minimum(cand, until - t[idx])
                hit = cand <= until - t[idx]
            xi = x[idx]
            vi = v[idx]
            _flight(xi, vi, E_of_x, ens.L, dt, eps, alpha, scaling, field_constant)
            x[idx] = xi
            v[idx] = vi
            t[idx] += dt
            if hit.any():
                h = idx[hit]
                u = rng.random(len(h))
                acc = u < np.asarray(nu_fun(v[h])) / nu2
                ha = h[acc]
                if len(ha):
                    if cs.kind == "constant":
                        v[ha] = sample_M(rng, alpha, len(ha))
                    else:
                        # gain kernel sigma(w, v) M(w)/nu(v): rejection against
                        # M with acceptance sigma(w, v)/nu2
                        pending = ha.copy()
                        while len(pending):
                            w = sample_M(rng, alpha, len(pending))
                            keep = rng.random(len(pending)) < cs.sigma(w, v[pending]) / nu2
                            v[pending[keep]] = w[keep]
                            pending = pending[~keep]
                    n_coll += len(ha)
            alive = t < until - 1e-15
        ens.x[sl] = x
        ens.v[sl] = v
    return ParticleEnsemble(
        ens.x, ens.v, ens.L, until, ens.seed, ens.n_partitions, ens.rngs, n_coll
    )


def estimate_density(ens: ParticleEnsemble, x_bins: int) -> MacroState:
    """Histogram density, normalized to unit mass."""
    counts, edges = np.histogram(ens.x, bins=x_bins, range=(0.0, ens.L))
    dx = ens.L / x_bins
    return MacroState(counts / (ens.N * dx), ens.L, ens.t, {"x_bins": x_bins})
