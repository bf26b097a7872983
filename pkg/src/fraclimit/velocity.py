"""Heavy-tail-aware quadrature on the velocity line.

The equilibrium M(v) = Z^-1 (1+v^2)^(-(1+alpha)/2) decays only polynomially,
so the grid is a symmetric composite of Gauss-Legendre panels: one linear
panel [0, inner] and geometrically log-spaced panels out to vmax, mirrored to
v < 0.  Moments of profiles with power-law tails get an analytic closed-form
correction from a per-side two-term tail fit c|v|^-q (1 + b v^-2).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import AlphaOutOfRange, GridMismatch, NonPositiveExtent, OddNodeCount

# points per Gauss-Legendre panel; fixed (panel count scales with n_nodes)
PANEL_PTS = 16

_XG, _WG = np.polynomial.legendre.leggauss(PANEL_PTS)


def _bary_weights(x: np.ndarray) -> np.ndarray:
    w = np.ones(len(x))
    for j in range(len(x)):
        w[j] = 1.0 / np.prod(x[j] - np.delete(x, j))
    return w


_BW = _bary_weights(_XG)


def _diff_matrix(x: np.ndarray, bw: np.ndarray) -> np.ndarray:
    n = len(x)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                d[i, j] = (bw[j] / bw[i]) / (x[i] - x[j])
        d[i, i] = -np.sum(d[i])
    return d


_DM = _diff_matrix(_XG, _BW)


def _cumulative_matrices(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # C[i, :] integrates the interpolant from -1 to x_i; the row F integrates
    # over the full panel.  Vandermonde route is fine at 16 points.
    n = len(x)
    vand = np.vander(x, n, increasing=True)
    vinv = np.linalg.inv(vand)
    prim = np.empty((n, n))
    for k in range(n):
        prim[:, k] = (x ** (k + 1) - (-1.0) ** (k + 1)) / (k + 1)
    full = np.array([2.0 / (k + 1) if k % 2 == 0 else 0.0 for k in range(n)])
    return prim @ vinv, full @ vinv


_CM, _FR = _cumulative_matrices(_XG)


def eval_M(v, alpha: float):
    """Equilibrium density Z^-1 (1+v^2)^(-(1+alpha)/2), normalized on the line."""
    if not 1.0 <= alpha < 2.0:
        raise AlphaOutOfRange(f"alpha={alpha} outside [1,2)")
    return (1.0 + np.asarray(v, dtype=float) ** 2) ** (-(1.0 + alpha) / 2.0) / norm_Z(alpha)


def norm_Z(alpha: float) -> float:
    """Normalization constant of (1+v^2)^(-(1+alpha)/2) on the line."""
    return math.sqrt(math.pi) * math.gamma(alpha / 2.0) / math.gamma((1.0 + alpha) / 2.0)


def tail_gamma(alpha: float) -> float:
    """Tail constant: |v|^(1+alpha) M(v) -> gamma."""
    return 1.0 / norm_Z(alpha)


class VelocityGrid:
    """Symmetric composite Gauss-Legendre quadrature on [-vmax, vmax].

    Attributes are read-only by convention; grids are shared freely.
    """

    def __init__(self, n_nodes: int, vmax: float, inner: float = 1.0):
        if n_nodes <= 0 or n_nodes % (2 * PANEL_PTS) != 0:
            raise OddNodeCount(
                f"n_nodes={n_nodes} must be a positive multiple of {2 * PANEL_PTS}"
            )
        if vmax <= 0:
            raise NonPositiveExtent(f"vmax={vmax} must be positive")
        if not 0 < inner < vmax:
            raise NonPositiveExtent(f"inner={inner} must lie in (0, vmax)")
        half = n_nodes // 2
        K = half // PANEL_PTS
        if K < 2:
            raise OddNodeCount("need at least two panels per side")
        self.n = n_nodes
        self.vmax = float(vmax)
        self.inner = float(inner)
        self.K = K
        # panel edges on the positive side: linear panel then geometric growth
        self.edges = np.concatenate(
            [[0.0], inner * (vmax / inner) ** (np.arange(K) / (K - 1))]
        )
        self.logpanel = [False] + [True] * (K - 1)
        nodes, wts = [], []
        for a, b, lp in zip(self.edges[:-1], self.edges[1:], self.logpanel):
            if not lp:
                c, h = (a + b) / 2, (b - a) / 2
                nodes.append(c + h * _XG)
                wts.append(h * _WG)
            else:
                ua, ub = np.log(a), np.log(b)
                c, h = (ua + ub) / 2, (ub - ua) / 2
                u = c + h * _XG
                nodes.append(np.exp(u))
                wts.append(h * _WG * np.exp(u))
        vp = np.concatenate(nodes)
        wp = np.concatenate(wts)
        self.nodes = np.concatenate([-vp[::-1], vp])
        self.weights = np.concatenate([wp[::-1], wp])
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    # -- panel helpers -----------------------------------------------------

    def _panel_coord(self, k: int, av: np.ndarray) -> np.ndarray:
        a, b = self.edges[k], self.edges[k + 1]
        if not self.logpanel[k]:
            return (av - (a + b) / 2) / ((b - a) / 2)
        la, lb = np.log(a), np.log(b)
        return (np.log(av) - (la + lb) / 2) / ((lb - la) / 2)

    def interp(self, values: np.ndarray, x) -> np.ndarray:
        """Barycentric interpolation of nodal values, power-law tails beyond vmax."""
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        ax = np.abs(x)
        neg = x < 0
        out = np.empty(len(x))
        n2 = self.n // 2
        fr = values[n2:]
        fl = values[:n2][::-1]  # left side as a function of |v|
        inside = ax <= self.vmax
        pidx = np.clip(np.searchsorted(self.edges, ax, side="right") - 1, 0, self.K - 1)
        for k in range(self.K):
            m = inside & (pidx == k)
            if not m.any():
                continue
            t = self._panel_coord(k, ax[m])
            d = t[:, None] - _XG[None, :]
            exact = np.abs(d) < 1e-14
            wd = _BW[None, :] / np.where(exact, 1.0, d)
            sl = slice(k * PANEL_PTS, (k + 1) * PANEL_PTS)
            denom = wd.sum(axis=1)
            vr = (wd @ fr[sl]) / denom
            vl = (wd @ fl[sl]) / denom
            if exact.any():
                hit = exact.any(axis=1)
                idx = np.argmax(exact, axis=1)
                vr[hit] = fr[sl][idx[hit]]
                vl[hit] = fl[sl][idx[hit]]
            out[m] = np.where(neg[m], vl, vr)
        to = ~inside
        if to.any():
            cr, qr, br, sr = _side_tail(self.nodes[-3:], values[-3:])
            cl, ql, bl, sl_ = _side_tail(-self.nodes[:3][::-1], values[:3][::-1])
            right = sr * cr * ax[to] ** -qr * (1 + br * ax[to] ** -2)
            left = sl_ * cl * ax[to] ** -ql * (1 + bl * ax[to] ** -2)
            out[to] = np.where(neg[to], left, right)
        return out[0] if scalar else out

    def deriv(self, values: np.ndarray) -> np.ndarray:
        """Per-panel spectral derivative d/dv of nodal values."""
        n2 = self.n // 2
        out = np.empty_like(values, dtype=float)
        fr = values[n2:]
        fl = values[:n2][::-1]
        for k in range(self.K):
            a, b = self.edges[k], self.edges[k + 1]
            sl = slice(k * PANEL_PTS, (k + 1) * PANEL_PTS)
            if not self.logpanel[k]:
                h = (b - a) / 2
                dr = _DM @ fr[sl] / h
                dl = _DM @ fl[sl] / h
            else:
                h = (np.log(b) - np.log(a)) / 2
                vv = self.nodes[n2:][sl]
                dr = (_DM @ fr[sl]) / (h * vv)
                dl = (_DM @ fl[sl]) / (h * vv)
            out[n2 + k * PANEL_PTS : n2 + (k + 1) * PANEL_PTS] = dr
            # left side: f(v) = fl(|v|), so df/dv = -fl'(|v|), reversed back
            out[n2 - (k + 1) * PANEL_PTS : n2 - k * PANEL_PTS] = (-dl)[::-1]
        return out

    def antideriv_pos(self, fpos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """N(v) = int_0^v f on the positive side (nodal values, panel-edge cumsums)."""
        n2 = self.n // 2
        vals = np.empty(n2)
        edge = 0.0
        edge_cum = [0.0]
        for k in range(self.K):
            a, b = self.edges[k], self.edges[k + 1]
            sl = slice(k * PANEL_PTS, (k + 1) * PANEL_PTS)
            if not self.logpanel[k]:
                h = (b - a) / 2
                loc = _CM @ fpos[sl] * h
                tot = _FR @ fpos[sl] * h
            else:
                h = (np.log(b) - np.log(a)) / 2
                vv = self.nodes[n2:][sl]
                loc = _CM @ (fpos[sl] * vv) * h
                tot = _FR @ (fpos[sl] * vv) * h
            vals[sl] = edge + loc
            edge = edge + tot
            edge_cum.append(edge)
        return vals, np.array(edge_cum)

    def __eq__(self, other) -> bool:
        return self is other or (
            isinstance(other, VelocityGrid)
            and self.n == other.n
            and self.vmax == other.vmax
            and self.inner == other.inner
        )

    def __hash__(self):
        return hash((self.n, self.vmax, self.inner))

    def __repr__(self):
        return f"VelocityGrid(n={self.n}, vmax={self.vmax}, inner={self.inner})"


def build_grid(n_nodes: int, vmax: float, stretch: float = 1.0) -> VelocityGrid:
    """Build a symmetric heavy-tail-aware grid.

    `stretch` is the extent of the linear inner panel; outer panels are
    geometrically spaced in |v| so node density decays like 1/|v|.
    """
    return VelocityGrid(n_nodes, vmax, inner=stretch)


class VelocityProfile:
    """Values of a function of v on a VelocityGrid."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: VelocityGrid, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n,):
            raise GridMismatch(f"values shape {values.shape} != ({grid.n},)")
        if not np.all(np.isfinite(values)):
            raise GridMismatch("profile contains non-finite entries")
        self.grid = grid
        self.values = values

    def _check(self, other: "VelocityProfile"):
        if self.grid is not other.grid and self.grid != other.grid:
            raise GridMismatch("profiles live on different grids")

    def __add__(self, other):
        self._check(other)
        return VelocityProfile(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return VelocityProfile(self.grid, self.values - other.values)

    def __mul__(self, c: float):
        return VelocityProfile(self.grid, self.values * c)

    __rmul__ = __mul__

    def __call__(self, x):
        return self.grid.interp(self.values, x)

    def to_csv(self, path):
        arr = np.column_stack([self.grid.nodes, self.values])
        np.savetxt(path, arr, delimiter=",", header="v,value", comments="")


def equilibrium_profile(grid: VelocityGrid, alpha: float) -> VelocityProfile:
    return VelocityProfile(grid, eval_M(grid.nodes, alpha))


# -- tail machinery --------------------------------------------------------


def _tail_fit3(vv: np.ndarray, pp: np.ndarray) -> tuple[float, float, float]:
    # fit log p = log c - q log v + log(1 + b v^-2), linearized in (log c, q, b)
    A = np.column_stack([np.ones(3), -np.log(vv), vv ** -2.0])
    sol, *_ = np.linalg.lstsq(A, np.log(pp), rcond=None)
    return math.exp(sol[0]), sol[1], sol[2]


def _side_tail(vv: np.ndarray, pp: np.ndarray) -> tuple[float, float, float, float]:
    """Fit |profile| ~ c v^-q (1 + b v^-2) on one side; returns (c,q,b,sign).

    Falls back to a zero tail when the three outermost values do not have a
    common sign (profile already negligible there).
    """
    s = np.sign(pp[-1])
    if s == 0 or np.any(s * pp <= 0):
        return 0.0, 2.0, 0.0, 1.0
    c, q, b = _tail_fit3(vv, s * pp)
    return c, q, b, float(s)


def _tail_integral(c: float, q: float, b: float, p: float, vmax: float) -> float:
    """int_vmax^inf c v^(-q)(1+b v^-2) v^p dv, requiring q > p+1 for convergence."""
    if c == 0.0:
        return 0.0
    if q <= p + 1.0 + 1e-9:
        return math.inf
    return c * vmax ** (p + 1 - q) / (q - p - 1) + c * b * vmax ** (p - 1 - q) / (
        q - p + 1
    )


def tail_correction(profile: VelocityProfile, p: float, signed_power: bool) -> float:
    """Analytic |v|>vmax contribution to the moment with weight v^p or |v|^p."""
    g = profile.grid
    f = profile.values
    cr, qr, br, sr = _side_tail(g.nodes[-3:], f[-3:])
    cl, ql, bl, sl = _side_tail(-g.nodes[:3][::-1], f[:3][::-1])
    right = sr * _tail_integral(cr, qr, br, p, g.vmax)
    left = sl * _tail_integral(cl, ql, bl, p, g.vmax)
    if signed_power:
        # weight v^p with integer p: left side picks up (-1)^p
        left *= (-1.0) ** int(round(p))
    return right + left


def moment(profile: VelocityProfile, weight, tail: bool = True) -> float:
    """Quadrature moment of a profile.

    `weight` is an integer p (weight v^p; p=0 gives the mass), a float p
    (weight |v|^p), or a callable of v (no tail correction in that case).
    The power-law tail correction uses the per-side two-term fit of the
    profile's three outermost nodes.
    """
    g = profile.grid
    if callable(weight):
        return float(np.sum(g.weights * weight(g.nodes) * profile.values))
    p = weight
    signed = isinstance(p, (int, np.integer))
    wv = g.nodes ** p if signed else np.abs(g.nodes) ** float(p)
    base = float(np.sum(g.weights * wv * profile.values))
    if not tail:
        return base
    return base + tail_correction(profile, float(p), signed)
