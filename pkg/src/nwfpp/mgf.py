"""Moment generating functions M(theta) = E[exp(-theta W)] of the martingale limits.

For a live root particle of type q (lifetime X ~ Exp(1)) the limit satisfies
W_q = e^{-lam X} * (sum of the children's limits), which gives the fixed-point
system, with w = e^{-X} uniform on [0, 1],

    M_R(theta) = int_0^1 F_R(theta w^lam) dw,   F_R = M_R * exp(rho (M_B - 1))
    M_B(theta) = int_0^1 F_B(theta w^lam) dw,   F_B = M_R^2 * exp(rho (M_B - 1))

``F_q`` is the MGF of the limit when the root dies at time 0, which is the one
the graph sees; the pair (F_R, F_B) solves the same system written in terms of
F with ``M_q = int_0^1 F_q(theta w^lam) dw`` inside.  The epidemic curve uses
``F_B``.

The system is invariant under theta -> c theta, so its solutions form a
one-parameter family.  The iteration starts from exp(-theta u_q) and after each
sweep dilates the iterate back to mean u_B; without that the discretised map
drifts slowly along the family and the residual stalls near the discretisation
error.  The reported residual is that of the pinned map.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import roots_jacobi

from .theory import x_of_t


class ConvergenceError(RuntimeError):
    def __init__(self, msg, history):
        super().__init__(msg)
        self.history = history


class OutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    theta_max: float = 10.0
    grid_points: int = 512
    quad_nodes: int = 64
    tol: float = 1e-10
    max_iter: int = 200
    theta_min: float = 1e-6   # first positive grid point
    geometric_fraction: float = 0.6

    def validate(self):
        if not (self.theta_max > 1 and self.grid_points > 8 and self.quad_nodes > 0
                and self.max_iter > 0 and 0 < self.tol < 1e-6):
            raise ValueError(f"invalid solver config {self}")


@dataclass
class MGFTable:
    theta: np.ndarray
    M_R: np.ndarray
    M_B: np.ndarray
    F_R: np.ndarray
    F_B: np.ndarray
    residual: float
    history: list
    constants: object
    config: SolverConfig = field(default_factory=SolverConfig)

    def _interp(self, col):
        return PchipInterpolator(self.theta, col, extrapolate=False)

    def __call__(self, theta, which="F_B"):
        th = np.asarray(theta, dtype=float)
        if np.any(th < 0) or np.any(th > self.theta[-1]):
            raise OutOfRange(f"theta outside [0, {self.theta[-1]}]")
        return self._interp(getattr(self, which))(th)

    def mean(self, which="M_B"):
        """-M'(0+), i.e. the mean of the corresponding limit."""
        return slope_at_zero(self.theta, getattr(self, which))


def make_grid(cfg):
    n_geo = max(4, int(cfg.grid_points * cfg.geometric_fraction))
    geo = np.geomspace(cfg.theta_min, 1.0, n_geo)
    lin = np.linspace(1.0, cfg.theta_max, cfg.grid_points - n_geo)[1:]
    return np.concatenate([[0.0], geo, lin])


def quadrature(lam, nodes):
    """Nodes y and weights for int_0^1 g(w^lam) dw = int_0^1 g(y) y^{1/lam - 1} / lam dy.

    Gauss-Jacobi in y absorbs the y^{1/lam - 1} endpoint behaviour so the rule
    is exact for polynomial g.
    """
    beta = 1.0 / lam - 1.0
    x, w = roots_jacobi(nodes, 0.0, beta)
    y = 0.5 * (1.0 + x)
    w = w * 2.0 ** (-beta - 1.0) / lam
    return y, w


def slope_at_zero(theta, col, j=None):
    """-M'(0+) from two small grid points, with the O(theta) term extrapolated away."""
    if j is None:
        j = int(np.searchsorted(theta, 1e-4))
    a, b = theta[j], theta[j + 1]
    ga, gb = (1.0 - col[j]) / a, (1.0 - col[j + 1]) / b
    return (ga * b - gb * a) / (b - a)


def second_differences(theta, col):
    """Increments of consecutive secant slopes, scaled by the mean spacing.

    On a uniform grid this is the usual M[i+1] - 2 M[i] + M[i-1]; it is >= 0
    everywhere iff the piecewise-linear interpolant is convex.
    """
    h = np.diff(theta)
    slope = np.diff(col) / h
    return np.diff(slope) * 0.5 * (h[1:] + h[:-1])


def _dilate(theta, col, c):
    return PchipInterpolator(theta, col, extrapolate=True)(theta * c)


def _offspring(mr, mb, rho):
    g = np.exp(rho * (mb - 1.0))
    return mr * g, mr * mr * g


def solve(k, config=None):
    cfg = config or SolverConfig()
    cfg.validate()
    theta = make_grid(cfg)
    y, wq = quadrature(k.lam, cfg.quad_nodes)
    args = theta[:, None] * y[None, :]

    mr = np.exp(-theta * k.u_R)
    mb = np.exp(-theta * k.u_B)
    history = []
    for _ in range(cfg.max_iter):
        fr, fb = _offspring(mr, mb, k.rho)
        new_r = PchipInterpolator(theta, fr)(args) @ wq
        new_b = PchipInterpolator(theta, fb)(args) @ wq
        new_r[0] = new_b[0] = 1.0
        c = k.u_B / slope_at_zero(theta, new_b)
        new_r, new_b = _dilate(theta, new_r, c), _dilate(theta, new_b, c)
        res = max(np.max(np.abs(new_r - mr)), np.max(np.abs(new_b - mb)))
        history.append(float(res))
        mr, mb = new_r, new_b
        if not math.isfinite(res) or res > 10.0:
            raise ConvergenceError(f"iteration diverged (residual {res})", history)
        if res < cfg.tol:
            fr, fb = _offspring(mr, mb, k.rho)
            return MGFTable(theta, mr, mb, fr, fb, res, history, k, cfg)
    raise ConvergenceError(f"no convergence in {cfg.max_iter} iterations (residual {history[-1]:.3g})", history)


def residual(table):
    """Sup-norm defect of the (unpinned) fixed-point system on the table's own grid.

    This is the discretisation-level error of the equations themselves, of order
    the grid/quadrature error rather than the solver tolerance.
    """
    k = table.constants
    y, wq = quadrature(k.lam, table.config.quad_nodes)
    args = table.theta[:, None] * y[None, :]
    r = PchipInterpolator(table.theta, table.F_R)(args) @ wq - table.M_R
    b = PchipInterpolator(table.theta, table.F_B)(args) @ wq - table.M_B
    return float(max(np.max(np.abs(r[1:])), np.max(np.abs(b[1:]))))


def f_curve(table, t):
    """Epidemic curve f(t) = 1 - F_B(x(t))."""
    k = table.constants
    x = x_of_t(k, t)
    if np.any(x > table.theta[-1]):
        t_max = math.log(table.theta[-1] * k.lam * (k.lam + 1.0) / k.collision_factor) / k.lam
        raise OutOfRange(f"x(t) exceeds theta_max={table.theta[-1]}; need t <= {t_max:.6g}")
    return 1.0 - table(x, "F_B")


def empirical_mgf(samples, theta):
    samples = np.asarray(samples, dtype=float)
    return np.array([np.mean(np.exp(-th * samples)) for th in np.atleast_1d(theta)])
