"""Gauss-Radau projections and their mode-k deficiency coefficients.

Both projections match a function against all test polynomials of degree
k - 1 on each cell and then pin the remaining degree-k mode by matching one
endpoint trace: the right endpoint for the 'minus' projection, the left for
the 'plus' one.  The deficiency coefficient is the degree-k Legendre mode of
what the projection leaves behind; these coefficients drive the correction
construction.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence, Union

import numpy as np

from .legendre import RefPoly, gauss_rule, legendre_table
from .mesh import Mesh1D, PiecewisePoly

__all__ = [
    "SmoothFn",
    "SMOOTH_QUAD_NODES",
    "cell_modes",
    "ref_project_minus",
    "ref_project_plus",
    "project_minus",
    "project_plus",
    "project_l2",
    "mode_k_deficiency",
    "deficiency_coefficients",
]

# Fixed rule for non-polynomial integrands; far beyond the accuracy of any
# tolerance used downstream for the cell sizes in play.
SMOOTH_QUAD_NODES = 24


class SmoothFn:
    """A scalar function of x bundled with analytic derivative callables.

    Derivatives must be supplied, not approximated: downstream consumers
    amplify them by negative mesh powers, so finite-difference noise is not
    acceptable there.
    """

    def __init__(self, fn: Callable, derivatives: Sequence[Callable] = ()):
        self._fns = (fn, *derivatives)

    def __call__(self, x):
        return self._fns[0](x)

    @property
    def max_derivative_order(self) -> int:
        return len(self._fns) - 1

    def derivative(self, order: int = 1) -> "SmoothFn":
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if order > self.max_derivative_order:
            raise ValueError(
                f"derivative of order {order} not available "
                f"(have {self.max_derivative_order})"
            )
        return SmoothFn(self._fns[order], self._fns[order + 1 :])

    @classmethod
    def from_sympy(cls, expr, var, max_order: int = 12) -> "SmoothFn":
        import sympy

        fns = []
        d = expr
        for _ in range(max_order + 1):
            fns.append(_vectorized(sympy.lambdify(var, d, "numpy")))
            d = sympy.diff(d, var)
        return cls(fns[0], fns[1:])

    @classmethod
    def from_expression(cls, text: str, var_name: str = "x", max_order: int = 12) -> "SmoothFn":
        import sympy

        var = sympy.Symbol(var_name)
        return cls.from_sympy(sympy.sympify(text), var, max_order)

    def check_derivatives(self, points, rel_tol: float = 1e-6) -> None:
        """Spot-check consecutive derivative pairs against central differences."""
        x = np.asarray(points, dtype=float)
        for order in range(self.max_derivative_order):
            f = self._fns[order]
            df = self._fns[order + 1]
            step = 1e-6
            approx = (f(x + step) - f(x - step)) / (2 * step)
            exact = df(x)
            scale = np.maximum(np.abs(exact), 1.0)
            if np.any(np.abs(approx - exact) > rel_tol * scale):
                raise ValueError(f"derivative of order {order + 1} is inconsistent")


def _vectorized(fn):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(fn(x), dtype=float)
        if out.shape != x.shape:
            out = np.broadcast_to(out, x.shape).copy()
        return out if x.ndim else float(out)

    return wrapped


def cell_modes(fn, mesh: Mesh1D, max_mode: int, n_nodes: int = SMOOTH_QUAD_NODES) -> np.ndarray:
    """Legendre mode coefficients of fn on every cell, shape (N, max_mode+1).

    Mode m of cell j is (2m + 1)/h_j * (fn, L_m)_j, computed with the fixed
    smooth-integrand Gauss rule.
    """
    rule = gauss_rule(n_nodes)
    table = legendre_table(max_mode, rule.nodes)  # (max_mode+1, nq)
    values = fn(mesh.point_grid(rule.nodes))  # (N, nq)
    scale = 0.5 * (2.0 * np.arange(max_mode + 1) + 1.0)
    return (values * rule.weights[None, :]) @ table.T * scale[None, :]


def ref_project_minus(p: RefPoly, k: int) -> RefPoly:
    """Gauss-Radau projection of a reference polynomial into degree <= k,
    matching the value at s = +1."""
    c = [float(v) for v in p.coeffs]
    out = (c + [0.0] * (k + 1 - len(c)))[: k + 1]
    out[k] = sum(c[k:])
    return RefPoly(tuple(out))


def ref_project_plus(p: RefPoly, k: int) -> RefPoly:
    """As ref_project_minus but matching the value at s = -1."""
    c = [float(v) for v in p.coeffs]
    out = (c + [0.0] * (k + 1 - len(c)))[: k + 1]
    out[k] = sum(v if (m - k) % 2 == 0 else -v for m, v in enumerate(c[k:], start=k))
    return RefPoly(tuple(out))


def _project_poly(v: PiecewisePoly, k: int, plus: bool) -> PiecewisePoly:
    """Exact modal truncation plus the endpoint correction, cell by cell."""
    c = v.coeffs
    n_modes = c.shape[1]
    out = np.zeros((c.shape[0], k + 1))
    shared = min(k, n_modes)
    out[:, :shared] = c[:, :shared]
    tail = c[:, k:] if n_modes > k else np.zeros((c.shape[0], 1))
    if plus:
        signs = (-1.0) ** np.arange(tail.shape[1])
        out[:, k] = tail @ signs
    else:
        out[:, k] = tail.sum(axis=1)
    return PiecewisePoly(v.mesh, out)


def _project_smooth(v, mesh: Mesh1D, k: int, plus: bool) -> PiecewisePoly:
    modes = cell_modes(v, mesh, max(k - 1, 0))
    out = np.zeros((mesh.n_cells, k + 1))
    out[:, :k] = modes[:, :k]
    if plus:
        endpoint = v(mesh.boundaries[:-1])
        signs = (-1.0) ** np.arange(k)
        out[:, k] = ((-1.0) ** k) * (endpoint - out[:, :k] @ signs)
    else:
        endpoint = v(mesh.boundaries[1:])
        out[:, k] = endpoint - out[:, :k].sum(axis=1)
    return PiecewisePoly(mesh, out)


def project_minus(v, mesh: Mesh1D = None, k: int = None) -> PiecewisePoly:
    """Cell-wise projection matching degree < k moments and the right
    endpoint value.  Accepts a smooth function or a broken polynomial."""
    if isinstance(v, PiecewisePoly):
        return _project_poly(v, k, plus=False)
    return _project_smooth(v, mesh, k, plus=False)


def project_plus(v, mesh: Mesh1D = None, k: int = None) -> PiecewisePoly:
    """Mirror of project_minus, matching the left endpoint value."""
    if isinstance(v, PiecewisePoly):
        return _project_poly(v, k, plus=True)
    return _project_smooth(v, mesh, k, plus=True)


def project_l2(v, mesh: Mesh1D, k: int) -> PiecewisePoly:
    """Plain cell-wise L2 projection onto degree <= k."""
    return PiecewisePoly(mesh, cell_modes(v, mesh, k))


def deficiency_coefficients(v, mesh: Mesh1D, k: int, kind: str) -> np.ndarray:
    """Mode-k coefficient of v minus its Gauss-Radau projection, per cell.

    kind='minus': -v(right endpoint) + sum of the first k+1 mode
    coefficients; kind='plus': the alternating-sign mirror anchored at the
    left endpoint.  Works for smooth functions and broken polynomials (for
    the latter the one-sided endpoint trace is used).
    """
    if isinstance(v, PiecewisePoly):
        modes = v.coeffs[:, : k + 1]
        if modes.shape[1] < k + 1:
            modes = np.pad(modes, ((0, 0), (0, k + 1 - modes.shape[1])))
        right = v.minus_traces()
        left = v.plus_traces()
    else:
        modes = cell_modes(v, mesh, k)
        right = np.asarray(v(mesh.boundaries[1:]), dtype=float)
        left = np.asarray(v(mesh.boundaries[:-1]), dtype=float)
    if kind == "minus":
        return -right + modes.sum(axis=1)
    if kind == "plus":
        signs = (-1.0) ** (k + np.arange(k + 1))
        return ((-1.0) ** (k + 1)) * left + modes @ signs
    raise ValueError("kind must be 'minus' or 'plus'")


def mode_k_deficiency(v, mesh: Mesh1D, j: int, k: int, kind: str) -> float:
    """Single-cell variant of deficiency_coefficients."""
    return float(deficiency_coefficients(v, mesh, k, kind)[j])
