"""Semidiscrete LDG operator for u_t = u_xx with alternating fluxes.

The heat equation is written as the first-order system u_t = q_x, q = u_x;
both variables live in the broken space and couple only through one-sided
interface values.  q is algebraic: it is recomputed from u inside every
evaluation rather than evolved.  Per cell, each Legendre mode of the answer
is read off directly from mass orthogonality; volume terms use the exact
derivative-coupling matrix, never quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import (
    BCKind,
    BoundaryCondition,
    FluxChoice,
    Mesh1D,
    PiecewisePoly,
    broken_l2_norm,
    cellwise_inner,
    check_flux_bc_pairing,
)

__all__ = [
    "SemidiscreteOp",
    "stiffness_pairing",
    "u_hat_values",
    "q_hat_values",
    "a_form_1",
    "a_form_2",
    "energy_identity_gap",
]


def stiffness_pairing(k: int) -> np.ndarray:
    """S[n, m] = integral over [-1, 1] of L_m L_n'; equals 2 when m < n with
    n - m odd, else 0."""
    s = np.zeros((k + 1, k + 1))
    for n in range(k + 1):
        for m in range(n - 1, -1, -2):
            s[n, m] = 2.0
    return s


def _traces(coeffs: np.ndarray, alt: np.ndarray):
    return coeffs.sum(axis=1), coeffs @ alt


def _hat_from_minus(minus: np.ndarray, bc: BoundaryCondition, t: float, n: int) -> np.ndarray:
    """Interface values taken from the left cell; node 0 wraps or uses the
    left boundary data (Dirichlet for the u-flux, Neumann for the q-flux;
    the flux/boundary pairing rules make g0 the right datum either way)."""
    hat = np.empty(n + 1)
    hat[1:] = minus
    hat[0] = minus[-1] if bc.kind is BCKind.PERIODIC else bc.g0(t)
    return hat


def _hat_from_plus(plus: np.ndarray, bc: BoundaryCondition, t: float, n: int) -> np.ndarray:
    """Interface values taken from the right cell; node n wraps or uses the
    right boundary data g1."""
    hat = np.empty(n + 1)
    hat[:n] = plus
    hat[n] = plus[0] if bc.kind is BCKind.PERIODIC else bc.g1(t)
    return hat


def u_hat_values(u: PiecewisePoly, flux: FluxChoice, bc: BoundaryCondition, t: float) -> np.ndarray:
    """The u interface flux at all n_cells + 1 nodes.

    ALT1 takes u from the left everywhere, with the left-boundary value from
    the Dirichlet data (mixed) or the periodic wrap; ALT2 mirrors this.
    """
    alt = (-1.0) ** np.arange(u.coeffs.shape[1])
    minus, plus = _traces(u.coeffs, alt)
    n = u.mesh.n_cells
    if flux is FluxChoice.ALT1:
        return _hat_from_minus(minus, bc, t, n)
    return _hat_from_plus(plus, bc, t, n)


def q_hat_values(q: PiecewisePoly, flux: FluxChoice, bc: BoundaryCondition, t: float) -> np.ndarray:
    """The q interface flux at all nodes; opposite side from the u flux, with
    the Neumann data closing the side that has no trace."""
    alt = (-1.0) ** np.arange(q.coeffs.shape[1])
    minus, plus = _traces(q.coeffs, alt)
    n = q.mesh.n_cells
    if flux is FluxChoice.ALT1:
        return _hat_from_plus(plus, bc, t, n)
    return _hat_from_minus(minus, bc, t, n)


@dataclass(frozen=True)
class SemidiscreteOp:
    """du/dt for the LDG discretization on a fixed mesh, degree, flux, and
    boundary condition.  Immutable after construction; evaluation is pure."""

    mesh: Mesh1D
    degree: int
    flux: FluxChoice
    bc: BoundaryCondition
    _s_t: np.ndarray = field(init=False, repr=False)
    _alt: np.ndarray = field(init=False, repr=False)
    _inv_mass: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        check_flux_bc_pairing(self.flux, self.bc)
        k = self.degree
        object.__setattr__(self, "_s_t", stiffness_pairing(k).T.copy())
        object.__setattr__(self, "_alt", (-1.0) ** np.arange(k + 1))
        modes = 2.0 * np.arange(k + 1) + 1.0
        object.__setattr__(self, "_inv_mass", modes[None, :] / self.mesh.widths[:, None])

    # --- raw-array kernels (hot path for time stepping) ---

    def _moment_rhs(self, coeffs: np.ndarray, hat: np.ndarray) -> np.ndarray:
        # (y, v)_j picks mode n as: -(volume coupling) + hat*v^- at the right
        # node - hat*v^+ at the left node, then mass inversion.
        rhs = -(coeffs @ self._s_t)
        rhs += hat[1:, None]
        rhs -= hat[:-1, None] * self._alt[None, :]
        return rhs * self._inv_mass

    def _solve_q_arr(self, coeffs: np.ndarray, t: float) -> np.ndarray:
        minus = coeffs.sum(axis=1)
        plus = coeffs @ self._alt
        n = minus.size
        if self.flux is FluxChoice.ALT1:
            hat = _hat_from_minus(minus, self.bc, t, n)
        else:
            hat = _hat_from_plus(plus, self.bc, t, n)
        return self._moment_rhs(coeffs, hat)

    def _rhs(self, coeffs: np.ndarray, t: float) -> np.ndarray:
        q = self._solve_q_arr(coeffs, t)
        n = q.shape[0]
        if self.flux is FluxChoice.ALT1:
            hat = _hat_from_plus(q @ self._alt, self.bc, t, n)
        else:
            hat = _hat_from_minus(q.sum(axis=1), self.bc, t, n)
        return self._moment_rhs(q, hat)

    # --- public surface ---

    def solve_q(self, u: PiecewisePoly, t: float = 0.0) -> PiecewisePoly:
        """The auxiliary derivative variable determined cell-locally by u."""
        self._check(u)
        return PiecewisePoly(self.mesh, self._solve_q_arr(u.coeffs, t))

    def apply_spatial(self, u: PiecewisePoly, t: float = 0.0) -> PiecewisePoly:
        """du/dt: solves for q, then applies the q-flux divergence."""
        self._check(u)
        return PiecewisePoly(self.mesh, self._rhs(u.coeffs, t))

    def _check(self, u: PiecewisePoly):
        if not u.mesh.same_as(self.mesh):
            raise ValueError("state lives on a different mesh")
        if u.degree != self.degree:
            raise ValueError(f"state degree {u.degree} != operator degree {self.degree}")


# --- energy-identity diagnostics ---
#
# The two cell forms below reproduce the scheme as a1(u_h, q_h; v) = 0 and
# a2(u_h, q_h; w) = 0.  Traces at the domain boundary wrap periodically in
# these diagnostics, which is the convention under which the stated identity
# holds exactly for arbitrary broken-polynomial triples.


def _wrapped_hats(p: PiecewisePoly, take_minus: bool) -> np.ndarray:
    alt = (-1.0) ** np.arange(p.coeffs.shape[1])
    minus, plus = _traces(p.coeffs, alt)
    n = p.mesh.n_cells
    hat = np.empty(n + 1)
    if take_minus:
        hat[1:] = minus
        hat[0] = minus[-1]
    else:
        hat[:n] = plus
        hat[n] = plus[0]
    return hat


def _volume_with_test_derivative(y: PiecewisePoly, v: PiecewisePoly) -> np.ndarray:
    # (y, v_x)_j = integral of y(s) v'(s) ds; the half-width cancels.
    k = max(y.degree, v.degree)
    s = stiffness_pairing(k)
    yc = np.pad(y.coeffs, ((0, 0), (0, k + 1 - y.coeffs.shape[1])))
    vc = np.pad(v.coeffs, ((0, 0), (0, k + 1 - v.coeffs.shape[1])))
    return ((yc @ s.T) * vc).sum(axis=1)


def a_form_1(xi_t: PiecewisePoly, eta: PiecewisePoly, v: PiecewisePoly, flux: FluxChoice) -> float:
    """Sum over cells of (xi_t, v)_j + (eta, v_x)_j - eta_hat v^-|right
    + eta_hat v^+|left, with eta_hat chosen by the flux."""
    hat = _wrapped_hats(eta, take_minus=(flux is FluxChoice.ALT2))
    alt = (-1.0) ** np.arange(v.coeffs.shape[1])
    v_minus, v_plus = _traces(v.coeffs, alt)
    cells = (
        cellwise_inner(xi_t, v)
        + _volume_with_test_derivative(eta, v)
        - hat[1:] * v_minus
        + hat[:-1] * v_plus
    )
    return float(cells.sum())


def a_form_2(xi: PiecewisePoly, eta: PiecewisePoly, w: PiecewisePoly, flux: FluxChoice) -> float:
    """Sum over cells of (eta, w)_j + (xi, w_x)_j - xi_hat w^-|right
    + xi_hat w^+|left, with xi_hat chosen by the flux."""
    hat = _wrapped_hats(xi, take_minus=(flux is FluxChoice.ALT1))
    alt = (-1.0) ** np.arange(w.coeffs.shape[1])
    w_minus, w_plus = _traces(w.coeffs, alt)
    cells = (
        cellwise_inner(eta, w)
        + _volume_with_test_derivative(xi, w)
        - hat[1:] * w_minus
        + hat[:-1] * w_plus
    )
    return float(cells.sum())


def energy_identity_gap(
    v: PiecewisePoly, w: PiecewisePoly, v_t: PiecewisePoly, flux: FluxChoice
) -> float:
    """|a1(v, w; v) + a2(v, w; w) - [(v_t, v) + (w, w) + boundary terms]|.

    The boundary remainder pairs the outside trace of one variable with the
    inside trace of the other at each end of the domain; with the wrapped
    convention the two contributions cancel, and the identity pins down all
    interior flux bookkeeping exactly.
    """
    lhs = a_form_1(v_t, w, v, flux) + a_form_2(v, w, w, flux)
    alt_v = (-1.0) ** np.arange(v.coeffs.shape[1])
    alt_w = (-1.0) ** np.arange(w.coeffs.shape[1])
    v_minus, v_plus = _traces(v.coeffs, alt_v)
    w_minus, w_plus = _traces(w.coeffs, alt_w)
    if flux is FluxChoice.ALT1:
        boundary = -w_plus[0] * v_minus[-1] + w_plus[0] * v_minus[-1]
    else:
        boundary = -w_minus[-1] * v_plus[0] + w_minus[-1] * v_plus[0]
    rhs = l2_inner_total(v_t, v) + l2_inner_total(w, w) + boundary
    return abs(lhs - rhs)


def l2_inner_total(p: PiecewisePoly, q: PiecewisePoly) -> float:
    return float(cellwise_inner(p, q).sum())
