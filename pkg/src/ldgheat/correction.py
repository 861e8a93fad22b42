"""Correction functions for the superconvergent initial discretization.

Starting from L_k on the reference interval, two interleaved chains of
polynomials are generated by alternately taking the antiderivative (zero at
s = -1) and projecting back into degree <= k with one of the Gauss-Radau
projections.  Chain members are named by the parity of the half-width power
that scales them and by the endpoint where they vanish:

    odd_left[i]   scaled by hbar^(2i+1), zero at s = -1
    even_right[i] scaled by hbar^(2i+2), zero at s = +1
    odd_right[i]  scaled by hbar^(2i+1), zero at s = +1
    even_left[i]  scaled by hbar^(2i+2), zero at s = -1

Left-vanishing members expand in (L_m + L_{m-1}) pairs, right-vanishing
ones in (L_m - L_{m-1}) pairs, with mesh-independent coefficients confined
to a band of modes that narrows as the chain index grows.  Multiplying the
members by per-cell time derivatives of the projection deficiencies of the
PDE data and summing gives the correction pair (w_q, w_u) subtracted from
the Gauss-Radau projections to form the initial interpolant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .legendre import RefPoly, ds_inverse
from .mesh import FluxChoice, Mesh1D, PiecewisePoly
from .projection import (
    SmoothFn,
    deficiency_coefficients,
    project_minus,
    project_plus,
    ref_project_minus,
    ref_project_plus,
)

__all__ = [
    "CorrectionChain",
    "CorrectionBundle",
    "build_chain",
    "pair_coefficients",
    "defect_time_derivatives",
    "build_correction",
    "initial_interpolant",
    "build_bundle",
]


@dataclass(frozen=True)
class CorrectionChain:
    """Reference-interval chain polynomials for one degree k.

    The odd families hold ceil(k/2) members, the even families floor(k/2);
    `*_pairs[i]` stores the two-mode pairing coefficients of the matching
    member (sum pairing for left-vanishing, difference for right-vanishing).
    """

    k: int
    odd_left: tuple
    even_right: tuple
    odd_right: tuple
    even_left: tuple
    odd_left_pairs: tuple
    even_right_pairs: tuple
    odd_right_pairs: tuple
    even_left_pairs: tuple


def pair_coefficients(p: RefPoly, k: int, sign: int) -> np.ndarray:
    """Express p as sum_m a_m (L_m + sign * L_{m-1}); returns a_0..a_k.

    Solved from the top coefficient down; exact for chain members, whose
    leading mode is k.
    """
    c = p.padded(k + 1)
    a = np.zeros(k + 1)
    carry = 0.0
    for m in range(k, -1, -1):
        a[m] = c[m] - sign * carry
        carry = a[m]
    return a


def build_chain(k: int) -> CorrectionChain:
    """Generate all chain members for degree k by operator composition."""
    if k < 1:
        raise ValueError("degree must be at least 1")
    n_odd = math.ceil(k / 2)
    n_even = k // 2
    seed = RefPoly((0.0,) * k + (1.0,))  # L_k

    odd_left, even_right = [], []
    cur = ref_project_plus(ds_inverse(seed), k)
    odd_left.append(cur)
    for _ in range(max(n_odd, n_even) - 1):
        nxt = ref_project_minus(ds_inverse(cur), k)
        even_right.append(nxt)
        cur = ref_project_plus(ds_inverse(nxt), k)
        odd_left.append(cur)
    if len(even_right) < n_even:
        even_right.append(ref_project_minus(ds_inverse(odd_left[-1]), k))

    odd_right, even_left = [], []
    cur = ref_project_minus(ds_inverse(seed), k)
    odd_right.append(cur)
    for _ in range(max(n_odd, n_even) - 1):
        nxt = ref_project_plus(ds_inverse(cur), k)
        even_left.append(nxt)
        cur = ref_project_minus(ds_inverse(nxt), k)
        odd_right.append(cur)
    if len(even_left) < n_even:
        even_left.append(ref_project_plus(ds_inverse(odd_right[-1]), k))

    odd_left = tuple(odd_left[:n_odd])
    even_right = tuple(even_right[:n_even])
    odd_right = tuple(odd_right[:n_odd])
    even_left = tuple(even_left[:n_even])
    return CorrectionChain(
        k=k,
        odd_left=odd_left,
        even_right=even_right,
        odd_right=odd_right,
        even_left=even_left,
        odd_left_pairs=tuple(pair_coefficients(p, k, +1) for p in odd_left),
        even_right_pairs=tuple(pair_coefficients(p, k, -1) for p in even_right),
        odd_right_pairs=tuple(pair_coefficients(p, k, -1) for p in odd_right),
        even_left_pairs=tuple(pair_coefficients(p, k, +1) for p in even_left),
    )


def defect_time_derivatives(
    u0: SmoothFn,
    mesh: Mesh1D,
    k: int,
    flux: FluxChoice,
    n_u: int,
    n_q: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Time derivatives at t = 0 of the projection-deficiency coefficients.

    Because u_t = u_xx, the i-th time derivative of the data is the 2i-th
    space derivative of u0; the q-side coefficients use one more space
    derivative since q = u_x.  Returns arrays of shape (n_u + 1, N) and
    (n_q + 1, N): row i of the first is the deficiency of u0^(2i), row i of
    the second that of u0^(2i+1).  The flux choice fixes which endpoint
    anchors each family.
    """
    needed = max(2 * n_u, 2 * n_q + 1)
    if u0.max_derivative_order < needed:
        raise ValueError(
            f"initial data must supply derivatives up to order {needed}, "
            f"have {u0.max_derivative_order}"
        )
    u_kind = "minus" if flux is FluxChoice.ALT1 else "plus"
    q_kind = "plus" if flux is FluxChoice.ALT1 else "minus"
    u_rows = [
        deficiency_coefficients(u0.derivative(2 * i), mesh, k, u_kind)
        for i in range(n_u + 1)
    ]
    q_rows = [
        deficiency_coefficients(u0.derivative(2 * i + 1), mesh, k, q_kind)
        for i in range(n_q + 1)
    ]
    return np.array(u_rows), np.array(q_rows)


def build_correction(
    chain: CorrectionChain,
    u_defect_derivs: np.ndarray,
    q_defect_derivs: np.ndarray,
    l: int,
    flux: FluxChoice,
    mesh: Mesh1D,
) -> tuple[PiecewisePoly, PiecewisePoly]:
    """Assemble the per-cell correction pair (w_q, w_u) of order l.

    w_u corrects the projection of u and vanishes on the side the u-flux is
    taken from; w_q corrects the projection of q on the opposite side.
    Members of chain index i are scaled by hbar_j^(2i-1) (odd families,
    1-based) or hbar_j^(2i) (even families).
    """
    k = chain.k
    if not 1 <= l <= k:
        raise ValueError(f"correction order must satisfy 1 <= l <= k, got {l}")
    n_odd = math.ceil(l / 2)
    n_even = l // 2
    g = np.asarray(u_defect_derivs, dtype=float)
    q = np.asarray(q_defect_derivs, dtype=float)
    if g.shape[0] < n_odd + 1 or q.shape[0] < max(n_even, n_odd - 1) + 1:
        raise ValueError("not enough deficiency derivative rows for this order")
    hbar = mesh.half_widths

    def accumulate(terms):
        out = np.zeros((mesh.n_cells, k + 1))
        for coeff_rows, members, power0 in terms:
            for i, member in enumerate(members):
                power = power0 + 2 * i
                out += (coeff_rows[i] * hbar**power)[:, None] * member.padded(k + 1)[None, :]
        return PiecewisePoly(mesh, out)

    if flux is FluxChoice.ALT1:
        w_q = accumulate(
            [
                (g[1 : n_odd + 1], chain.odd_left[:n_odd], 1),
                (q[1 : n_even + 1], chain.even_left[:n_even], 2),
            ]
        )
        w_u = accumulate(
            [
                (g[1 : n_even + 1], chain.even_right[:n_even], 2),
                (q[0:n_odd], chain.odd_right[:n_odd], 1),
            ]
        )
    else:
        w_q = accumulate(
            [
                (q[1 : n_even + 1], chain.even_right[:n_even], 2),
                (g[1 : n_odd + 1], chain.odd_right[:n_odd], 1),
            ]
        )
        w_u = accumulate(
            [
                (q[0:n_odd], chain.odd_left[:n_odd], 1),
                (g[1 : n_even + 1], chain.even_left[:n_even], 2),
            ]
        )
    return w_q, w_u


@dataclass(frozen=True)
class CorrectionBundle:
    """Everything the initial discretization derives from the initial data."""

    flux: FluxChoice
    order: int
    u_defect_derivs: np.ndarray
    q_defect_derivs: np.ndarray
    w_q: PiecewisePoly
    w_u: PiecewisePoly


def build_bundle(u0: SmoothFn, mesh: Mesh1D, k: int, l: int, flux: FluxChoice) -> CorrectionBundle:
    chain = build_chain(k)
    n_odd = math.ceil(l / 2)
    n_even = l // 2
    g, q = defect_time_derivatives(u0, mesh, k, flux, n_u=n_odd, n_q=max(n_even, n_odd - 1))
    w_q, w_u = build_correction(chain, g, q, l, flux, mesh)
    return CorrectionBundle(flux, l, g, q, w_q, w_u)


def initial_interpolant(
    u0: SmoothFn, mesh: Mesh1D, k: int, l: int, flux: FluxChoice
) -> tuple[PiecewisePoly, PiecewisePoly]:
    """The corrected initial pair (u_I, q_I) built from the initial data alone.

    u_I is the Gauss-Radau projection of u0 minus w_u, q_I the opposite
    projection of u0' minus w_q; the corrections leave the projected
    endpoint traces untouched, so u_I and q_I reproduce the data exactly at
    the node side their fluxes are taken from.
    """
    bundle = build_bundle(u0, mesh, k, l, flux)
    du0 = u0.derivative(1)
    if flux is FluxChoice.ALT1:
        u_i = project_minus(u0, mesh, k) - bundle.w_u
        q_i = project_plus(du0, mesh, k) - bundle.w_q
    else:
        u_i = project_plus(u0, mesh, k) - bundle.w_u
        q_i = project_minus(du0, mesh, k) - bundle.w_q
    return u_i, q_i
