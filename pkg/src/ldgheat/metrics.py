"""Error functionals for superconvergence measurement.

Fourteen quantities are tracked per run: broken L2 gaps to the Gauss-Radau
projections, max and RMS flux errors over all mesh nodes, cell- and
domain-average errors, and max value/derivative errors over the interior
Radau points of the side the flux choice makes superconvergent.  Maxima are
exact over their finite point sets; nothing is sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .legendre import gauss_rule, legendre_table, radau_points
from .mesh import BoundaryCondition, FluxChoice, Mesh1D, PiecewisePoly, broken_l2_norm
from .projection import SMOOTH_QUAD_NODES, project_minus, project_plus
from .solver import SemidiscreteOp, q_hat_values, u_hat_values

__all__ = [
    "ErrorReport",
    "ERROR_COLUMNS",
    "REFERENCE_RATES",
    "projection_gap_norms",
    "nodal_flux_errors",
    "radau_errors",
    "radau_value_error",
    "average_errors",
    "rate",
    "error_report",
    "radau_sides",
]

# Column order used by every emitter.
ERROR_COLUMNS = [
    "xi_u_L2",
    "e_u_n",
    "e_u_star",
    "e_u_cell",
    "e_u_dom",
    "e_u_radau",
    "e_ux_radau",
    "xi_q_L2",
    "e_q_n",
    "e_q_star",
    "e_q_cell",
    "e_q_dom",
    "e_q_radau",
    "e_qx_radau",
]


def REFERENCE_RATES(k: int) -> dict:
    """Reference convergence slopes per column for plot annotations."""
    return {
        "xi_u_L2": k + 2,
        "xi_q_L2": k + 2,
        "e_u_radau": k + 2,
        "e_q_radau": k + 2,
        "e_ux_radau": k + 2,
        "e_qx_radau": k + 2,
        "e_u_n": 2 * k + 1,
        "e_q_n": 2 * k + 1,
        "e_u_star": 2 * k + 1,
        "e_q_star": 2 * k + 1,
        "e_u_cell": 2 * k + 1,
        "e_q_cell": 2 * k + 1,
        "e_u_dom": 2 * k + 1,
        "e_q_dom": 2 * k + 1,
    }


@dataclass(frozen=True)
class ErrorReport:
    """All error functionals at one fixed time on one mesh."""

    n_cells: int
    mesh_kind: str
    degree: int
    flux: str
    time: float
    xi_u_L2: float
    e_u_n: float
    e_u_star: float
    e_u_cell: float
    e_u_dom: float
    e_u_radau: float
    e_ux_radau: float
    xi_q_L2: float
    e_q_n: float
    e_q_star: float
    e_q_cell: float
    e_q_dom: float
    e_q_radau: float
    e_qx_radau: float

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "ErrorReport":
        return cls(**{f.name: d[f.name] for f in fields(cls)})

    def value(self, column: str) -> float:
        return getattr(self, column)


def radau_sides(flux: FluxChoice) -> dict:
    """Which Radau family each maximum ranges over, per flux choice."""
    if flux is FluxChoice.ALT1:
        return {"e_u_radau": "right", "e_q_radau": "left", "e_ux_radau": "left", "e_qx_radau": "right"}
    return {"e_u_radau": "left", "e_q_radau": "right", "e_ux_radau": "right", "e_qx_radau": "left"}


def projection_gap_norms(
    u_h: PiecewisePoly, q_h: PiecewisePoly, exact, flux: FluxChoice, t: float
) -> tuple[float, float]:
    """Broken L2 distances from the flux-matched Gauss-Radau projections of
    the exact pair (u, q)."""
    mesh, k = u_h.mesh, u_h.degree
    u_fn = lambda x: exact(x, t, 0)
    q_fn = lambda x: exact(x, t, 1)
    if flux is FluxChoice.ALT1:
        pu = project_minus(u_fn, mesh, k)
        pq = project_plus(q_fn, mesh, k)
    else:
        pu = project_plus(u_fn, mesh, k)
        pq = project_minus(q_fn, mesh, k)
    return broken_l2_norm(pu - u_h), broken_l2_norm(pq - q_h)


def nodal_flux_errors(
    u_h: PiecewisePoly,
    q_h: PiecewisePoly,
    exact,
    flux: FluxChoice,
    bc: BoundaryCondition,
    t: float,
) -> tuple[float, float, float, float]:
    """Max and RMS errors of the numerical fluxes over all N + 1 nodes.

    Periodic runs wrap the missing one-sided traces; mixed runs use the
    prescribed data at its boundary node, so that node contributes zero
    error to both the maximum and the (N + 1)-point average.
    """
    nodes = u_h.mesh.boundaries
    u_hat = u_hat_values(u_h, flux, bc, t)
    q_hat = q_hat_values(q_h, flux, bc, t)
    eu = np.abs(exact(nodes, t, 0) - u_hat)
    eq = np.abs(exact(nodes, t, 1) - q_hat)
    n1 = nodes.size
    return (
        float(eu.max()),
        float(np.sqrt((eu**2).sum() / n1)),
        float(eq.max()),
        float(np.sqrt((eq**2).sum() / n1)),
    )


def radau_value_error(p: PiecewisePoly, exact, t: float, side: str, order: int = 0) -> float:
    """Max error of the order-th x-derivative of p over the interior Radau
    points of the given side, all cells."""
    k = p.degree
    pts = radau_points(k, side)
    x = p.mesh.point_grid(pts)
    q = p
    for _ in range(order):
        q = q.derivative()
    return float(np.abs(exact(x, t, order) - q.eval_ref(pts)).max())


def radau_errors(
    u_h: PiecewisePoly, q_h: PiecewisePoly, exact, flux: FluxChoice, t: float
) -> tuple[float, float, float, float]:
    """(value error of u, value error of q, derivative error of u,
    derivative error of q), each over the flux-dictated Radau family."""
    sides = radau_sides(flux)

    def shifted(order_offset):
        return lambda x, tt, order=0: exact(x, tt, order + order_offset)

    e_u = radau_value_error(u_h, exact, t, sides["e_u_radau"], order=0)
    e_q = radau_value_error(q_h, shifted(1), t, sides["e_q_radau"], order=0)
    e_ux = radau_value_error(u_h, exact, t, sides["e_ux_radau"], order=1)
    e_qx = radau_value_error(q_h, shifted(1), t, sides["e_qx_radau"], order=1)
    return e_u, e_q, e_ux, e_qx


def _exact_cell_means(exact, mesh: Mesh1D, t: float, order: int) -> np.ndarray:
    rule = gauss_rule(SMOOTH_QUAD_NODES)
    vals = exact(mesh.point_grid(rule.nodes), t, order)
    return 0.5 * (vals * rule.weights[None, :]).sum(axis=1)


def average_errors(
    u_h: PiecewisePoly, q_h: PiecewisePoly, exact, t: float
) -> tuple[float, float, float, float]:
    """(cell-average RMS for u, for q, domain average for u, for q)."""
    mesh = u_h.mesh
    mean_u = _exact_cell_means(exact, mesh, t, 0) - u_h.cell_means()
    mean_q = _exact_cell_means(exact, mesh, t, 1) - q_h.cell_means()
    n = mesh.n_cells
    length = mesh.boundaries[-1] - mesh.boundaries[0]
    e_u_cell = float(np.sqrt((mean_u**2).sum() / n))
    e_q_cell = float(np.sqrt((mean_q**2).sum() / n))
    e_u_dom = float(abs((mean_u * mesh.widths).sum()) / length)
    e_q_dom = float(abs((mean_q * mesh.widths).sum()) / length)
    return e_u_cell, e_q_cell, e_u_dom, e_q_dom


def rate(errors) -> list:
    """log2 ratios of successive entries; None where a ratio is undefined."""
    errors = list(errors)
    if len(errors) < 2:
        return []
    out = []
    for a, b in zip(errors[:-1], errors[1:]):
        if a > 0 and b > 0:
            out.append(math.log2(a / b))
        else:
            out.append(None)
    return out


def error_report(
    op: SemidiscreteOp, u_h: PiecewisePoly, exact, t: float, mesh_kind: str = ""
) -> ErrorReport:
    """Evaluate every functional at time t; q_h is recovered from u_h."""
    q_h = op.solve_q(u_h, t)
    xi_u, xi_q = projection_gap_norms(u_h, q_h, exact, op.flux, t)
    e_u_n, e_u_star, e_q_n, e_q_star = nodal_flux_errors(u_h, q_h, exact, op.flux, op.bc, t)
    e_u_r, e_q_r, e_ux_r, e_qx_r = radau_errors(u_h, q_h, exact, op.flux, t)
    e_u_cell, e_q_cell, e_u_dom, e_q_dom = average_errors(u_h, q_h, exact, t)
    return ErrorReport(
        n_cells=op.mesh.n_cells,
        mesh_kind=mesh_kind,
        degree=op.degree,
        flux=op.flux.value,
        time=t,
        xi_u_L2=xi_u,
        e_u_n=e_u_n,
        e_u_star=e_u_star,
        e_u_cell=e_u_cell,
        e_u_dom=e_u_dom,
        e_u_radau=e_u_r,
        e_ux_radau=e_ux_r,
        xi_q_L2=xi_q,
        e_q_n=e_q_n,
        e_q_star=e_q_star,
        e_q_cell=e_q_cell,
        e_q_dom=e_q_dom,
        e_q_radau=e_q_r,
        e_qx_radau=e_qx_r,
    )
