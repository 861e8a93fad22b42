"""One-dimensional meshes and the broken Legendre-modal polynomial space.

A broken polynomial stores one row of Legendre coefficients per cell; on
cell j the function is sum_m c[j, m] L_m(s) with s = (x - x_j) / hbar_j.
Coefficient storage is modal throughout, so traces, derivatives, inner
products, and norms are exact linear operations on the rows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .legendre import derivative_matrix, legendre_table

__all__ = [
    "Mesh1D",
    "PiecewisePoly",
    "FluxChoice",
    "BCKind",
    "BoundaryCondition",
    "build_mesh",
    "trace",
    "broken_l2_norm",
    "l2_inner",
    "cellwise_inner",
    "check_flux_bc_pairing",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Mesh1D:
    """Strictly increasing cell boundaries plus derived cell geometry."""

    boundaries: np.ndarray
    centers: np.ndarray = field(init=False, repr=False)
    widths: np.ndarray = field(init=False, repr=False)
    half_widths: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=float)
        if b.ndim != 1 or b.size < 2:
            raise ValueError("need at least two boundary points")
        if np.any(np.diff(b) <= 0):
            raise ValueError("boundaries must be strictly increasing")
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "centers", 0.5 * (b[1:] + b[:-1]))
        object.__setattr__(self, "widths", np.diff(b))
        object.__setattr__(self, "half_widths", 0.5 * np.diff(b))
        for name in ("boundaries", "centers", "widths", "half_widths"):
            getattr(self, name).setflags(write=False)

    @property
    def n_cells(self) -> int:
        return self.widths.size

    @property
    def h(self) -> float:
        """Largest cell width."""
        return float(self.widths.max())

    @property
    def h_min(self) -> float:
        return float(self.widths.min())

    @property
    def quasi_uniformity(self) -> float:
        """Constant c with h <= c * h_j for every cell."""
        return self.h / self.h_min

    def point_grid(self, ref_points: np.ndarray) -> np.ndarray:
        """Physical coordinates of the given reference points in every cell."""
        r = np.asarray(ref_points, dtype=float)
        return self.centers[:, None] + self.half_widths[:, None] * r[None, :]

    def same_as(self, other: "Mesh1D") -> bool:
        return self is other or np.array_equal(self.boundaries, other.boundaries)


def build_mesh(kind: str, n: int) -> Mesh1D:
    """Mesh on [0, 2*pi]: 'uniform' with n equal cells, or 'split' with n/2
    equal cells on each of [0, 3*pi/4] and [3*pi/4, 2*pi]."""
    if kind == "uniform":
        if n < 1:
            raise ValueError("uniform mesh needs n >= 1")
        return Mesh1D(np.linspace(0.0, TWO_PI, n + 1))
    if kind == "split":
        if n < 2 or n % 2 != 0:
            raise ValueError("split mesh needs an even n >= 2")
        breakpoint_x = 0.75 * np.pi
        left = np.linspace(0.0, breakpoint_x, n // 2 + 1)
        right = np.linspace(breakpoint_x, TWO_PI, n // 2 + 1)
        return Mesh1D(np.concatenate([left, right[1:]]))
    raise ValueError(f"unknown mesh kind {kind!r}")


class FluxChoice(enum.Enum):
    """Alternating interface fluxes: ALT1 takes u from the left and q from
    the right; ALT2 mirrors that."""

    ALT1 = "alt1"
    ALT2 = "alt2"


class BCKind(enum.Enum):
    PERIODIC = "periodic"
    DIRICHLET_NEUMANN = "dirichlet-neumann"  # u given at x=0, u_x at x=2*pi
    NEUMANN_DIRICHLET = "neumann-dirichlet"  # u_x given at x=0, u at x=2*pi


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary kind plus the time-dependent data functions g0 (left) and
    g1 (right) for the mixed kinds."""

    kind: BCKind
    g0: Optional[Callable[[float], float]] = None
    g1: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.kind is not BCKind.PERIODIC and (self.g0 is None or self.g1 is None):
            raise ValueError("mixed boundary conditions need both g0 and g1")

    @classmethod
    def periodic(cls) -> "BoundaryCondition":
        return cls(BCKind.PERIODIC)

    @classmethod
    def dirichlet_neumann(cls, g0, g1) -> "BoundaryCondition":
        return cls(BCKind.DIRICHLET_NEUMANN, g0, g1)

    @classmethod
    def neumann_dirichlet(cls, g0, g1) -> "BoundaryCondition":
        return cls(BCKind.NEUMANN_DIRICHLET, g0, g1)


_ALLOWED_PAIRINGS = {
    FluxChoice.ALT1: (BCKind.PERIODIC, BCKind.DIRICHLET_NEUMANN),
    FluxChoice.ALT2: (BCKind.PERIODIC, BCKind.NEUMANN_DIRICHLET),
}


def check_flux_bc_pairing(flux: FluxChoice, bc: BoundaryCondition) -> None:
    """The one-sided fluxes must point away from the prescribed data side."""
    if bc.kind not in _ALLOWED_PAIRINGS[flux]:
        raise ValueError(f"flux {flux.value} cannot be paired with {bc.kind.value}")


@dataclass(frozen=True)
class PiecewisePoly:
    """Broken polynomial of one degree on one mesh: coeffs has shape
    (n_cells, degree + 1)."""

    mesh: Mesh1D
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 2 or c.shape[0] != self.mesh.n_cells or c.shape[1] < 1:
            raise ValueError(
                f"coefficient shape {c.shape} does not match mesh with "
                f"{self.mesh.n_cells} cells"
            )
        object.__setattr__(self, "coeffs", c)
        c.setflags(write=False)

    @classmethod
    def zeros(cls, mesh: Mesh1D, degree: int) -> "PiecewisePoly":
        return cls(mesh, np.zeros((mesh.n_cells, degree + 1)))

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def eval_ref(self, ref_points) -> np.ndarray:
        """Values at the same reference points in every cell, shape (N, P)."""
        table = legendre_table(self.degree, np.asarray(ref_points, dtype=float))
        return self.coeffs @ table

    def minus_traces(self) -> np.ndarray:
        """Per-cell values at the right endpoint (trace from the left)."""
        return self.coeffs.sum(axis=1)

    def plus_traces(self) -> np.ndarray:
        """Per-cell values at the left endpoint (trace from the right)."""
        alt = (-1.0) ** np.arange(self.coeffs.shape[1])
        return self.coeffs @ alt

    def cell_means(self) -> np.ndarray:
        return self.coeffs[:, 0].copy()

    def derivative(self) -> "PiecewisePoly":
        """Cell-wise x-derivative (exact modal differentiation)."""
        k = self.degree
        if k == 0:
            return PiecewisePoly.zeros(self.mesh, 0)
        d = self.coeffs @ derivative_matrix(k)
        d = d[:, :k] / self.mesh.half_widths[:, None]
        return PiecewisePoly(self.mesh, d)

    def __call__(self, x, side: str = "minus"):
        """Point evaluation; `side` resolves values exactly at interior
        cell boundaries ('minus' from the left cell, 'plus' from the right)."""
        x = np.asarray(x, dtype=float)
        b = self.mesh.boundaries
        search = "left" if side == "minus" else "right"
        idx = np.searchsorted(b, x, side=search) - 1
        idx = np.clip(idx, 0, self.mesh.n_cells - 1)
        s = (x - self.mesh.centers[idx]) / self.mesh.half_widths[idx]
        table = legendre_table(self.degree, s)
        return np.einsum("...m,m...->...", self.coeffs[idx], table)

    def _binary(self, other, op):
        if not isinstance(other, PiecewisePoly):
            return NotImplemented
        if not self.mesh.same_as(other.mesh):
            raise ValueError("operands live on different meshes")
        a, b = _pad_pair(self.coeffs, other.coeffs)
        return PiecewisePoly(self.mesh, op(a, b))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return PiecewisePoly(self.mesh, -self.coeffs)

    def __rmul__(self, scalar):
        return PiecewisePoly(self.mesh, float(scalar) * self.coeffs)


def _pad_pair(a: np.ndarray, b: np.ndarray):
    m = max(a.shape[1], b.shape[1])
    if a.shape[1] < m:
        a = np.pad(a, ((0, 0), (0, m - a.shape[1])))
    if b.shape[1] < m:
        b = np.pad(b, ((0, 0), (0, m - b.shape[1])))
    return a, b


def trace(p: PiecewisePoly, node: int, side: str) -> float:
    """One-sided value of p at mesh node `node` (0-based, 0..n_cells).

    side='minus' takes the limit from the cell left of the node, 'plus'
    from the cell right of it; asking for a side that does not exist at a
    domain endpoint raises.
    """
    n = p.mesh.n_cells
    if not 0 <= node <= n:
        raise ValueError(f"node index {node} out of range 0..{n}")
    if side == "minus":
        if node == 0:
            raise ValueError("no left-limit at the left domain boundary")
        return float(p.coeffs[node - 1].sum())
    if side == "plus":
        if node == n:
            raise ValueError("no right-limit at the right domain boundary")
        alt = (-1.0) ** np.arange(p.coeffs.shape[1])
        return float(p.coeffs[node] @ alt)
    raise ValueError("side must be 'minus' or 'plus'")


def _mode_weights(n_modes: int) -> np.ndarray:
    # (L_m, L_m) over a cell of width h is h / (2m + 1)
    return 1.0 / (2.0 * np.arange(n_modes) + 1.0)


def cellwise_inner(p: PiecewisePoly, q: PiecewisePoly) -> np.ndarray:
    """Per-cell L2 inner products (p, q)_j, exact via modal orthogonality."""
    if not p.mesh.same_as(q.mesh):
        raise ValueError("operands live on different meshes")
    a, b = _pad_pair(p.coeffs, q.coeffs)
    return (a * b * _mode_weights(a.shape[1])[None, :]).sum(axis=1) * p.mesh.widths


def l2_inner(p: PiecewisePoly, q: PiecewisePoly) -> float:
    return float(cellwise_inner(p, q).sum())


def broken_l2_norm(p: PiecewisePoly) -> float:
    w = _mode_weights(p.coeffs.shape[1])
    return float(np.sqrt(((p.coeffs**2 * w[None, :]).sum(axis=1) * p.mesh.widths).sum()))
