"""Heat-equation problems with manufactured exact solutions.

Each problem bundles the initial data (with analytic x-derivatives to the
order the correction construction consumes), the exact solution and its
first two x-derivatives for error evaluation, and boundary data consistent
with the chosen boundary kind.  Everything is generated symbolically from
one expression for u(x, t), which is verified to satisfy u_t = u_xx.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import sympy

from .mesh import BCKind, BoundaryCondition, TWO_PI
from .projection import SmoothFn

__all__ = ["ProblemSpec", "make_problem", "builtin_problem", "BUILTIN_PROBLEMS"]

_X, _T = sympy.symbols("x t")


@dataclass(frozen=True)
class ProblemSpec:
    """PDE data for u_t = u_xx on [0, 2*pi]."""

    name: str
    u0: SmoothFn
    exact: Callable  # exact(x, t, order=0) -> d^order/dx^order u(x, t)
    bc: BoundaryCondition
    final_time: float
    expression: str = ""

    def exact_u0(self):
        return self.u0


def _lambdify_xt(expr):
    fn = sympy.lambdify((_X, _T), expr, "numpy")

    def wrapped(x, t):
        x = np.asarray(x, dtype=float)
        out = np.asarray(fn(x, t), dtype=float)
        if out.shape != x.shape:
            out = np.broadcast_to(out, x.shape).copy()
        return out if x.ndim else float(out)

    return wrapped


def _lambdify_t(expr):
    fn = sympy.lambdify(_T, expr, "numpy")
    return lambda t: float(fn(t))


def make_problem(
    name: str,
    expression: str,
    bc_kind: str | BCKind,
    final_time: float = 1.0,
    max_x_order: int = 12,
) -> ProblemSpec:
    """Build a problem from a sympy expression for u(x, t).

    Rejects expressions that do not solve the heat equation, and periodic
    requests whose solution is not 2*pi-periodic in x.
    """
    u = sympy.sympify(expression)
    residual = sympy.simplify(sympy.diff(u, _T) - sympy.diff(u, _X, 2))
    if residual != 0:
        raise ValueError(f"{expression!r} does not satisfy u_t = u_xx (residual {residual})")

    kind = bc_kind if isinstance(bc_kind, BCKind) else BCKind(bc_kind)
    if kind is BCKind.PERIODIC:
        gap = sympy.simplify(u.subs(_X, 0) - u.subs(_X, 2 * sympy.pi))
        if gap != 0:
            raise ValueError("periodic boundary requested for a non-periodic solution")
        bc = BoundaryCondition.periodic()
    elif kind is BCKind.DIRICHLET_NEUMANN:
        bc = BoundaryCondition.dirichlet_neumann(
            _lambdify_t(u.subs(_X, 0)),
            _lambdify_t(sympy.diff(u, _X).subs(_X, 2 * sympy.pi)),
        )
    else:
        bc = BoundaryCondition.neumann_dirichlet(
            _lambdify_t(sympy.diff(u, _X).subs(_X, 0)),
            _lambdify_t(u.subs(_X, 2 * sympy.pi)),
        )

    u0 = SmoothFn.from_sympy(u.subs(_T, 0), _X, max_order=max_x_order)
    deriv_fns = [_lambdify_xt(sympy.diff(u, _X, o)) for o in range(4)]

    def exact(x, t, order: int = 0):
        return deriv_fns[order](x, t)

    return ProblemSpec(
        name=name,
        u0=u0,
        exact=exact,
        bc=bc,
        final_time=final_time,
        expression=str(u),
    )


# Periodic decaying sine, and a mixed-boundary solution combining a decaying
# cosine with a growing exponential (stresses the non-symmetric boundary
# handling and large solution scales).
BUILTIN_PROBLEMS = {
    "example1": ("exp(-t)*sin(x)", BCKind.PERIODIC),
    "example2": ("exp(-t)*cos(x) + exp(x + t + 1)", BCKind.NEUMANN_DIRICHLET),
}


def builtin_problem(name: str, final_time: float = 1.0) -> ProblemSpec:
    if name not in BUILTIN_PROBLEMS:
        raise KeyError(f"unknown problem {name!r}; have {sorted(BUILTIN_PROBLEMS)}")
    expression, kind = BUILTIN_PROBLEMS[name]
    return make_problem(name, expression, kind, final_time=final_time)
