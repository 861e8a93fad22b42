import math

import numpy as np
import pytest

from ldgheat.legendre import ds_inverse, RefPoly
from ldgheat.mesh import (
    BoundaryCondition,
    FluxChoice,
    PiecewisePoly,
    broken_l2_norm,
    build_mesh,
    l2_inner,
)
from ldgheat.problems import builtin_problem
from ldgheat.projection import project_l2, project_minus
from ldgheat.correction import initial_interpolant
from ldgheat.solver import SemidiscreteOp, energy_identity_gap, q_hat_values, u_hat_values

PERIODIC = BoundaryCondition.periodic()


def random_poly(mesh, k, rng):
    return PiecewisePoly(mesh, rng.uniform(-1, 1, (mesh.n_cells, k + 1)))


def continuous_antiderivative(mesh, source):
    """Cell-wise antiderivative of a broken poly, glued continuously."""
    n, modes = source.coeffs.shape
    out = np.zeros((n, modes + 1))
    offset = 0.0
    for j in range(n):
        anti = mesh.half_widths[j] * ds_inverse(RefPoly(tuple(source.coeffs[j]))).padded(modes + 1)
        anti[0] += offset
        out[j] = anti
        offset = anti.sum()  # value at the right endpoint
    return PiecewisePoly(mesh, out)


def test_constant_state_is_steady():
    mesh = build_mesh("uniform", 6)
    op = SemidiscreteOp(mesh, 2, FluxChoice.ALT1, PERIODIC)
    u = PiecewisePoly(mesh, np.column_stack([np.full(6, 3.7), np.zeros(6), np.zeros(6)]))
    assert np.abs(op.solve_q(u).coeffs).max() <= 1e-14
    assert np.abs(op.apply_spatial(u).coeffs).max() <= 1e-14


@pytest.mark.parametrize("flux", [FluxChoice.ALT1, FluxChoice.ALT2])
def test_q_is_exact_derivative_of_continuous_input(flux):
    rng = np.random.default_rng(3)
    k = 3
    mesh = build_mesh("split", 8)
    u = continuous_antiderivative(mesh, random_poly(mesh, k - 1, rng))
    op = SemidiscreteOp(mesh, k, flux, PERIODIC)
    q = op.solve_q(u)
    du = u.derivative()
    for j in range(1, mesh.n_cells - 1):
        assert np.abs(q.coeffs[j, :k] - du.coeffs[j]).max() <= 1e-13
        assert abs(q.coeffs[j, k]) <= 1e-13


def test_q_accuracy_rate():
    k = 2
    problem = builtin_problem("example1")
    errs = []
    for n in (8, 16, 32):
        mesh = build_mesh("uniform", n)
        op = SemidiscreteOp(mesh, k, FluxChoice.ALT1, PERIODIC)
        u_h = project_minus(problem.u0, mesh, k)
        q_h = op.solve_q(u_h)
        errs.append(broken_l2_norm(q_h - project_l2(np.cos, mesh, k + 6)))
    rates = [math.log2(a / b) for a, b in zip(errs[:-1], errs[1:])]
    assert min(rates) >= k + 0.8


def test_mode_zero_conservation_periodic():
    rng = np.random.default_rng(5)
    mesh = build_mesh("split", 8)
    for k in (1, 2, 3):
        op = SemidiscreteOp(mesh, k, FluxChoice.ALT1, PERIODIC)
        u = random_poly(mesh, k, rng)
        dudt = op.apply_spatial(u)
        total = float((dudt.coeffs[:, 0] * mesh.widths).sum())
        assert abs(total) <= 1e-13 * broken_l2_norm(u)


def test_semidiscrete_consistency_at_initial_time():
    # du/dt of the corrected initial state approximates u_t(.,0) = -sin
    k, n = 3, 16
    problem = builtin_problem("example1")
    mesh = build_mesh("uniform", n)
    op = SemidiscreteOp(mesh, k, FluxChoice.ALT1, PERIODIC)
    u_h, _ = initial_interpolant(problem.u0, mesh, k, k, FluxChoice.ALT1)
    target = project_l2(np.sin, mesh, k)
    gap = broken_l2_norm(op.apply_spatial(u_h, 0.0) + target)
    assert gap <= 10 * mesh.h ** (k + 1)


def test_linearity_periodic():
    rng = np.random.default_rng(11)
    mesh = build_mesh("uniform", 5)
    k = 3
    op = SemidiscreteOp(mesh, k, FluxChoice.ALT2, PERIODIC)
    u = random_poly(mesh, k, rng)
    v = random_poly(mesh, k, rng)
    a, b = 1.7, -0.4
    lhs = op.apply_spatial(a * u + b * v)
    rhs = a * op.apply_spatial(u) + b * op.apply_spatial(v)
    scale = broken_l2_norm(lhs) + 1.0
    assert broken_l2_norm(lhs - rhs) <= 1e-12 * scale


def test_discrete_dissipation_identity():
    # (du/dt, u) + ||q||^2 = 0 for periodic runs
    rng = np.random.default_rng(17)
    for flux in (FluxChoice.ALT1, FluxChoice.ALT2):
        for _ in range(20):
            k = int(rng.integers(1, 5))
            n = int(rng.integers(3, 9))
            mesh = build_mesh("uniform", n)
            op = SemidiscreteOp(mesh, k, flux, PERIODIC)
            u = random_poly(mesh, k, rng)
            q = op.solve_q(u)
            val = l2_inner(op.apply_spatial(u), u) + broken_l2_norm(q) ** 2
            scale = broken_l2_norm(u) ** 2 + broken_l2_norm(q) ** 2
            assert abs(val) <= 1e-11 * max(scale, 1.0)


def test_energy_identity_zero_states():
    mesh = build_mesh("uniform", 4)
    z = PiecewisePoly.zeros(mesh, 2)
    assert energy_identity_gap(z, z, z, FluxChoice.ALT1) == 0.0


@pytest.mark.parametrize("flux", [FluxChoice.ALT1, FluxChoice.ALT2])
def test_energy_identity_random_trials(flux):
    rng = np.random.default_rng(23 if flux is FluxChoice.ALT1 else 29)
    for _ in range(100):
        k = int(rng.integers(1, 5))
        n = int(rng.integers(2, 9))
        mesh = build_mesh("uniform", n)
        v = random_poly(mesh, k, rng)
        w = random_poly(mesh, k, rng)
        v_t = random_poly(mesh, k, rng)
        gap = energy_identity_gap(v, w, v_t, flux)
        scale = (broken_l2_norm(v) + broken_l2_norm(w) + broken_l2_norm(v_t)) ** 2
        assert gap <= 1e-12 * max(scale, 1.0)


def test_boundary_data_used_in_fluxes():
    # mixed boundary runs read g0/g1 at the data nodes
    problem = builtin_problem("example2")
    mesh = build_mesh("uniform", 4)
    k = 2
    u = project_minus(problem.u0, mesh, k)
    t = 0.37
    hat = u_hat_values(u, FluxChoice.ALT2, problem.bc, t)
    assert hat[-1] == pytest.approx(problem.bc.g1(t))
    op = SemidiscreteOp(mesh, k, FluxChoice.ALT2, problem.bc)
    q = op.solve_q(u, t)
    qhat = q_hat_values(q, FluxChoice.ALT2, problem.bc, t)
    assert qhat[0] == pytest.approx(problem.bc.g0(t))


def test_operator_validation():
    mesh = build_mesh("uniform", 4)
    g = lambda t: 0.0
    with pytest.raises(ValueError):
        SemidiscreteOp(mesh, 2, FluxChoice.ALT1, BoundaryCondition.neumann_dirichlet(g, g))
    op = SemidiscreteOp(mesh, 2, FluxChoice.ALT1, PERIODIC)
    wrong_mesh = PiecewisePoly.zeros(build_mesh("uniform", 8), 2)
    with pytest.raises(ValueError):
        op.apply_spatial(wrong_mesh)
    wrong_degree = PiecewisePoly.zeros(mesh, 3)
    with pytest.raises(ValueError):
        op.solve_q(wrong_degree)
