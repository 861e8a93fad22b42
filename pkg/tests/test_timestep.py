import math

import numpy as np
import pytest

from ldgheat.mesh import BoundaryCondition, FluxChoice, PiecewisePoly, broken_l2_norm, build_mesh
from ldgheat.problems import builtin_problem
from ldgheat.correction import initial_interpolant
from ldgheat.projection import project_minus
from ldgheat.solver import SemidiscreteOp
from ldgheat.timestep import SCHEME_ORDERS, StepPolicy, integrate

PERIODIC = BoundaryCondition.periodic()


def dense_operator(op, n, k):
    a = np.zeros((n * (k + 1), n * (k + 1)))
    for i in range(a.shape[1]):
        e = np.zeros(a.shape[1])
        e[i] = 1.0
        a[:, i] = op._rhs(e.reshape(n, k + 1), 0.0).ravel()
    return a


def test_zero_final_time_returns_input():
    mesh = build_mesh("uniform", 4)
    op = SemidiscreteOp(mesh, 1, FluxChoice.ALT1, PERIODIC)
    u = PiecewisePoly(mesh, np.arange(8.0).reshape(4, 2))
    assert integrate(op, u, 0.0, StepPolicy.h_squared(0.01)) is u


def test_single_rk4_step_matches_taylor_of_matrix_exponential():
    n, k = 4, 1
    mesh = build_mesh("uniform", n)
    op = SemidiscreteOp(mesh, k, FluxChoice.ALT1, PERIODIC)
    a = dense_operator(op, n, k)
    rng = np.random.default_rng(31)
    u0 = rng.uniform(-1, 1, (n, k + 1))
    dt = 0.01 * mesh.h_min**2
    got = integrate(op, PiecewisePoly(mesh, u0), dt, StepPolicy.fixed_steps(1))
    stepper = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for j in range(1, 5):
        term = term @ a * (dt / j)
        stepper = stepper + term
    expect = (stepper @ u0.ravel()).reshape(n, k + 1)
    assert np.abs(got.coeffs - expect).max() <= 1e-12


def test_time_error_subdominant_on_smooth_problem():
    k, n = 3, 16
    problem = builtin_problem("example1")
    mesh = build_mesh("uniform", n)
    op = SemidiscreteOp(mesh, k, FluxChoice.ALT1, PERIODIC)
    u0, _ = initial_interpolant(problem.u0, mesh, k, k, FluxChoice.ALT1)
    exact = project_minus(lambda x: problem.exact(x, 1.0, 0), mesh, k + 3)

    def final_error(coef):
        u = integrate(op, u0, 1.0, StepPolicy.h_squared(coef))
        return broken_l2_norm(u - project_minus(lambda x: problem.exact(x, 1.0, 0), mesh, u.degree)), u

    err, u_a = final_error(0.005)
    err2, u_b = final_error(0.0025)
    assert abs(err - err2) <= 0.05 * err
    assert broken_l2_norm(u_a - u_b) <= 0.05 * err


@pytest.mark.parametrize("scheme", ["ssprk3", "rk4", "dopri5"])
def test_richardson_order_of_schemes(scheme):
    # time-error proxy: successive differences under dt halving
    n, k = 4, 1
    mesh = build_mesh("uniform", n)
    op = SemidiscreteOp(mesh, k, FluxChoice.ALT1, PERIODIC)
    u0 = project_minus(builtin_problem("example1").u0, mesh, k)
    t_final = 0.5
    base_steps = 8
    solutions = [
        integrate(op, u0, t_final, StepPolicy.fixed_steps(base_steps * 2**i, scheme))
        for i in range(3)
    ]
    d1 = broken_l2_norm(solutions[0] - solutions[1])
    d2 = broken_l2_norm(solutions[1] - solutions[2])
    rate = math.log2(d1 / d2)
    assert rate >= SCHEME_ORDERS[scheme] - 0.5


def test_deterministic_bit_identical():
    k, n = 3, 8
    problem = builtin_problem("example2")
    mesh = build_mesh("uniform", n)
    op = SemidiscreteOp(mesh, k, FluxChoice.ALT2, problem.bc)
    u0, _ = initial_interpolant(problem.u0, mesh, k, k, FluxChoice.ALT2)
    a = integrate(op, u0, 0.05, StepPolicy.h_squared(0.004))
    b = integrate(op, u0, 0.05, StepPolicy.h_squared(0.004))
    assert np.array_equal(a.coeffs, b.coeffs)


def test_final_step_lands_exactly_on_t():
    # choose T not divisible by dt; the error functional time matters
    mesh = build_mesh("uniform", 4)
    op = SemidiscreteOp(mesh, 0, FluxChoice.ALT1, PERIODIC)
    u0 = PiecewisePoly(mesh, np.ones((4, 1)))
    out = integrate(op, u0, 0.0317, StepPolicy.fixed_steps(7))
    assert np.allclose(out.coeffs, 1.0)  # constant stays constant at any T


def test_blowup_detection():
    mesh = build_mesh("uniform", 8)
    op = SemidiscreteOp(mesh, 3, FluxChoice.ALT1, PERIODIC)
    u0 = project_minus(builtin_problem("example1").u0, mesh, 3)
    with pytest.raises(RuntimeError, match="step"):
        integrate(op, u0, 1.0, StepPolicy.h_squared(0.02))


def test_policy_validation():
    with pytest.raises(ValueError):
        StepPolicy(scheme="rk4")
    with pytest.raises(ValueError):
        StepPolicy(scheme="rk4", dt_coefficient=0.01, total_steps=10)
    with pytest.raises(ValueError):
        StepPolicy(scheme="euler9", dt_coefficient=0.01)
    with pytest.raises(ValueError):
        StepPolicy.fixed_steps(0)
    policy = StepPolicy.h_squared(0.01)
    mesh = build_mesh("split", 8)
    assert policy.dt_for(mesh, 1.0) == pytest.approx(0.01 * (3 * np.pi / 16) ** 2)
    assert StepPolicy.fixed_steps(250).dt_for(mesh, 1.0) == pytest.approx(1 / 250)
