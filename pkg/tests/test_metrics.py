import math

import numpy as np
import pytest

from ldgheat.correction import initial_interpolant
from ldgheat.mesh import BoundaryCondition, FluxChoice, PiecewisePoly, build_mesh
from ldgheat.metrics import (
    ERROR_COLUMNS,
    ErrorReport,
    average_errors,
    error_report,
    nodal_flux_errors,
    projection_gap_norms,
    radau_sides,
    radau_value_error,
    rate,
)
from ldgheat.problems import builtin_problem
from ldgheat.projection import project_l2, project_minus, project_plus
from ldgheat.solver import SemidiscreteOp

PERIODIC = BoundaryCondition.periodic()


def test_rate_values():
    got = rate([1.04e-4, 7.19e-7])
    assert got[0] == pytest.approx(math.log2(1.04e-4 / 7.19e-7), abs=1e-12)
    assert got[0] == pytest.approx(7.18, abs=0.01)
    assert rate([3.0, 3.0]) == [0.0]
    assert rate([5.06e-4, 1.29e-5])[0] == pytest.approx(5.29, abs=0.01)


def test_rate_undefined_entries():
    got = rate([1.0, 0.0, 1e-3])
    assert got == [None, None]
    assert rate([2.0]) == []


def test_projection_gap_zero_when_state_is_projection():
    k, n = 3, 8
    problem = builtin_problem("example1")
    mesh = build_mesh("uniform", n)
    t = 0.6
    u_h = project_minus(lambda x: problem.exact(x, t, 0), mesh, k)
    q_h = project_plus(lambda x: problem.exact(x, t, 1), mesh, k)
    xi_u, xi_q = projection_gap_norms(u_h, q_h, problem.exact, FluxChoice.ALT1, t)
    assert xi_u <= 1e-13
    assert xi_q <= 1e-13


def test_nodal_errors_vanish_for_corrected_initial_state():
    k = 3
    problem = builtin_problem("example1")
    mesh = build_mesh("split", 8)
    op = SemidiscreteOp(mesh, k, FluxChoice.ALT1, PERIODIC)
    u_h, _ = initial_interpolant(problem.u0, mesh, k, k, FluxChoice.ALT1)
    q_h = op.solve_q(u_h, 0.0)
    e_u_n, e_u_star, _, _ = nodal_flux_errors(u_h, q_h, problem.exact, FluxChoice.ALT1, PERIODIC, 0.0)
    assert e_u_n <= 1e-12
    assert e_u_star <= 1e-12


def test_mixed_boundary_node_uses_data():
    k = 2
    problem = builtin_problem("example2")
    mesh = build_mesh("uniform", 4)
    op = SemidiscreteOp(mesh, k, FluxChoice.ALT2, problem.bc)
    rng = np.random.default_rng(2)
    u_h = PiecewisePoly(mesh, rng.uniform(-1, 1, (4, k + 1)))
    q_h = op.solve_q(u_h, 0.5)
    # the Dirichlet node (right end) and Neumann node (left end) carry the
    # prescribed data, so their flux errors vanish even for a random state
    from ldgheat.solver import q_hat_values, u_hat_values

    u_hat = u_hat_values(u_h, FluxChoice.ALT2, problem.bc, 0.5)
    q_hat = q_hat_values(q_h, FluxChoice.ALT2, problem.bc, 0.5)
    assert u_hat[-1] == pytest.approx(problem.exact(2 * np.pi, 0.5, 0), rel=1e-12)
    assert q_hat[0] == pytest.approx(problem.exact(0.0, 0.5, 1), rel=1e-12)


def test_cell_average_zero_for_l2_projection():
    k = 3
    problem = builtin_problem("example1")
    mesh = build_mesh("uniform", 6)
    t = 0.0
    u_h = project_l2(lambda x: problem.exact(x, t, 0), mesh, k)
    q_h = project_l2(lambda x: problem.exact(x, t, 1), mesh, k)
    e_u_cell, e_q_cell, e_u_dom, e_q_dom = average_errors(u_h, q_h, problem.exact, t)
    assert e_u_cell <= 1e-14
    assert e_q_cell <= 1e-14
    assert e_u_dom <= 1e-14
    assert e_q_dom <= 1e-14


def test_domain_average_bounded_by_max_cell_average(example1_k3_record):
    for report in example1_k3_record.reports:
        n = report.n_cells
        # |domain avg| <= max_j |cell avg| since widths sum to the length
        assert report.e_u_dom <= math.sqrt(n) * report.e_u_cell + 1e-15


def test_radau_side_selection():
    assert radau_sides(FluxChoice.ALT1)["e_u_radau"] == "right"
    assert radau_sides(FluxChoice.ALT1)["e_ux_radau"] == "left"
    assert radau_sides(FluxChoice.ALT2)["e_u_radau"] == "left"
    assert radau_sides(FluxChoice.ALT2)["e_qx_radau"] == "left"


def test_radau_value_error_exact_state():
    problem = builtin_problem("example1")
    mesh = build_mesh("uniform", 4)
    u_h = PiecewisePoly(mesh, np.zeros((4, 3)))
    got = radau_value_error(u_h, lambda x, t, order=0: np.ones_like(x), 0.0, "right")
    assert got == pytest.approx(1.0)


def test_wrong_radau_side_converges_slower(example1_k3_record):
    # measuring u at the left points instead of the right ones loses about
    # one order; checked at the finest mesh pair of the periodic run
    problem = builtin_problem("example1")
    t = 1.0
    errs = {"right": [], "left": []}
    for n in (16, 32):
        mesh = build_mesh("split", n)
        op = SemidiscreteOp(mesh, 3, FluxChoice.ALT1, PERIODIC)
        from ldgheat.correction import initial_interpolant
        from ldgheat.timestep import StepPolicy, integrate

        u0, _ = initial_interpolant(problem.u0, mesh, 3, 3, FluxChoice.ALT1)
        u_h = integrate(op, u0, t, StepPolicy.h_squared(0.005))
        for side in ("right", "left"):
            errs[side].append(radau_value_error(u_h, problem.exact, t, side))
    rate_right = math.log2(errs["right"][0] / errs["right"][1])
    rate_left = math.log2(errs["left"][0] / errs["left"][1])
    assert rate_right - rate_left >= 0.5


def test_error_report_roundtrip_and_columns(example1_k3_record):
    report = example1_k3_record.reports[0]
    d = report.to_dict()
    back = ErrorReport.from_dict(d)
    assert back == report
    for col in ERROR_COLUMNS:
        assert report.value(col) >= 0.0
