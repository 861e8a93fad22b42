"""Acceptance checks for the solver and study harness.

Each criterion bundles many individual checks; a criterion passes only if
every check does.  The reference tables below are the published benchmark
values this artifact is measured against.  Where our measured errors are
smaller than the benchmark at the same convergence rate (the initialization
built here satisfies the exact telescoping identities, the benchmark's
evidently did not), or where double-precision roundoff floors step counts
in the millions, the affected checks fail one-sidedly; see the README for
the full account.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .correction import build_chain, defect_time_derivatives
from .legendre import RefPoly, eval_legendre, gauss_rule
from .mesh import FluxChoice, Mesh1D, PiecewisePoly, broken_l2_norm, build_mesh
from .problems import builtin_problem
from .projection import SmoothFn, project_minus, project_plus
from .solver import SemidiscreteOp, energy_identity_gap
from .study import StudyConfig, StudyRecord, emit, preset_config, run_study
from .timestep import StepPolicy, integrate


@dataclass
class CriterionResult:
    number: int
    title: str
    failures: list = field(default_factory=list)
    n_checks: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, detail: str):
        self.n_checks += 1
        if not ok:
            self.failures.append(detail)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        msg = f"criterion {self.number} [{status}] {self.title} ({self.n_checks} checks"
        if self.failures:
            msg += f", {len(self.failures)} failed: " + "; ".join(self.failures[:6])
            if len(self.failures) > 6:
                msg += f"; ... {len(self.failures) - 6} more"
        return msg + ")"


# Benchmark error tables: degree 3, split periodic run (columns in the
# ERROR_COLUMNS naming; the Radau columns are the flux-matched sides).
TABLE1 = {
    4:  dict(xi_u_L2=5.06e-04, e_u_radau=2.82e-04, e_ux_radau=1.72e-04, e_u_n=1.04e-04,
             e_u_star=5.92e-05, e_u_cell=7.57e-05, e_u_dom=3.12e-04,
             xi_q_L2=4.01e-04, e_q_radau=1.72e-04, e_qx_radau=2.41e-04, e_q_n=1.12e-04,
             e_q_star=6.67e-05, e_q_cell=3.74e-05),
    8:  dict(xi_u_L2=1.29e-05, e_u_radau=5.13e-06, e_ux_radau=4.14e-06, e_u_n=7.19e-07,
             e_u_star=4.17e-07, e_u_cell=5.11e-07, e_u_dom=2.00e-06,
             xi_q_L2=1.11e-05, e_q_radau=4.14e-06, e_qx_radau=4.76e-06, e_q_n=6.86e-07,
             e_q_star=4.12e-07, e_q_cell=3.18e-07),
    16: dict(xi_u_L2=3.92e-07, e_u_radau=1.35e-07, e_ux_radau=1.25e-07, e_u_n=5.65e-09,
             e_u_star=3.16e-09, e_u_cell=3.89e-09, e_u_dom=1.44e-08,
             xi_q_L2=3.44e-07, e_q_radau=1.25e-07, e_qx_radau=1.32e-07, e_q_n=5.24e-09,
             e_q_star=3.17e-09, e_q_cell=2.56e-09),
    32: dict(xi_u_L2=1.22e-08, e_u_radau=3.98e-09, e_ux_radau=3.92e-09, e_u_n=4.37e-11,
             e_u_star=2.44e-11, e_u_cell=3.01e-11, e_u_dom=1.08e-10,
             xi_q_L2=1.07e-08, e_q_radau=3.92e-09, e_qx_radau=3.98e-09, e_q_n=4.14e-11,
             e_q_star=2.47e-11, e_q_cell=2.02e-11),
}

# Degree 3, uniform mixed-boundary run.
TABLE3 = {
    4:  dict(xi_u_L2=5.08e-01, e_u_radau=2.63e-01, e_ux_radau=2.33e-01, e_u_n=5.50e-03,
             e_u_star=3.64e-03, e_u_cell=1.46e-02, e_u_dom=6.67e-02,
             xi_q_L2=5.99e-01, e_q_radau=2.33e-01, e_qx_radau=2.62e-01, e_q_n=4.48e-02,
             e_q_star=2.30e-02, e_q_cell=2.02e-03, e_q_dom=7.30e-04),
    8:  dict(xi_u_L2=1.89e-02, e_u_radau=1.06e-02, e_ux_radau=1.05e-02, e_u_n=2.57e-05,
             e_u_star=1.63e-05, e_u_cell=1.36e-04, e_u_dom=5.59e-04,
             xi_q_L2=2.07e-02, e_q_radau=1.05e-02, e_qx_radau=1.06e-02, e_q_n=4.68e-04,
             e_q_star=1.85e-04, e_q_cell=8.39e-06, e_q_dom=4.90e-06),
    16: dict(xi_u_L2=6.28e-04, e_u_radau=3.73e-04, e_ux_radau=3.85e-04, e_u_n=1.62e-07,
             e_u_star=9.89e-08, e_u_cell=1.13e-06, e_u_dom=4.46e-06,
             xi_q_L2=6.57e-04, e_q_radau=3.85e-04, e_qx_radau=3.73e-04, e_q_n=3.95e-06,
             e_q_star=1.32e-06, e_q_cell=5.22e-08, e_q_dom=3.62e-08),
    32: dict(xi_u_L2=2.00e-05, e_u_radau=1.24e-05, e_ux_radau=1.29e-05, e_u_n=1.16e-09,
             e_u_star=7.00e-10, e_u_cell=8.99e-09, e_u_dom=3.49e-08,
             xi_q_L2=2.05e-05, e_q_radau=1.29e-05, e_qx_radau=1.24e-05, e_q_n=3.14e-08,
             e_q_star=9.63e-09, e_q_cell=3.88e-10, e_q_dom=2.76e-10),
}

# Degree 4 benchmarks, the two columns the extended runs are held to.
TABLE2_K4 = {4: (2.34e-05, 1.47e-06), 8: (3.92e-07, 2.62e-09), 16: (6.21e-09, 5.06e-12)}
TABLE4_K4 = {4: (3.05e-02, 2.59e-05), 8: (5.61e-04, 3.60e-08), 16: (9.23e-06, 6.42e-11)}

RATE_FLOOR_K2 = 4.6   # k + 2 family, k = 3
RATE_FLOOR_2K1 = 6.5  # 2k + 1 family, k = 3


def _within_x3(result: CriterionResult, got: float, ref: float, label: str):
    ok = ref / 3.0 <= got <= 3.0 * ref
    result.check(ok, f"{label}: got {got:.3e}, benchmark {ref:.2e} (ratio {got / ref:.3f})")


def criterion_1_algebra() -> CriterionResult:
    res = CriterionResult(1, "projection/antiderivative/chain/energy algebra")
    rng = np.random.default_rng(101)

    # Gauss-Radau projections reproduce broken degree-k data exactly
    mesh = build_mesh("split", 6)
    for k in (1, 2, 3, 4):
        p = PiecewisePoly(mesh, rng.uniform(-1, 1, (6, k + 1)))
        for name, proj in (("minus", project_minus), ("plus", project_plus)):
            gap = np.abs(proj(p, mesh, k).coeffs - p.coeffs).max()
            res.check(gap <= 1e-13, f"projection {name} not exact on P_{k}: {gap:.2e}")

    # endpoint exactness for smooth data
    u0 = builtin_problem("example1").u0
    for k in (1, 2, 3, 4):
        pm = project_minus(u0, mesh, k)
        pp = project_plus(u0, mesh, k)
        em = np.abs(pm.minus_traces() - np.sin(mesh.boundaries[1:])).max()
        ep = np.abs(pp.plus_traces() - np.sin(mesh.boundaries[:-1])).max()
        res.check(em <= 1e-12, f"right-endpoint exactness k={k}: {em:.2e}")
        res.check(ep <= 1e-12, f"left-endpoint exactness k={k}: {ep:.2e}")

    # antiderivative mode rule, exactly
    anti0 = RefPoly((1.0,)).antiderivative().coeffs
    res.check(anti0 == (1.0, 1.0), "antiderivative of mode 0")
    for m in range(1, 13):
        coeffs = (0.0,) * m + (1.0,)
        got = RefPoly(coeffs).antiderivative().coeffs
        expect = [0.0] * (m + 2)
        expect[m + 1] = 1.0 / (2 * m + 1)
        expect[m - 1] = -1.0 / (2 * m + 1)
        res.check(got == tuple(expect), f"antiderivative mode rule m={m}")

    # chain seeds and band/trace structure
    for k in range(1, 9):
        ch = build_chain(k)
        seed = ch.odd_left[0].padded(k + 1)
        expect = np.zeros(k + 1)
        expect[k] = expect[k - 1] = -1.0 / (2 * k + 1)
        res.check(np.abs(seed - expect).max() <= 1e-13, f"first chain member k={k}")
        families = [
            (ch.odd_left, ch.odd_left_pairs, +1, 2),
            (ch.odd_right, ch.odd_right_pairs, -1, 2),
            (ch.even_right, ch.even_right_pairs, -1, 1),
            (ch.even_left, ch.even_left_pairs, +1, 1),
        ]
        for members, tables, sign, off in families:
            for i, (poly, pairs) in enumerate(zip(members, tables), start=1):
                trace = poly.at_minus_one() if sign > 0 else poly.at_one()
                res.check(abs(trace) <= 1e-13, f"chain trace k={k} i={i}: {abs(trace):.2e}")
                c = poly.padded(k + 1)
                rebuilt = np.zeros(k + 1)
                for m in range(k + 1):
                    rebuilt[m] += pairs[m]
                    if m >= 1:
                        rebuilt[m - 1] += sign * pairs[m]
                res.check(np.abs(rebuilt - c).max() <= 1e-13, f"chain band k={k} i={i}")
                low = k - 2 * i + off
                lead = np.abs(pairs[: max(low, 0)]).max(initial=0.0)
                res.check(lead <= 1e-13, f"chain band support k={k} i={i}")

    # energy identities over random trials
    for flux in (FluxChoice.ALT1, FluxChoice.ALT2):
        worst = 0.0
        for _ in range(100):
            k = int(rng.integers(1, 5))
            n = int(rng.integers(2, 9))
            m = build_mesh("uniform", n)
            v = PiecewisePoly(m, rng.uniform(-1, 1, (n, k + 1)))
            w = PiecewisePoly(m, rng.uniform(-1, 1, (n, k + 1)))
            v_t = PiecewisePoly(m, rng.uniform(-1, 1, (n, k + 1)))
            scale = (broken_l2_norm(v) + broken_l2_norm(w) + broken_l2_norm(v_t)) ** 2
            worst = max(worst, energy_identity_gap(v, w, v_t, flux) / max(scale, 1.0))
        res.check(worst <= 1e-12, f"energy identity {flux.value}: worst scaled gap {worst:.2e}")
    return res


def criterion_2_table1(record: StudyRecord) -> CriterionResult:
    res = CriterionResult(2, "degree-3 periodic split-mesh benchmark table")
    for report in record.reports:
        refs = TABLE1[report.n_cells]
        for col, ref in refs.items():
            _within_x3(res, report.value(col), ref, f"N={report.n_cells} {col}")
        res.check(
            report.e_q_dom <= 1e-12,
            f"N={report.n_cells} e_q_dom={report.e_q_dom:.2e} > 1e-12",
        )
    return res


def _rate_checks(res: CriterionResult, record: StudyRecord, include_q_dom: bool):
    k2 = ["xi_u_L2", "e_u_radau", "e_ux_radau", "xi_q_L2", "e_q_radau", "e_qx_radau"]
    k21 = ["e_u_n", "e_u_star", "e_u_dom", "e_u_cell", "e_q_n", "e_q_star", "e_q_cell"]
    if include_q_dom:
        k21.append("e_q_dom")
    for col in k2:
        got = record.rates[col][-1]
        res.check(
            got is not None and got >= RATE_FLOOR_K2,
            f"rate({col})={got if got is None else round(got, 2)} < {RATE_FLOOR_K2}",
        )
    for col in k21:
        got = record.rates[col][-1]
        res.check(
            got is not None and got >= RATE_FLOOR_2K1,
            f"rate({col})={got if got is None else round(got, 2)} < {RATE_FLOOR_2K1}",
        )


def criterion_3_rates(record: StudyRecord) -> CriterionResult:
    res = CriterionResult(3, "superconvergence rates, periodic run, finest pair")
    _rate_checks(res, record, include_q_dom=False)
    return res


def criterion_4_table3(record: StudyRecord) -> CriterionResult:
    res = CriterionResult(4, "degree-3 mixed-boundary benchmark table and rates")
    for report in record.reports:
        refs = TABLE3[report.n_cells]
        for col, ref in refs.items():
            _within_x3(res, report.value(col), ref, f"N={report.n_cells} {col}")
    _rate_checks(res, record, include_q_dom=True)
    return res


def criterion_5_k4(rec_periodic: StudyRecord, rec_mixed: StudyRecord) -> CriterionResult:
    res = CriterionResult(5, "degree-4 extended runs")
    for rec, table, tag in ((rec_periodic, TABLE2_K4, "periodic"), (rec_mixed, TABLE4_K4, "mixed")):
        for report in rec.reports:
            xi_ref, eun_ref = table[report.n_cells]
            _within_x3(res, report.xi_u_L2, xi_ref, f"{tag} N={report.n_cells} xi_u_L2")
            _within_x3(res, report.e_u_n, eun_ref, f"{tag} N={report.n_cells} e_u_n")
        xi_rate = rec.rates["xi_u_L2"][-1]
        eun_rate = rec.rates["e_u_n"][-1]
        res.check(xi_rate >= 5.6, f"{tag} rate(xi_u_L2)={xi_rate:.2f} < 5.6")
        res.check(eun_rate >= 8.4, f"{tag} rate(e_u_n)={eun_rate:.2f} < 8.4")
    return res


def criterion_6_ablation(record: StudyRecord, ablated: StudyRecord) -> CriterionResult:
    res = CriterionResult(6, "initialization ablation, nodal rate drop")
    xi_rate = ablated.rates["xi_u_L2"][-1]
    eun_rate = ablated.rates["e_u_n"][-1]
    res.check(xi_rate >= RATE_FLOOR_K2, f"ablated rate(xi_u_L2)={xi_rate:.2f} < {RATE_FLOOR_K2}")
    res.check(
        eun_rate < RATE_FLOOR_2K1,
        f"ablated rate(e_u_n)={eun_rate:.2f} not < {RATE_FLOOR_2K1} "
        "(parabolic smoothing erases the init transient by T=1)",
    )
    return res


def criterion_7_oracles() -> CriterionResult:
    res = CriterionResult(7, "stepper and deficiency oracles")
    # one explicit step vs the degree-4 Taylor polynomial of the dense operator
    n, k = 4, 1
    mesh = build_mesh("uniform", n)
    op = SemidiscreteOp(mesh, k, FluxChoice.ALT1, builtin_problem("example1").bc)
    size = n * (k + 1)
    dense = np.zeros((size, size))
    for i in range(size):
        e = np.zeros(size)
        e[i] = 1.0
        dense[:, i] = op._rhs(e.reshape(n, k + 1), 0.0).ravel()
    rng = np.random.default_rng(7)
    u0 = rng.uniform(-1, 1, (n, k + 1))
    dt = 0.01 * mesh.h_min**2
    stepped = integrate(op, PiecewisePoly(mesh, u0), dt, StepPolicy.fixed_steps(1))
    taylor = np.eye(size)
    term = np.eye(size)
    for j in range(1, 5):
        term = term @ dense * (dt / j)
        taylor = taylor + term
    gap = np.abs(stepped.coeffs - (taylor @ u0.ravel()).reshape(n, k + 1)).max()
    res.check(gap <= 1e-12, f"single-step Taylor oracle gap {gap:.2e}")

    # deficiency coefficients vs literal 64-node quadrature of their formulas
    rule = gauss_rule(64)
    k = 3
    mesh = Mesh1D(np.array([0.2, 1.1, 2.9, 2 * np.pi]))
    for name in ("example1", "example2"):
        problem = builtin_problem(name)
        flux = FluxChoice.ALT1 if name == "example1" else FluxChoice.ALT2
        g, q = defect_time_derivatives(problem.u0, mesh, k, flux, n_u=2, n_q=1)
        for rows, start_order, kinds in ((g, 0, ("minus", "plus")), (q, 1, ("plus", "minus"))):
            kind = kinds[0] if flux is FluxChoice.ALT1 else kinds[1]
            for i in range(rows.shape[0]):
                fn = problem.u0.derivative(start_order + 2 * i)
                for j in range(mesh.n_cells):
                    x = mesh.centers[j] + mesh.half_widths[j] * rule.nodes
                    vals = fn(x)
                    if kind == "minus":
                        acc = -fn(mesh.boundaries[j + 1])
                        for m in range(k + 1):
                            lm = np.array([eval_legendre(m, s) for s in rule.nodes])
                            acc += (2 * m + 1) / 2.0 * float(rule.weights @ (vals * lm))
                    else:
                        acc = ((-1.0) ** (k + 1)) * fn(mesh.boundaries[j])
                        for m in range(k + 1):
                            lm = np.array([eval_legendre(m, s) for s in rule.nodes])
                            acc += ((-1.0) ** (k + m)) * (2 * m + 1) / 2.0 * float(
                                rule.weights @ (vals * lm)
                            )
                    scale = max(abs(acc), 1.0)
                    ok = abs(rows[i, j] - acc) <= 1e-12 * scale
                    res.check(ok, f"{name} row {i} cell {j}: {abs(rows[i, j] - acc):.2e}")
    return res


def ablation_config() -> StudyConfig:
    base = preset_config("example1-k3").to_dict()
    base.update(init_mode="projection", init_order=None)
    return StudyConfig.from_dict(base)


def run_acceptance(full: bool = False, out_dir=None) -> list:
    """Run every criterion; k=4 runs (criterion 5) only with full=True."""
    rec1 = run_study(preset_config("example1-k3"))
    rec_abl = run_study(ablation_config())
    rec2 = run_study(preset_config("example2-k3"))
    results = [
        criterion_1_algebra(),
        criterion_2_table1(rec1),
        criterion_3_rates(rec1),
        criterion_4_table3(rec2),
    ]
    if full:
        rec14 = run_study(preset_config("example1-k4"))
        rec24 = run_study(preset_config("example2-k4"))
        results.append(criterion_5_k4(rec14, rec24))
    results.append(criterion_6_ablation(rec1, rec_abl))
    results.append(criterion_7_oracles())
    if out_dir is not None:
        emit(rec1, "all", out_dir, stem="example1-k3")
        emit(rec2, "all", out_dir, stem="example2-k3")
        emit(rec_abl, "all", out_dir, stem="example1-k3-ablation")
    return sorted(results, key=lambda r: r.number)
