"""
Tests for KKT, weak BCQ, multiplier, membership and sequential certificates
"""

import numpy as np
import pytest
import yaml

from smpec.certify import (
    BcqVerdict,
    CertificationCoordinator,
    CertificationJob,
    dump_reports,
    kkt_certificate,
    membership_check,
    multiplier_certificate,
    sequential_residuals,
    weak_bcq_check,
)
from smpec.certify.weak_bcq import hull_to_cone_distance, relative_boundary_faces
from smpec.config import SolveConfig
from smpec.errors import (
    LowerLevelInfeasible,
    PointNotInSet,
    UncertifiedInput,
    UnsupportedSetDimension,
)
from smpec.gap import eval_gap
from smpec.instances import get_demo
from smpec.model import Box, ConvexObjective, MonotoneMap, Polytope, ProblemInstance
from smpec.solver import SolveTrace, TraceStatus, solve_smpec

KNOWN_POINTS = {
    "example-3-1": [0.0],
    "example-3-2": [0.0, 0.0],
    "min-norm-lp": [1.0, 1.0],
    "distance-estimation": [0.0, 1.0],
    "basis-pursuit": [0.5, 0.5],
}

# known solution + 0.1 along a feasible direction with strictly worse f
PERTURBED_POINTS = {
    "example-3-1": [0.1],
    "example-3-2": [0.1, 0.0],
    "min-norm-lp": [1.1, 1.0],
    "distance-estimation": [0.0, 0.9],
    "basis-pursuit": [0.6, 0.5],
}


def _identity_black_box():
    return ProblemInstance(
        objective=ConvexObjective.squared_norm(1),
        map=MonotoneMap.black_box(lambda y: y, 1),
        set=Box([-1.0], [1.0]),
        dimension=1,
        name="identity-black-box",
    )


class TestKktCertificate:
    """0 in df(x̄) + sum lambda_i F(y_i) + N_C(x̄) with complementarity"""

    @pytest.mark.parametrize("name", sorted(KNOWN_POINTS))
    def test_certifies_known_solutions(self, name):
        inst = get_demo(name).instance()
        cert = kkt_certificate(inst, KNOWN_POINTS[name], tol=1e-6)
        assert cert.certified
        assert cert.stationarity_residual <= 1e-6
        assert cert.complementarity_residual <= 1e-6
        assert all(m >= 0 for m in cert.multipliers)
        assert len(cert.points) <= inst.dimension + 1

    def test_complementarity_holds_for_every_point(self, min_norm_lp):
        x_bar = np.array([1.0, 1.0])
        cert = kkt_certificate(min_norm_lp, x_bar)
        for y in cert.points:
            assert abs(min_norm_lp.map(y) @ (x_bar - y)) <= 1e-6

    def test_nonsmooth_objective_uses_subdifferential(self, basis_pursuit):
        cert = kkt_certificate(basis_pursuit, [0.0, 1.0])
        assert cert.certified
        # u1 is free in [-1, 1] at the kink x1 = 0
        assert -1.0 <= cert.u[0] <= 1.0
        assert cert.u[1] == pytest.approx(1.0)

    def test_large_multipliers_are_flagged(self, distance_estimation):
        cert = kkt_certificate(distance_estimation, [0.0, 1.0], tol=1e-6)
        assert cert.certified
        assert max(cert.multipliers) > 1e2

    def test_distance_perturbation_not_certified(self, distance_estimation):
        cert = kkt_certificate(distance_estimation, PERTURBED_POINTS["distance-estimation"])
        assert not cert.certified
        assert cert.stationarity_residual > 1.0

    def test_lower_level_infeasible(self, example_3_2):
        with pytest.raises(LowerLevelInfeasible) as exc_info:
            kkt_certificate(example_3_2, [0.1, 0.0])
        assert exc_info.value.gap == pytest.approx(0.1)
        assert exc_info.value.exit_code == 5

    def test_point_outside_set(self, example_3_2):
        with pytest.raises(PointNotInSet):
            kkt_certificate(example_3_2, [-1.0, 0.0])

    def test_to_dict(self, example_3_1):
        data = kkt_certificate(example_3_1, [0.0]).to_dict()
        assert data["verdict"] == "certified"
        assert set(data["residuals"]) == {"stationarity", "complementarity"}

    def test_black_box_map_rejected(self):
        with pytest.raises(UncertifiedInput):
            kkt_certificate(_identity_black_box(), [0.0])


class TestWeakBcq:
    """dg_D(x̄) ∩ (-bd N_C(x̄)) = ∅"""

    def test_fails_on_example_3_1(self, example_3_1):
        diag = weak_bcq_check(example_3_1, [0.0])
        assert diag.verdict == BcqVerdict.FAILS
        assert np.allclose(diag.witness, [0.0], atol=1e-8)
        assert diag.cone_dimension == 0

    def test_holds_on_example_3_2(self, example_3_2):
        diag = weak_bcq_check(example_3_2, [0.0, 0.0])
        assert diag.verdict == BcqVerdict.HOLDS
        assert diag.distance == pytest.approx(1.0, abs=1e-6)
        assert diag.witness is None

    def test_faces_of_quadrant(self):
        G = np.array([[-1.0, 0.0], [0.0, -1.0]])
        dim, faces = relative_boundary_faces(G)
        assert dim == 2
        assert sorted(f.shape[1] for f in faces) == [1, 1]

    def test_faces_of_ray(self):
        dim, faces = relative_boundary_faces(np.array([[1.0], [0.0]]))
        assert dim == 1
        assert [f.shape[1] for f in faces] == [0]

    def test_line_has_no_boundary(self):
        dim, faces = relative_boundary_faces(np.array([[1.0, -1.0]]))
        assert dim == 1
        assert faces == []

    def test_hull_to_cone_distance(self):
        H = np.array([[1.0], [1.0]])
        dist, point = hull_to_cone_distance(H, np.array([[-1.0], [0.0]]))
        assert dist == pytest.approx(1.0, abs=1e-6)
        assert np.allclose(point, [1.0, 1.0])

    def test_high_dimensional_polytope_rejected(self):
        n = 4
        eye = np.eye(n)
        inst = ProblemInstance(
            objective=ConvexObjective.squared_norm(n),
            map=MonotoneMap.affine(eye, np.zeros(n)),
            set=Polytope(np.vstack([eye, -eye]), np.ones(2 * n)),
            dimension=n,
        )
        with pytest.raises(UnsupportedSetDimension) as exc_info:
            weak_bcq_check(inst, np.zeros(n))
        assert exc_info.value.dimension == n


class TestMultiplierCertificate:
    def test_example_3_2(self, example_3_2):
        cert = multiplier_certificate(example_3_2, [0.0, 0.0])
        assert cert.certified
        assert cert.scalar_multiplier >= 0.0
        assert cert.notes

    def test_min_norm_lp_needs_positive_multiplier(self, min_norm_lp):
        cert = multiplier_certificate(min_norm_lp, [1.0, 1.0])
        assert cert.certified
        assert cert.scalar_multiplier > 0.0
        assert sum(cert.convex_weights) == pytest.approx(1.0)

    def test_not_certified_off_solution_set(self, distance_estimation):
        cert = multiplier_certificate(distance_estimation, [0.0, 0.9])
        assert not cert.certified

    def test_black_box_map_rejected(self):
        with pytest.raises(UncertifiedInput):
            multiplier_certificate(_identity_black_box(), [0.0])


class TestMembership:
    """Solution-set membership from a certified point"""

    @pytest.fixture
    def basis_pursuit_cert(self, basis_pursuit):
        cert = kkt_certificate(basis_pursuit, [0.5, 0.5])
        assert cert.certified
        return cert

    @pytest.mark.parametrize("t", [0.0, 0.25, 1.0])
    def test_accepts_segment_points(self, basis_pursuit, basis_pursuit_cert, t):
        report = membership_check(basis_pursuit, basis_pursuit_cert, [0.5, 0.5], [t, 1.0 - t])
        assert report.verdict, report.to_dict()

    def test_rejects_point_with_worse_objective(self, basis_pursuit, basis_pursuit_cert):
        report = membership_check(basis_pursuit, basis_pursuit_cert, [0.5, 0.5], [1.5, -0.5])
        assert not report.verdict
        assert not report.checks["subgradient_orthogonal"]

    def test_rejects_point_outside_set(self, basis_pursuit, basis_pursuit_cert):
        report = membership_check(basis_pursuit, basis_pursuit_cert, [0.5, 0.5], [20.0, 0.0])
        assert not report.verdict
        assert report.checks == {"in_set": False}

    def test_requires_certified_input(self, distance_estimation):
        cert = kkt_certificate(distance_estimation, [0.0, 0.9])
        with pytest.raises(UncertifiedInput):
            membership_check(distance_estimation, cert, [0.0, 0.9], [0.0, 1.0])


class TestSequentialResiduals:
    """Residual tails along converged regularization traces"""

    @pytest.mark.parametrize("name", sorted(KNOWN_POINTS))
    def test_tails_small_on_converged_runs(self, demo_runs, name):
        inst, trace = demo_runs[name]
        assert trace.status == TraceStatus.THRESHOLD_MET
        residuals = sequential_residuals(inst, trace)
        assert residuals.within(1e-3), residuals.tail_maxima
        for combo in residuals.combinations:
            assert sum(combo.weights) == pytest.approx(1.0, abs=1e-12)
            assert all(w >= 0 for w in combo.weights)
            assert len(combo.points) <= inst.dimension + 1

    def test_divergent_run_keeps_distance_residual(self, min_norm_lp):
        trace = solve_smpec(min_norm_lp, SolveConfig(epsilon0=1.0, mu=0.0, max_outer=3))
        residuals = sequential_residuals(min_norm_lp, trace)
        assert len(residuals.r2) == 3
        assert residuals.r2[-1] == pytest.approx(0.0)

    def test_empty_trace_rejected(self, example_3_1):
        with pytest.raises(ValueError):
            sequential_residuals(example_3_1, SolveTrace())

    @pytest.mark.parametrize(
        "name", ["example-3-1", "example-3-2", "distance-estimation", "basis-pursuit"]
    )
    def test_tails_small_against_known_solution(self, demo_runs, name):
        inst, trace = demo_runs[name]
        residuals = sequential_residuals(inst, trace, inst.known_solution)
        assert residuals.within(1e-3), residuals.tail_maxima

    @pytest.mark.parametrize("name", ["distance-estimation", "basis-pursuit"])
    def test_multi_step_runs_are_not_trivially_small(self, demo_runs, name):
        """Two outer steps, and the first one is still measurably away from the solution"""
        inst, trace = demo_runs[name]
        assert len(trace) == 2
        residuals = sequential_residuals(inst, trace, inst.known_solution)
        assert residuals.r2[0] > 1e-4
        assert residuals.r2[1] < residuals.r2[0]

    def test_complementarity_residual_scales_the_subgradient(self, distance_estimation):
        """r3 = lambda_k g_D(x_k) - <lambda_k sum mu_i F(y_i), x_k - x̄>, recomputed"""
        trace = solve_smpec(distance_estimation, SolveConfig(max_outer=12))
        assert len(trace) == 12
        x_bar = trace.final_x
        residuals = sequential_residuals(distance_estimation, trace, x_bar)
        for rec, r3 in zip(trace.records, residuals.r3):
            ev = eval_gap(distance_estimation, rec.x)
            mixed = distance_estimation.map(ev.maximizers[0])
            lam = rec.penalty
            expected = lam * ev.value - (lam * mixed) @ (rec.x - x_bar)
            assert r3 == pytest.approx(expected, rel=1e-6, abs=1e-12)

    def test_complementarity_residual_closed_form(self, distance_estimation):
        """F = (2 x1, 0) gives g_D = x1^2 / 2 and v = (x1, 0), so r3 = lambda x1 (x̄1 - x1 / 2)"""
        trace = solve_smpec(distance_estimation, SolveConfig(max_outer=4))
        x_bar = trace.final_x
        residuals = sequential_residuals(distance_estimation, trace, x_bar)
        for rec, r3 in zip(trace.records, residuals.r3):
            x1 = rec.x[0]
            expected = rec.penalty * x1 * (x_bar[0] - x1 / 2)
            assert r3 == pytest.approx(expected, rel=1e-3, abs=1e-6)


class TestCertificationCoordinator:
    """Combined reports and batch certification"""

    def test_report_on_known_point(self, example_3_2):
        report = CertificationCoordinator().certify(example_3_2, [0.0, 0.0])
        assert report.certified
        assert [c.name for c in report.checks] == ["kkt", "weak_bcq", "multiplier"]
        assert report.check("weak_bcq").passed

    def test_weak_bcq_failure_does_not_block_verdict(self, example_3_1):
        report = CertificationCoordinator().certify(example_3_1, [0.0])
        assert report.certified
        assert not report.check("weak_bcq").passed

    @pytest.mark.parametrize("name", sorted(PERTURBED_POINTS))
    def test_perturbed_points_fail(self, name):
        inst = get_demo(name).instance()
        report = CertificationCoordinator().certify(inst, PERTURBED_POINTS[name], tol=1e-6)
        assert not report.certified

    def test_infeasible_point_recorded_as_failed_check(self, example_3_2):
        report = CertificationCoordinator().certify(example_3_2, [0.1, 0.0])
        kkt = report.check("kkt")
        assert not kkt.passed
        assert "error" in kkt.metadata
        assert report.kkt is None

    def test_black_box_recorded_as_failed_checks(self):
        report = CertificationCoordinator().certify(_identity_black_box(), [0.0])
        assert not report.certified
        assert "error" in report.check("kkt").metadata
        assert "error" in report.check("multiplier").metadata
        assert report.check("weak_bcq").metadata["verdict"] == "inconclusive"

    def test_sequential_check_with_trace(self, demo_runs):
        inst, trace = demo_runs["example-3-2"]
        report = CertificationCoordinator().certify(inst, trace.final_x, trace)
        assert report.check("sequential").passed
        assert report.sequential is not None

    def test_yaml_report(self, example_3_2, temp_dir):
        report = CertificationCoordinator().certify(example_3_2, [0.0, 0.0])
        path = temp_dir / "report.yaml"
        report.to_yaml(path)
        data = yaml.safe_load(path.read_text())
        assert data["verdict"] == "certified"
        assert data["instance"] == "example-3-2"
        assert data["weak_bcq"]["verdict"] == "holds"

    @pytest.mark.asyncio
    async def test_batch_preserves_order(self, example_3_1, example_3_2, temp_dir):
        coordinator = CertificationCoordinator()
        jobs = [
            CertificationJob(example_3_2, [0.0, 0.0]),
            CertificationJob(example_3_1, [0.0]),
            CertificationJob(example_3_2, [0.1, 0.0]),
        ]
        reports = await coordinator.certify_batch(jobs)
        assert [r.instance for r in reports] == ["example-3-2", "example-3-1", "example-3-2"]
        assert [r.certified for r in reports] == [True, True, False]

        path = temp_dir / "reports.yaml"
        dump_reports(reports, path)
        docs = list(yaml.safe_load_all(path.read_text()))
        assert len(docs) == 3

    @pytest.mark.asyncio
    async def test_empty_batch(self):
        assert await CertificationCoordinator().certify_batch([]) == []

    def test_nearest_point_on_solution_face(self):
        inst = ProblemInstance(
            objective=ConvexObjective.quadratic_distance([2.0, 0.0]),
            map=MonotoneMap.affine(np.zeros((2, 2)), [0.0, 1.0]),
            set=Box([0.0, 0.0], [1.0, 1.0]),
            dimension=2,
        )
        # sol(VI) = [0, 1] x {0}; nearest point to (2, 0) is (1, 0)
        report = CertificationCoordinator().certify(inst, [1.0, 0.0])
        assert report.certified
