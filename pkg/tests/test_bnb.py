import numpy as np
import pytest

from irsdfrc import numerics
from irsdfrc.bnb import (
    BnbReport,
    PhaseBox,
    arc_linear_max,
    branch,
    lower_bound,
    solve_bnb,
    solve_mbnb,
    upper_bound,
)
from irsdfrc.errors import ContractError
from irsdfrc.mm import (
    QuadraticSurrogate,
    minorize_quartic,
    quartic_factors,
    solve_mm,
    surrogate_value,
    update_phases,
)
from irsdfrc.oracle import grid_search_surrogate
from irsdfrc.scenario import TWO_PI, PhaseVector, Precoder, design_objective

from conftest import eigen_precoder, random_phase, small_scenario
from oracles import assert_monotone_nondecreasing, dense_arc_scan


def _random_surrogate(seed, n=3):
    """Surrogate built from a real instance so its scale is representative."""
    s = small_scenario(seed, n_irs_y=n)
    rng = np.random.default_rng(seed + 1000)
    w = Precoder.scaled_to_power(
        rng.standard_normal(s.config.n_tx) + 1j * rng.standard_normal(s.config.n_tx),
        s.config.power_budget,
    )
    qf = quartic_factors(s, w)
    return minorize_quartic(qf, random_phase(n, seed + 2000), alpha=0.8)


def _random_box(rng, n):
    lower = rng.uniform(0.0, TWO_PI, size=n)
    width = rng.uniform(0.3, TWO_PI - 0.1, size=n)
    upper = np.minimum(lower + width, TWO_PI)
    return PhaseBox(lower, upper)


class TestArcLinearMax:
    def test_full_arc_matches_closed_form(self, rng):
        for _ in range(10):
            nu, eta = (complex(*rng.standard_normal(2)) for _ in range(2))
            angle, value = arc_linear_max(nu, eta, 0.0, TWO_PI)
            assert value == pytest.approx(abs(nu + np.conj(eta)), rel=1e-12)

    def test_endpoint_case(self):
        angle, value = arc_linear_max(1.0, 0.0, np.pi / 2, np.pi)
        assert angle == pytest.approx(np.pi / 2)
        assert value == pytest.approx(0.0, abs=1e-15)

    def test_matches_dense_scan(self, rng):
        for _ in range(20):
            nu, eta = (complex(*rng.standard_normal(2)) for _ in range(2))
            lower = float(rng.uniform(0, TWO_PI))
            upper = lower + float(rng.uniform(0.1, TWO_PI - lower if lower < TWO_PI else 0.1))
            upper = min(upper, lower + TWO_PI)
            angle, value = arc_linear_max(nu, eta, lower, upper)
            _, ref = dense_arc_scan(nu, eta, lower, upper, 1_000_000)
            assert value >= ref - 1e-9
            assert value <= ref + 1e-5 * max(1.0, abs(ref)) + 1e-9

    def test_zero_coefficients(self):
        angle, value = arc_linear_max(0.0, 0.0, 1.0, 2.0)
        assert angle == 1.0 and value == 0.0


class TestUpperBound:
    def test_point_box_tangent(self):
        qs = _random_surrogate(1)
        shift = numerics.largest_eig_upper_bound(qs.q_mat)
        point = random_phase(3, 5)
        box = PhaseBox(point.angles.copy(), point.angles.copy())
        got = upper_bound(qs, box, shift)
        want = surrogate_value(qs, point)
        assert got == pytest.approx(want, rel=1e-8)

    def test_linear_case_exact(self, rng):
        n = 3
        lin_h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        lin_t = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        qs = QuadraticSurrogate(np.zeros((n, n)), lin_h, lin_t, 0.25)
        bound = upper_bound(qs, PhaseBox.full(n), 0.0)
        expected = float(np.sum(np.abs(lin_h + np.conj(lin_t)))) + 0.25
        assert bound == pytest.approx(expected, rel=1e-12)

    def test_sound_against_restricted_grid(self):
        rng = np.random.default_rng(9)
        violations = 0
        for seed in range(50):
            qs = _random_surrogate(seed)
            box = _random_box(rng, 3)
            shift = numerics.largest_eig_upper_bound(qs.q_mat)
            bound = upper_bound(qs, box, shift)
            _, grid_best = grid_search_surrogate(qs, 24, box=box)
            if bound < grid_best - 1e-9 * max(1.0, abs(grid_best)):
                violations += 1
        assert violations == 0

    def test_invalid_shift_rejected(self):
        qs = _random_surrogate(2)
        with pytest.raises(ContractError):
            upper_bound(qs, PhaseBox.full(3), numerics.smallest_eig_lower_bound(qs.q_mat) - 1.0)


class TestLowerBound:
    def test_point_box(self):
        qs = _random_surrogate(3)
        point = random_phase(3, 6)
        box = PhaseBox(point.angles.copy(), point.angles.copy())
        phi, value = lower_bound(qs, box)
        assert value == pytest.approx(surrogate_value(qs, point), rel=1e-12)

    def test_linear_case_attains_optimum(self, rng):
        n = 3
        lin_h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        qs = QuadraticSurrogate(np.zeros((n, n)), lin_h, np.zeros(n), 0.0)
        phi, value = lower_bound(qs, PhaseBox.full(n))
        assert value == pytest.approx(float(np.sum(np.abs(lin_h))), rel=1e-10)

    def test_never_exceeds_upper_bound(self):
        rng = np.random.default_rng(17)
        for seed in range(200):
            qs = _random_surrogate(seed % 20)
            box = _random_box(rng, 3)
            shift = numerics.largest_eig_upper_bound(qs.q_mat)
            _, lb = lower_bound(qs, box)
            ub = upper_bound(qs, box, shift)
            assert lb <= ub + 1e-9 * max(1.0, abs(ub))

    def test_feasible_within_box(self):
        rng = np.random.default_rng(21)
        qs = _random_surrogate(4)
        box = _random_box(rng, 3)
        phi, _ = lower_bound(qs, box)
        # Angles live on the circle; membership is modulo 2*pi.
        offset = np.mod(phi.angles - box.lower, TWO_PI)
        width = box.upper - box.lower
        assert np.all(offset <= width + 1e-9)


class TestBranch:
    def test_splits_widest(self):
        box = PhaseBox(np.zeros(2), np.array([TWO_PI, np.pi]))
        left, right = branch(box)
        assert left.upper[0] == pytest.approx(np.pi)
        assert right.lower[0] == pytest.approx(np.pi)
        assert left.upper[1] == np.pi and right.upper[1] == np.pi

    def test_children_partition_parent(self, rng):
        box = _random_box(rng, 3)
        left, right = branch(box)
        j = int(np.argmax(box.widths()))
        assert left.lower[j] == box.lower[j]
        assert left.upper[j] == right.lower[j]
        assert right.upper[j] == box.upper[j]

    def test_geometric_width_decay(self):
        box = PhaseBox.full(1)
        for _ in range(10):
            box, _ = branch(box)
        assert box.widths()[0] == pytest.approx(TWO_PI / 2**10)


class TestSolveBnb:
    def test_linear_surrogate_exits_at_root(self, rng):
        n = 3
        lin_h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        lin_t = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        qs = QuadraticSurrogate(np.zeros((n, n)), lin_h, lin_t, 0.0)
        report = solve_bnb(qs, eps=1e-9)
        assert report.converged
        assert report.nodes_expanded == 0
        assert report.gap <= 1e-9
        closed_form = update_phases(lin_h, lin_t)
        assert report.incumbent_value == pytest.approx(surrogate_value(qs, closed_form), rel=1e-10)

    def test_reaches_grid_max_with_certified_gap(self):
        for seed in (0, 1, 2):
            qs = _random_surrogate(seed)
            scale = 1.0 + abs(surrogate_value(qs, random_phase(3, 0)))
            eps = 1e-3 * scale
            report = solve_bnb(qs, eps=eps, max_nodes=200_000)
            assert report.converged
            assert report.gap <= eps
            _, grid_best = grid_search_surrogate(qs, 64)
            assert report.incumbent_value >= grid_best - eps - 1e-9
            assert report.global_upper_bound >= grid_best - 1e-9

    def test_incumbent_history_monotone(self):
        qs = _random_surrogate(5)
        report = solve_bnb(qs, eps=1e-2 * (1.0 + abs(qs.const_term)), max_nodes=5000)
        assert_monotone_nondecreasing(report.incumbent_history, slack=0.0)

    def test_gap_nonnegative(self):
        qs = _random_surrogate(6)
        report = solve_bnb(qs, eps=1e-3, max_nodes=100)
        assert report.gap >= -1e-9

    def test_node_budget_flagged(self):
        qs = _random_surrogate(7)
        report = solve_bnb(qs, eps=1e-12, max_nodes=5)
        assert not report.converged
        assert report.nodes_expanded == 5

    def test_warm_start_respected(self):
        qs = _random_surrogate(8)
        warm = random_phase(3, 99)
        report = solve_bnb(qs, eps=1e6, max_nodes=10, warm_starts=(warm,))
        assert report.incumbent_value >= surrogate_value(qs, warm) - 1e-12


class TestSolveMbnb:
    def test_monotone_outer_trace(self):
        for seed in range(3):
            s = small_scenario(seed + 300)
            phi0 = random_phase(3, seed + 310)
            w = eigen_precoder(s, phi0, 0.9)
            phi, trace = solve_mbnb(s, w, phi0, 0.9, max_nodes=2000)
            assert_monotone_nondecreasing(trace.objective)
            assert max(trace.unit_dev) < 1e-12

    def test_dominates_plain_mm(self):
        for seed in range(5):
            s = small_scenario(seed + 400)
            phi0 = random_phase(3, seed + 410)
            w = eigen_precoder(s, phi0, 0.9)
            _, mm_trace = solve_mm(s, w, phi0, 0.9)
            phi, trace = solve_mbnb(s, w, phi0, 0.9, max_nodes=20_000)
            assert trace.objective[-1] >= mm_trace.objective[-1] - 1e-6

    def test_true_objective_reported(self):
        s = small_scenario(500)
        phi0 = random_phase(3, 501)
        w = eigen_precoder(s, phi0, 0.9)
        phi, trace = solve_mbnb(s, w, phi0, 0.9)
        assert trace.objective[-1] == pytest.approx(design_objective(s, w, phi, 0.9), rel=1e-10)
