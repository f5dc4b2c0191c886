import numpy as np
import pytest

from gadmm.topology import (
    EnergyModel,
    Placement,
    center_worker,
    cost_matrix,
    link_energy_cost,
    random_placement,
)

RADIO_MODEL = EnergyModel(bandwidth_hz=2e6, noise_density=1e-6, rate_bps=1e7)


class TestRandomPlacement:
    def test_reproducible(self):
        a = random_placement(2, 10.0, 123)
        b = random_placement(2, 10.0, 123)
        np.testing.assert_array_equal(a.positions, b.positions)

    def test_within_bounds(self):
        p = random_placement(50, 7.5, 0)
        assert np.all(p.positions >= 0.0)
        assert np.all(p.positions <= 7.5)

    def test_uniform_mean(self):
        # 10^4 draws: sample mean within 2% of area_side / 2
        p = random_placement(10_000, 10.0, 99)
        assert abs(p.positions.mean() - 5.0) <= 0.1

    def test_rejects_tiny_networks(self):
        with pytest.raises(ValueError):
            random_placement(1, 10.0, 0)


class TestLinkEnergyCost:
    def test_ten_meters(self):
        # d^2 * N0 * B * 2^(R/B) = 100 * 1e-6 * 2e6 * 2^5
        assert link_energy_cost(10.0, 2e6, 1e-6, 1e7) == pytest.approx(6400.0)

    def test_one_meter(self):
        assert link_energy_cost(1.0, 2e6, 1e-6, 1e7) == pytest.approx(64.0)

    def test_quadratic_distance_scaling(self):
        c1 = link_energy_cost(3.7, 2e6, 1e-6, 1e7)
        c2 = link_energy_cost(7.4, 2e6, 1e-6, 1e7)
        assert c2 == pytest.approx(4.0 * c1, rel=1e-12)


class TestCostMatrix:
    def test_unit_model(self):
        p = random_placement(3, 10.0, 1)
        c = cost_matrix(p, "unit")
        assert c.shape == (3, 3)
        assert np.all(np.diag(c) == 0.0)
        off = c[~np.eye(3, dtype=bool)]
        assert np.all(off == 1.0)

    def test_energy_two_workers_ten_meters(self):
        p = Placement(np.array([[0.0, 0.0], [10.0, 0.0]]), 20.0)
        c = cost_matrix(p, RADIO_MODEL)
        assert c[0, 1] == pytest.approx(6400.0)
        assert c[1, 0] == pytest.approx(6400.0)

    def test_symmetry_and_positivity(self):
        p = random_placement(12, 10.0, 7)
        c = cost_matrix(p, RADIO_MODEL)
        np.testing.assert_allclose(c, c.T)
        off = c[~np.eye(12, dtype=bool)]
        assert np.all(off > 0.0)


class TestCenterWorker:
    def test_exact_center(self):
        p = Placement(np.array([[5.0, 5.0], [0.0, 0.0], [9.0, 9.0]]), 10.0)
        assert center_worker(p) == 1

    def test_tie_prefers_smaller_id(self):
        p = Placement(np.array([[4.0, 5.0], [6.0, 5.0]]), 10.0)
        assert center_worker(p) == 1

    def test_matches_brute_force_scan(self):
        for seed in range(5):
            p = random_placement(50, 10.0, seed)
            center = np.array([5.0, 5.0])
            best, best_d = None, np.inf
            for i, pos in enumerate(p.positions):
                d = float(np.hypot(*(pos - center)))
                if d < best_d:
                    best, best_d = i + 1, d
            assert center_worker(p) == best
