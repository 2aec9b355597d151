import math
from collections import deque

import numpy as np
import pytest

from spinclust.errors import DomainError
from spinclust.similarity import mutual_knn_graph, strength_matrix
from spinclust.spc import (
    BondConfiguration,
    SpinState,
    bond_probability,
    extended_hoshen_kopelman,
    extract_clusters,
    hamiltonian,
    magnetization,
    run_temperature,
    spin_spin_correlation,
    swendsen_wang_step,
    sweep_from_json,
    sweep_to_json,
    temperature_sweep,
)


def bfs_components(n, edges):
    """Breadth-first component labeling, first-visit order; the oracle."""
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    labels = [-1] * n
    nxt = 0
    for start in range(n):
        if labels[start] != -1:
            continue
        labels[start] = nxt
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if labels[w] == -1:
                    labels[w] = nxt
                    queue.append(w)
        nxt += 1
    return np.array(labels)


def random_graph(rng, n_max=200):
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(0, 3 * n))
    ei = rng.integers(0, n, size=m)
    ej = rng.integers(0, n, size=m)
    keep = ei != ej
    return n, ei[keep], ej[keep]


def small_strength_graph(n=30, seed=0, k=3):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 2))
    d = np.linalg.norm(x[:, None] - x[None, :], axis=2)
    g = mutual_knn_graph(d, k=k)
    return strength_matrix(g, d)


class TestBondProbability:
    def test_different_spins_zero(self):
        assert bond_probability(5.0, 0.3, same_spin=False) == 0.0

    def test_half_at_log_two(self):
        assert bond_probability(math.log(2.0), 1.0, True) == pytest.approx(0.5, abs=1e-15)

    def test_saturates_at_one(self):
        assert bond_probability(1.0, 1e-12, True) == pytest.approx(1.0)

    def test_bad_temperature(self):
        with pytest.raises(DomainError):
            bond_probability(1.0, 0.0, True)
        with pytest.raises(DomainError):
            bond_probability(1.0, -1.0, True)


class TestExtendedHoshenKopelman:
    def test_no_bonds_gives_singletons(self):
        bonds = BondConfiguration(4, np.array([0, 1]), np.array([1, 2]),
                                  np.array([False, False]))
        labels = extended_hoshen_kopelman(bonds)
        np.testing.assert_array_equal(labels, [0, 1, 2, 3])

    def test_chain_single_cluster(self):
        bonds = BondConfiguration(4, np.array([0, 1, 2]), np.array([1, 2, 3]),
                                  np.array([True, True, True]))
        labels = extended_hoshen_kopelman(bonds)
        np.testing.assert_array_equal(labels, [0, 0, 0, 0])

    def test_first_visit_sequential_labels(self):
        # component containing node 0 gets label 0 even if built from high indices
        bonds = BondConfiguration(5, np.array([3, 0]), np.array([4, 2]),
                                  np.array([True, True]))
        labels = extended_hoshen_kopelman(bonds)
        np.testing.assert_array_equal(labels, [0, 1, 0, 2, 2])

    def test_matches_bfs_on_random_graphs(self):
        rng = np.random.default_rng(30)
        for _ in range(1000):
            n, ei, ej = random_graph(rng)
            bonds = BondConfiguration(n, ei, ej, np.ones(ei.size, dtype=bool))
            got = extended_hoshen_kopelman(bonds)
            want = bfs_components(n, zip(ei.tolist(), ej.tolist()))
            np.testing.assert_array_equal(got, want)


class TestSwendsenWangStep:
    def test_hot_limit_all_singletons(self):
        s = small_strength_graph()
        state = SpinState(np.ones(30, dtype=int), q=20)
        _, labels = swendsen_wang_step(state, s, t=1e9, rng=np.random.default_rng(0))
        assert labels.max() == 29

    def test_cold_limit_single_cluster(self):
        s = small_strength_graph()
        state = SpinState(np.full(30, 7), q=20)
        _, labels = swendsen_wang_step(state, s, t=1e-9, rng=np.random.default_rng(0))
        assert labels.max() == 0

    def test_deterministic_under_seed(self):
        s = small_strength_graph()
        state = SpinState(np.ones(30, dtype=int), q=20)
        out1, lab1 = swendsen_wang_step(state, s, 0.05, np.random.default_rng(42))
        out2, lab2 = swendsen_wang_step(state, s, 0.05, np.random.default_rng(42))
        np.testing.assert_array_equal(out1.spins, out2.spins)
        np.testing.assert_array_equal(lab1, lab2)

    def test_new_spins_in_range(self):
        s = small_strength_graph()
        state = SpinState(np.ones(30, dtype=int), q=5)
        out, _ = swendsen_wang_step(state, s, 0.1, np.random.default_rng(1))
        assert out.spins.min() >= 1 and out.spins.max() <= 5


class TestMagnetization:
    def test_single_cluster(self):
        assert magnetization(np.zeros(50, dtype=int), q=20) == 1.0

    def test_balanced_at_n_over_q(self):
        labels = np.repeat(np.arange(20), 5)  # N=100, largest part 5
        assert magnetization(labels, q=20) == 0.0

    def test_half_dominant(self):
        labels = np.array([0] * 50 + list(range(1, 51)))  # N=100, N_max=50
        assert magnetization(labels, q=20) == pytest.approx(900 / 1900, abs=1e-15)


class TestHamiltonian:
    def test_aligned_is_zero(self):
        s = small_strength_graph()
        assert hamiltonian(SpinState(np.full(30, 3), q=20), s) == 0.0

    def test_triangle_hand_value(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.9]])
        d = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
        g = mutual_knn_graph(d, k=2)
        s = strength_matrix(g, d)
        s.j[:] = 0.3  # uniform bonds on the triangle
        st = SpinState(np.array([1, 1, 2]), q=20)
        # edges (0,2) and (1,2) unsatisfied -> (0.3 + 0.3) / 3
        assert hamiltonian(st, s) == pytest.approx(0.2, abs=1e-15)

    def test_bounded_by_h_max(self):
        s = small_strength_graph(seed=3)
        rng = np.random.default_rng(4)
        for _ in range(20):
            st = SpinState(rng.integers(1, 21, size=30), q=20)
            h = hamiltonian(st, s)
            assert 0.0 <= h <= s.h_max + 1e-12


class TestSpinSpinCorrelation:
    def test_always_together(self):
        g = spin_spin_correlation(np.array([[10, 10], [10, 10]]), 10, q=20)
        assert g[0, 1] == 1.0

    def test_never_together(self):
        g = spin_spin_correlation(np.array([[10, 0], [0, 10]]), 10, q=20)
        assert g[0, 1] == pytest.approx(0.05, abs=1e-15)

    def test_half(self):
        g = spin_spin_correlation(np.array([[10, 5], [5, 10]]), 10, q=20)
        assert g[0, 1] == pytest.approx(0.525, abs=1e-15)

    def test_range_and_symmetry(self):
        rng = np.random.default_rng(5)
        c = rng.integers(0, 11, size=(6, 6))
        c = np.triu(c) + np.triu(c, 1).T
        np.fill_diagonal(c, 10)
        g = spin_spin_correlation(c, 10, q=20)
        assert g.min() >= 1 / 20 - 1e-15 and g.max() <= 1.0 + 1e-15
        np.testing.assert_allclose(g, g.T)
        np.testing.assert_allclose(np.diag(g), 1.0)


def brute_extract(g_matrix, theta, graph):
    """Oracle: explicit edge construction + BFS components."""
    n = graph.n
    edges = []
    has = [False] * n
    for i, j in zip(graph.edge_i.tolist(), graph.edge_j.tolist()):
        if g_matrix[i, j] > theta:
            edges.append((i, j))
            has[i] = has[j] = True
    for v in range(n):
        if not has[v]:
            nbrs = sorted(set(graph.edge_j[graph.edge_i == v].tolist())
                          | set(graph.edge_i[graph.edge_j == v].tolist()))
            best = max(nbrs, key=lambda u: (g_matrix[v, u], -u))
            edges.append((v, best))
    return bfs_components(n, edges)


class TestExtractClusters:
    def make_graph(self, n=6):
        pts = np.arange(n, dtype=float).reshape(-1, 1)
        d = np.abs(pts - pts.T)
        return mutual_knn_graph(d, k=2)

    def test_block_structure_recovered(self):
        graph = self.make_graph()
        g = np.full((6, 6), 0.05)
        g[:3, :3] = 0.9
        g[3:, 3:] = 0.9
        np.fill_diagonal(g, 1.0)
        labels = extract_clusters(g, 0.5, graph)
        np.testing.assert_array_equal(labels, [0, 0, 0, 1, 1, 1])

    def test_flat_g_matches_bruteforce(self):
        graph = self.make_graph()
        g = np.full((6, 6), 0.05)
        np.fill_diagonal(g, 1.0)
        got = extract_clusters(g, 0.5, graph)
        want = brute_extract(g, 0.5, graph)
        np.testing.assert_array_equal(got, want)

    def test_high_theta_uses_fallback(self):
        graph = self.make_graph()
        rng = np.random.default_rng(6)
        g = rng.uniform(0.0, 0.95, size=(6, 6))
        g = 0.5 * (g + g.T)
        np.fill_diagonal(g, 1.0)
        got = extract_clusters(g, 0.99, graph)
        want = brute_extract(g, 0.99, graph)
        np.testing.assert_array_equal(got, want)

    def test_theta_bounds(self):
        graph = self.make_graph()
        with pytest.raises(DomainError):
            extract_clusters(np.eye(6), 0.0, graph)
        with pytest.raises(DomainError):
            extract_clusters(np.eye(6), 1.0, graph)


class TestRunTemperature:
    def test_ferromagnetic_limit(self):
        s = small_strength_graph(n=50, seed=7, k=4)
        st = run_temperature(s, 1e-6, m_steps=200, burn_in=40, q=20, seed=8)
        assert st.mean_magnetization > 0.95

    def test_paramagnetic_limit(self):
        s = small_strength_graph(n=50, seed=7, k=4)
        st = run_temperature(s, 1e3, m_steps=200, burn_in=40, q=20, seed=8)
        assert abs(st.mean_magnetization) < 0.1

    def test_energy_samples_within_bounds(self):
        s = small_strength_graph(n=40, seed=9, k=3)
        st = run_temperature(s, 0.08, m_steps=300, burn_in=50, q=20, seed=10)
        assert st.energy_samples.min() >= 0.0
        assert st.energy_samples.max() <= s.h_max + 1e-12
        assert st.n_samples == 250

    def test_g_matrix_invariants(self):
        s = small_strength_graph(n=25, seed=11, k=3)
        st = run_temperature(s, 0.05, m_steps=200, burn_in=50, q=20, seed=12)
        g = st.g_matrix
        assert g.min() >= 1 / 20 - 1e-15 and g.max() <= 1.0 + 1e-15
        np.testing.assert_allclose(g, g.T)
        np.testing.assert_allclose(np.diag(g), 1.0)

    def test_deterministic_bit_for_bit(self):
        s = small_strength_graph(n=30, seed=13, k=3)
        a = run_temperature(s, 0.07, m_steps=150, burn_in=30, q=20, seed=99)
        b = run_temperature(s, 0.07, m_steps=150, burn_in=30, q=20, seed=99)
        assert a.mean_magnetization == b.mean_magnetization
        assert a.susceptibility == b.susceptibility
        np.testing.assert_array_equal(a.energy_samples, b.energy_samples)
        np.testing.assert_array_equal(a.two_point, b.two_point)
        np.testing.assert_array_equal(a.labeling, b.labeling)

    def test_bad_arguments(self):
        s = small_strength_graph()
        with pytest.raises(DomainError):
            run_temperature(s, -0.1)
        with pytest.raises(DomainError):
            run_temperature(s, 0.1, m_steps=10, burn_in=10)


class TestTemperatureSweep:
    def test_monotone_limit_property(self):
        for seed in (14, 15, 16):
            s = small_strength_graph(n=50, seed=seed, k=4)
            sweep = temperature_sweep(s, [1e-6, 1e3], m_steps=150, burn_in=30,
                                      q=20, seed=seed)
            assert sweep[0].mean_magnetization > sweep[1].mean_magnetization

    def test_grid_validation(self):
        s = small_strength_graph()
        with pytest.raises(DomainError):
            temperature_sweep(s, [])
        with pytest.raises(DomainError):
            temperature_sweep(s, [0.2, 0.1])
        with pytest.raises(DomainError):
            temperature_sweep(s, [-0.1, 0.2])

    def test_susceptibility_low_at_both_grid_ends(self):
        # uniform ring: clean ordered phase at the cold end, disorder at the hot end
        n = 40
        theta = 2 * np.pi * np.arange(n) / n
        x = np.c_[np.cos(theta), np.sin(theta)]
        d = np.linalg.norm(x[:, None] - x[None, :], axis=2)
        s = strength_matrix(mutual_knn_graph(d, k=4), d)
        sweep = temperature_sweep(s, [0.005, 0.02, 0.1, 0.3, 10.0],
                                  m_steps=400, burn_in=200, q=20, seed=18)
        chis = [st.susceptibility for st in sweep]
        peak = max(chis)
        assert peak > 0.5                      # a transition happens mid-grid
        assert chis[0] < 0.05 * peak
        assert chis[-1] < 0.05 * peak

    def test_sweep_matches_individual_runs(self):
        s = small_strength_graph(n=25, seed=19, k=3)
        grid = [0.02, 0.08]
        sweep = temperature_sweep(s, grid, m_steps=100, burn_in=20, q=20, seed=20)
        solo = run_temperature(s, 0.08, m_steps=100, burn_in=20, q=20,
                               seed=np.random.SeedSequence((20, 1)))
        assert sweep[1].mean_magnetization == solo.mean_magnetization
        np.testing.assert_array_equal(sweep[1].labeling, solo.labeling)

    def test_parallel_workers_match_serial(self):
        s = small_strength_graph(n=25, seed=23, k=3)
        grid = [0.03, 0.06, 0.09]
        serial = temperature_sweep(s, grid, m_steps=80, burn_in=20, q=20, seed=24)
        parallel = temperature_sweep(s, grid, m_steps=80, burn_in=20, q=20,
                                     seed=24, workers=2)
        for a, b in zip(serial, parallel):
            assert a.mean_magnetization == b.mean_magnetization
            assert a.susceptibility == b.susceptibility
            np.testing.assert_array_equal(a.labeling, b.labeling)
            np.testing.assert_array_equal(a.energy_samples, b.energy_samples)

    def test_json_round_trip(self):
        s = small_strength_graph(n=20, seed=21, k=3)
        sweep = temperature_sweep(s, [0.05, 0.1], m_steps=80, burn_in=20,
                                  q=20, seed=22)
        doc = sweep_to_json(sweep, params={"q": 20})
        back = sweep_from_json(doc)
        assert len(back) == 2
        assert back[0].temperature == sweep[0].temperature
        assert back[1].mean_magnetization == sweep[1].mean_magnetization
        np.testing.assert_array_equal(back[0].labeling, sweep[0].labeling)
        np.testing.assert_array_equal(back[1].energy_samples, sweep[1].energy_samples)
