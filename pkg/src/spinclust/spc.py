"""Potts-model cluster Monte Carlo over a strength graph.

One chain per temperature: bonds between aligned spins activate with
probability 1 - exp(-J/T), the active-bond components are relabeled with a
union-find pass, and every component draws a fresh spin. After burn-in the
chain accumulates magnetization, energy, and pair co-membership counts; the
latter become the pair correlation matrix

    G_ij = ((q - 1) * c_ij + 1) / q

from which the final clusters are read by thresholding at theta.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .similarity import NeighborGraph, StrengthGraph


@dataclass
class SpinState:
    """Spin values in [1, q] for every node."""

    spins: np.ndarray
    q: int

    def __post_init__(self):
        self.spins = np.asarray(self.spins, dtype=np.int64)
        if self.q < 2:
            raise DomainError("q must be >= 2")
        if self.spins.size and (self.spins.min() < 1 or self.spins.max() > self.q):
            raise DomainError("spins must lie in [1, q]")


@dataclass
class BondConfiguration:
    """Activation flags for every edge of a strength graph."""

    n: int
    edge_i: np.ndarray
    edge_j: np.ndarray
    active: np.ndarray


@dataclass
class TemperatureStats:
    """Thermodynamic summary of one chain at a fixed temperature."""

    temperature: float
    mean_magnetization: float
    susceptibility: float
    mean_energy: float
    energy_samples: np.ndarray
    two_point: np.ndarray
    n_samples: int
    g_matrix: np.ndarray
    labeling: np.ndarray
    q: int
    h_max: float

    @property
    def cluster_sizes(self) -> list[int]:
        return sorted(np.bincount(self.labeling).tolist(), reverse=True)

    def to_record(self, with_g: bool = False) -> dict:
        rec = {"T": self.temperature,
               "mean_m": self.mean_magnetization,
               "chi": self.susceptibility,
               "mean_H": self.mean_energy,
               "n_clusters": int(self.labeling.max()) + 1,
               "cluster_sizes": self.cluster_sizes,
               "labels": self.labeling.tolist(),
               "energy_samples": self.energy_samples.tolist(),
               "q": self.q,
               "h_max": self.h_max,
               "n_samples": self.n_samples}
        if with_g:
            rec["g_matrix"] = self.g_matrix.tolist()
        return rec


def stats_from_record(rec: dict) -> TemperatureStats:
    """Rebuild TemperatureStats from its JSON record (G defaults to empty)."""
    labels = np.asarray(rec["labels"], dtype=np.int64)
    n = labels.size
    g = np.asarray(rec["g_matrix"], dtype=float) if "g_matrix" in rec else np.zeros((0, 0))
    return TemperatureStats(
        temperature=float(rec["T"]),
        mean_magnetization=float(rec["mean_m"]),
        susceptibility=float(rec["chi"]),
        mean_energy=float(rec["mean_H"]),
        energy_samples=np.asarray(rec["energy_samples"], dtype=float),
        two_point=np.zeros((0, 0), dtype=np.int64),
        n_samples=int(rec["n_samples"]),
        g_matrix=g,
        labeling=labels,
        q=int(rec["q"]),
        h_max=float(rec["h_max"]),
    )


def bond_probability(j_ij: float, t: float, same_spin: bool) -> float:
    """Activation probability of one bond: 1 - exp(-J/T) if spins agree, else 0."""
    if t <= 0.0:
        raise DomainError("temperature must be positive")
    if j_ij < 0.0:
        raise DomainError("bond strength must be nonnegative")
    if not same_spin:
        return 0.0
    return 1.0 - math.exp(-j_ij / t)


def _label_components(n: int, ai, aj) -> np.ndarray:
    """Union-find labeling of the active-bond graph.

    Merges always keep the smaller root; labels are sequentialized in
    first-visit (ascending node index) order. ``ai``/``aj`` are plain lists
    so the hot loop stays free of numpy scalar overhead.
    """
    parent = list(range(n))
    for a, b in zip(ai, aj):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
    labels = np.empty(n, dtype=np.int64)
    remap: dict[int, int] = {}
    for v in range(n):
        r = v
        while parent[r] != r:
            r = parent[r]
        parent[v] = r
        lab = remap.get(r)
        if lab is None:
            lab = len(remap)
            remap[r] = lab
        labels[v] = lab
    return labels


def extended_hoshen_kopelman(bonds: BondConfiguration) -> np.ndarray:
    """Connected components of the active bonds, labels 0..k-1 in first-visit order."""
    act = np.asarray(bonds.active, dtype=bool)
    ai = np.asarray(bonds.edge_i)[act].tolist()
    aj = np.asarray(bonds.edge_j)[act].tolist()
    return _label_components(bonds.n, ai, aj)


def _sw_step(spins: np.ndarray, ei: np.ndarray, ej: np.ndarray,
             p_edge: np.ndarray, q: int, rng: np.random.Generator):
    """One bond-sample / relabel / flip move. Returns (new_spins, sw_labels)."""
    same = spins[ei] == spins[ej]
    active = same & (rng.random(ei.size) < p_edge)
    labels = _label_components(spins.size, ei[active].tolist(), ej[active].tolist())
    n_clusters = int(labels.max()) + 1
    cluster_spins = rng.integers(1, q + 1, size=n_clusters)
    return cluster_spins[labels], labels


def swendsen_wang_step(state: SpinState, strengths: StrengthGraph, t: float,
                       rng: np.random.Generator) -> tuple[SpinState, np.ndarray]:
    """Public single-step move on a SpinState; same path the chain uses."""
    if t <= 0.0:
        raise DomainError("temperature must be positive")
    g = strengths.graph
    p_edge = 1.0 - np.exp(-strengths.j / t)
    new_spins, labels = _sw_step(state.spins, g.edge_i, g.edge_j, p_edge, state.q, rng)
    return SpinState(new_spins, state.q), labels


def magnetization(labeling: np.ndarray, q: int) -> float:
    """Dominance of the largest part: (q*N_max - N) / ((q-1)*N)."""
    if q < 2:
        raise DomainError("q must be >= 2")
    labeling = np.asarray(labeling)
    n = labeling.size
    n_max = int(np.bincount(labeling).max())
    return (q * n_max - n) / ((q - 1) * n)


def hamiltonian(state: SpinState, strengths: StrengthGraph) -> float:
    """Mean-field energy: (1/N) * sum of J over unsatisfied bonds."""
    g = strengths.graph
    diff = state.spins[g.edge_i] != state.spins[g.edge_j]
    return float(strengths.j[diff].sum()) / g.n


def spin_spin_correlation(two_point: np.ndarray, samples: int, q: int) -> np.ndarray:
    """Pair correlation from co-membership counts: ((q-1)*c + 1) / q."""
    if samples < 1:
        raise DomainError("need at least one sample")
    c = np.asarray(two_point, dtype=float) / samples
    return ((q - 1.0) * c + 1.0) / q


def extract_clusters(g_matrix: np.ndarray, theta: float, graph: NeighborGraph) -> np.ndarray:
    """Threshold the pair correlations over graph edges and take components.

    A node whose incident edges all fall below theta is attached to its
    highest-correlation neighbor, so no node is left isolated.
    """
    if not 0.0 < theta < 1.0:
        raise DomainError("theta must lie in (0, 1)")
    ei, ej = graph.edge_i, graph.edge_j
    keep = g_matrix[ei, ej] > theta
    has_edge = np.zeros(graph.n, dtype=bool)
    has_edge[ei[keep]] = True
    has_edge[ej[keep]] = True
    ai = ei[keep].tolist()
    aj = ej[keep].tolist()
    for v in np.nonzero(~has_edge)[0]:
        nbrs = graph.neighbors(v)          # sorted, so argmax ties go low
        best = int(nbrs[int(np.argmax(g_matrix[v, nbrs]))])
        ai.append(min(v, best))
        aj.append(max(v, best))
    return _label_components(graph.n, ai, aj)


def run_temperature(strengths: StrengthGraph, t: float, m_steps: int = 2000,
                    burn_in: int = 400, q: int = 20, seed=0,
                    theta: float = 0.5) -> TemperatureStats:
    """Run one chain at temperature t and summarize it.

    The chain starts from a uniform-random spin state; after ``burn_in``
    steps it accumulates magnetization (largest spin-value population),
    mean-field energy of the updated state, and pair co-membership counts
    of the bond clusters.
    """
    if t <= 0.0:
        raise DomainError("temperature must be positive")
    if not m_steps > burn_in >= 0:
        raise DomainError("need m_steps > burn_in >= 0")
    rng = np.random.default_rng(seed)
    g = strengths.graph
    n = g.n
    ei, ej, jv = g.edge_i, g.edge_j, strengths.j
    p_edge = 1.0 - np.exp(-jv / t)

    spins = rng.integers(1, q + 1, size=n)
    two_point = np.zeros((n, n), dtype=np.int64)
    m_sum = 0.0
    m2_sum = 0.0
    energies = np.empty(m_steps - burn_in)
    qn = (q - 1.0) * n

    for step in range(m_steps):
        spins, labels = _sw_step(spins, ei, ej, p_edge, q, rng)
        if step < burn_in:
            continue
        n_max = int(np.bincount(spins, minlength=q + 1).max())
        m = (q * n_max - n) / qn
        m_sum += m
        m2_sum += m * m
        energies[step - burn_in] = jv[spins[ei] != spins[ej]].sum() / n
        two_point += labels[:, None] == labels[None, :]

    samples = m_steps - burn_in
    mean_m = m_sum / samples
    var_m = max(m2_sum / samples - mean_m * mean_m, 0.0)
    chi = n / t * var_m
    g_matrix = spin_spin_correlation(two_point, samples, q)
    labeling = extract_clusters(g_matrix, theta, g)
    return TemperatureStats(
        temperature=float(t),
        mean_magnetization=float(mean_m),
        susceptibility=float(chi),
        mean_energy=float(energies.mean()),
        energy_samples=energies,
        two_point=two_point,
        n_samples=samples,
        g_matrix=g_matrix,
        labeling=labeling,
        q=q,
        h_max=strengths.h_max,
    )


def _sweep_worker(args) -> TemperatureStats:
    strengths, t, m_steps, burn_in, q, seed_key, theta = args
    return run_temperature(strengths, t, m_steps=m_steps, burn_in=burn_in,
                           q=q, seed=np.random.SeedSequence(seed_key), theta=theta)


def temperature_sweep(strengths: StrengthGraph, grid, m_steps: int = 2000,
                      burn_in: int = 400, q: int = 20, theta: float = 0.5,
                      seed: int = 0, workers: int = 1) -> list[TemperatureStats]:
    """Independent chains over an increasing temperature grid.

    Each temperature derives its own stream from (seed, grid index), so
    results are reproducible and identical whether run serially or across
    ``workers`` processes.
    """
    grid = [float(t) for t in grid]
    if not grid:
        raise DomainError("temperature grid is empty")
    if any(t <= 0.0 for t in grid):
        raise DomainError("temperatures must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("temperature grid must be strictly increasing")
    tasks = [(strengths, t, m_steps, burn_in, q, (seed, idx), theta)
             for idx, t in enumerate(grid)]
    if workers <= 1:
        return [_sweep_worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_worker, tasks))


def sweep_to_json(sweep: list[TemperatureStats], params: dict | None = None,
                  with_g: bool = False) -> dict:
    return {"kind": "spc_sweep", "params": params or {},
            "records": [s.to_record(with_g=with_g) for s in sweep]}


def sweep_from_json(doc: dict) -> list[TemperatureStats]:
    if doc.get("kind") != "spc_sweep":
        raise DomainError("not a sweep document")
    return [stats_from_record(rec) for rec in doc["records"]]
