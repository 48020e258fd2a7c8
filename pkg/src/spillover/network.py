"""Directed network of net pairwise spillovers and node centralities.

An edge ``j -> i`` with weight ``npdc[i, j]`` is drawn whenever series j is a
net transmitter to series i.  Path-based measures use edge length
``1 / weight`` so that strong links are short.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .connectedness import SpilloverSummary
from .errors import NoEdges, NonConvergence

__all__ = [
    "SpilloverNetwork",
    "CentralityRanking",
    "build_network",
    "degree_centrality",
    "closeness_centrality",
    "betweenness_centrality",
    "eigenvector_centrality",
    "all_centralities",
    "network_to_dict",
]

EDGE_TOL = 1e-12
MEASURES = ("degree", "closeness", "betweenness", "eigenvector")


@dataclass(frozen=True)
class SpilloverNetwork:
    names: tuple[str, ...]
    net: np.ndarray
    edges: tuple[tuple[int, int, float], ...]  # (source, target, weight)
    band: str | None = None

    @property
    def n_nodes(self) -> int:
        return len(self.names)

    def weight_matrix(self) -> np.ndarray:
        """``W[s, t]`` = weight of edge s -> t (0 where absent)."""
        w = np.zeros((self.n_nodes, self.n_nodes))
        for s, t, weight in self.edges:
            w[s, t] = weight
        return w

    def roles(self) -> list[str]:
        return ["transmitter" if v > 0 else "receiver" for v in self.net]


@dataclass(frozen=True)
class CentralityRanking:
    measure: str
    names: tuple[str, ...]
    scores: np.ndarray
    ranking: tuple[str, ...]

    def as_dict(self) -> dict:
        return {"scores": dict(zip(self.names, self.scores.tolist())), "ranking": list(self.ranking)}


def _rank(measure: str, names: Sequence[str], scores) -> CentralityRanking:
    scores = np.asarray(scores, dtype=float)
    order = sorted(range(len(names)), key=lambda i: (-scores[i], i))
    return CentralityRanking(measure, tuple(names), scores, tuple(names[i] for i in order))


def build_network(summary: SpilloverSummary, tol: float = EDGE_TOL) -> SpilloverNetwork:
    npdc = summary.npdc
    m = npdc.shape[0]
    edges = []
    for i in range(m):
        for j in range(m):
            if i != j and npdc[i, j] > tol:
                edges.append((j, i, float(npdc[i, j])))
    return SpilloverNetwork(summary.names, np.array(summary.net, dtype=float), tuple(edges), summary.band)


def degree_centrality(net: SpilloverNetwork) -> CentralityRanking:
    """Total (in + out) unweighted degree divided by ``M - 1``."""
    m = net.n_nodes
    deg = np.zeros(m)
    for s, t, _ in net.edges:
        deg[s] += 1
        deg[t] += 1
    if m > 1:
        deg /= m - 1
    return _rank("degree", net.names, deg)


def _dijkstra(adj: list[list[tuple[int, float]]], source: int):
    """Shortest distances, path counts and predecessor lists from ``source``.

    Distances within a relative 1e-12 are treated as ties so that equal-length
    paths built from floating weights are all counted.
    """
    m = len(adj)
    dist = [math.inf] * m
    sigma = [0.0] * m
    preds: list[list[int]] = [[] for _ in range(m)]
    dist[source] = 0.0
    sigma[source] = 1.0
    order = []
    done = [False] * m
    heap = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if done[v] or d > dist[v]:
            continue
        done[v] = True
        order.append(v)
        for w, length in adj[v]:
            nd = d + length
            tol = 1e-12 * max(nd, dist[w]) if math.isfinite(dist[w]) else 0.0
            if nd < dist[w] - tol:
                dist[w] = nd
                sigma[w] = sigma[v]
                preds[w] = [v]
                heapq.heappush(heap, (nd, w))
            elif abs(nd - dist[w]) <= tol and not done[w]:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return dist, sigma, preds, order


def _adjacency(net: SpilloverNetwork) -> list[list[tuple[int, float]]]:
    adj: list[list[tuple[int, float]]] = [[] for _ in range(net.n_nodes)]
    for s, t, w in net.edges:
        adj[s].append((t, 1.0 / w))
    return adj


def closeness_centrality(net: SpilloverNetwork) -> CentralityRanking:
    """Out-closeness: reachable count over summed distances (0 if none)."""
    adj = _adjacency(net)
    scores = np.zeros(net.n_nodes)
    for v in range(net.n_nodes):
        dist, *_ = _dijkstra(adj, v)
        reach = [d for u, d in enumerate(dist) if u != v and math.isfinite(d)]
        if reach:
            scores[v] = len(reach) / sum(reach)
    return _rank("closeness", net.names, scores)


def betweenness_centrality(net: SpilloverNetwork) -> CentralityRanking:
    """Directed weighted betweenness (Brandes accumulation).

    Each ordered pair (s, t) spreads one unit over its shortest paths; scores
    are divided by ``(M - 1)(M - 2)``, the number of pairs excluding the node.
    """
    m = net.n_nodes
    adj = _adjacency(net)
    scores = np.zeros(m)
    for s in range(m):
        _, sigma, preds, order = _dijkstra(adj, s)
        delta = [0.0] * m
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                scores[w] += delta[w]
    if m > 2:
        scores /= (m - 1) * (m - 2)
    return _rank("betweenness", net.names, scores)


def eigenvector_centrality(
    net: SpilloverNetwork, tol: float = 1e-10, max_iter: int = 1000
) -> CentralityRanking:
    """Principal eigenvector of ``(W + W') / 2`` by power iteration.

    The iteration runs on ``W_sym / max(W_sym) + I``: the shift leaves the
    eigenvectors alone but keeps bipartite graphs (stars, chains), whose
    spectrum is symmetric about zero, from oscillating.  Scores are scaled
    to a maximum of 1.
    """
    if not net.edges:
        raise NoEdges("eigenvector centrality needs at least one edge")
    w = net.weight_matrix()
    sym = 0.5 * (w + w.T)
    op = sym / sym.max() + np.eye(net.n_nodes)
    x = np.full(net.n_nodes, 1.0 / net.n_nodes)
    for _ in range(max_iter):
        nxt = op @ x
        nxt /= np.linalg.norm(nxt)
        if np.abs(nxt - x).max() < tol:
            x = nxt
            break
        x = nxt
    else:
        raise NonConvergence(f"power iteration did not converge in {max_iter} steps")
    x = np.abs(x)
    return _rank("eigenvector", net.names, x / x.max())


def all_centralities(net: SpilloverNetwork) -> dict[str, CentralityRanking | None]:
    """Every measure; eigenvector is ``None`` for an edgeless network."""
    out: dict[str, CentralityRanking | None] = {
        "degree": degree_centrality(net),
        "closeness": closeness_centrality(net),
        "betweenness": betweenness_centrality(net),
    }
    try:
        out["eigenvector"] = eigenvector_centrality(net)
    except NoEdges:
        out["eigenvector"] = None
    return out


def network_to_dict(net: SpilloverNetwork, centralities: dict | None = None) -> dict:
    centralities = all_centralities(net) if centralities is None else centralities
    return {
        "band": net.band or "total",
        "nodes": [
            {"id": name, "net": float(v), "role": role}
            for name, v, role in zip(net.names, net.net, net.roles())
        ],
        "edges": [
            {"source": net.names[s], "target": net.names[t], "weight": w} for s, t, w in net.edges
        ],
        "centrality": {
            k: (None if v is None else v.as_dict()) for k, v in centralities.items()
        },
    }
