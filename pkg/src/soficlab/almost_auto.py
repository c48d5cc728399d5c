"""Almost automorphisms: detection, boundary correspondence, improvement.

A vertex self-map ``c`` is charged one bad edge for every undirected labeled
edge ``(x, s.x)`` whose image is not an ``s``-labeled edge, i.e. whenever
``c(s.x) != s.c(x)``.  The graph of ``c`` is a subset of the product graph;
for simple graphs its edge boundary is exactly twice the number of bad edges,
and shrinking that boundary is what the improvement pipeline does: smooth the
indicator of the graph with the averaging operator, take the best sweep cut
near the original set, then repair the result to the graph of a bijection.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core_graph import (
    LabeledGraph,
    RootedBall,
    VertexSet,
    boundary,
    edge_slots,
    good_vertices,
    product_graph,
    rooted_ball,
)
from .errors import LengthMismatch, NotBijective
from .expansion import descending_order, lambda2

REPAIR_RESCORING_LIMIT = 512


class VertexMap:
    """Self-map of the vertex set; bijectivity is validated at construction."""

    __slots__ = ("images", "bijective")

    def __init__(self, images):
        images = np.array(images, dtype=np.int64)
        n = images.size
        if n and (images.min() < 0 or images.max() >= n):
            raise ValueError("images out of range")
        images.setflags(write=False)
        self.images = images
        self.bijective = bool(np.unique(images).size == n)

    @classmethod
    def identity(cls, n: int) -> "VertexMap":
        return cls(np.arange(n))

    @property
    def n(self) -> int:
        return self.images.size

    def key(self) -> tuple:
        return tuple(self.images.tolist())

    def __eq__(self, other) -> bool:
        return isinstance(other, VertexMap) and np.array_equal(self.images, other.images)

    def __repr__(self):
        return f"VertexMap({self.images.tolist()})"


def compose(c1: VertexMap, c2: VertexMap) -> VertexMap:
    """(c1 . c2)(x) = c1(c2(x))."""
    if c1.n != c2.n:
        raise LengthMismatch(f"maps on {c1.n} and {c2.n} vertices")
    return VertexMap(c1.images[c2.images])


def invert(c: VertexMap) -> VertexMap:
    if not c.bijective:
        raise NotBijective("only bijections can be inverted")
    return VertexMap(np.argsort(c.images))


@dataclass
class DefectReport:
    """Bad-edge count of a map, with the product-graph boundary of its graph."""

    bad_edges: int
    epsilon: float
    boundary_of_graph: int | None = None


def _bad_edge_count(g: LabeledGraph, images: np.ndarray) -> int:
    ident = np.arange(g.n)
    total = 0
    for i in g.gens.pair_representatives():
        p = g.actions[i]
        bad = images[p] != p[images]
        if g.gens.inverse[i] == i:
            nonfixed = p != ident
            # non-loop edges are seen from both endpoints; loops once
            total += int(np.count_nonzero(bad & nonfixed)) // 2
            total += int(np.count_nonzero(bad & ~nonfixed))
        else:
            total += int(np.count_nonzero(bad))
    return total


def graph_of_map(g: LabeledGraph, c: VertexMap) -> VertexSet:
    """The set ``{(x, c(x))}`` inside the product graph ``g x g``."""
    if c.n != g.n:
        raise LengthMismatch(f"map on {c.n} vertices, graph has {g.n}")
    mask = np.zeros(g.n * g.n, dtype=bool)
    mask[np.arange(g.n) * g.n + c.images] = True
    return VertexSet(mask)


def defect_of_map(g: LabeledGraph, c: VertexMap, compute_boundary: bool = True) -> DefectReport:
    """Count bad edges of ``c``; optionally also measure the boundary of its
    graph inside the product graph (the independent route of the boundary
    correspondence)."""
    if c.n != g.n:
        raise LengthMismatch(f"map on {c.n} vertices, graph has {g.n}")
    bad = _bad_edge_count(g, c.images)
    bnd = None
    if compute_boundary:
        prod = product_graph(g, g)
        bnd = boundary(prod, graph_of_map(g, c))[0]
    return DefectReport(bad_edges=bad, epsilon=bad / g.n if g.n else 0.0, boundary_of_graph=bnd)


@dataclass
class ImprovementConfig:
    """Knobs of the improvement pipeline.

    ``kappa`` is the user-supplied Kazhdan constant: it is never computed from
    the graph and only scales the reported symmetric-difference budget.
    ``alpha`` is the expansion ratio the chosen sweep set should satisfy
    (default: a quarter of the spectral Cheeger lower bound).  The reference
    ball (radius ``radius``) defaults to the ball of the input graph at
    vertex 0.
    """

    kappa: float = 0.2
    alpha: float | None = None
    radius: int = 1
    smoothing_steps: int = 10
    target_delta: float = 0.0
    reference_ball: RootedBall | None = None

    def __post_init__(self):
        if not 0.0 < self.kappa <= 1.0:
            raise ValueError("kappa must lie in (0, 1]")
        if self.alpha is not None and self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        if self.smoothing_steps < 1:
            raise ValueError("smoothing_steps must be >= 1")
        if self.target_delta < 0.0:
            raise ValueError("target_delta must be >= 0")


@dataclass
class ImprovementTrace:
    t_size: int
    u_size: int
    symmetric_difference: int
    hamming_moved: int
    fibers_repaired: int
    final: DefectReport
    initial: DefectReport
    alpha: float
    alpha_feasible: bool
    target_met: bool
    reverted: bool
    good_set_degraded: bool
    smoothing_gap: float  # ||chi_T - M chi_T||^2
    symmetric_difference_budget: float  # (10 / kappa^2) * smoothing_gap
    candidate_bad_edges: int
    rows_trimmed: int
    cols_trimmed: int
    pairs_added: int
    empirical_moved_ratio: float | None  # hamming_moved / (initial bad edges)

    def as_dict(self) -> dict:
        doc = dict(self.__dict__)
        doc["final"] = dict(self.final.__dict__)
        doc["initial"] = dict(self.initial.__dict__)
        return doc


class ImprovementWorkspace:
    """Precomputed product graph, good set and effective alpha for one
    (graph, config) pair; reusable across many improve() calls."""

    __slots__ = ("graph", "cfg", "reference", "good", "l_mask", "product", "edges_u", "edges_v", "alpha")

    def __init__(self, g: LabeledGraph, cfg: ImprovementConfig):
        self.graph = g
        self.cfg = cfg
        self.reference = cfg.reference_ball if cfg.reference_ball is not None else rooted_ball(g, 0, cfg.radius)
        self.good = good_vertices(g, self.reference)
        self.l_mask = np.outer(self.good.mask, self.good.mask).ravel()
        self.product = product_graph(g, g)
        u, v, _ = edge_slots(self.product)
        self.edges_u = u
        self.edges_v = v
        if cfg.alpha is not None:
            self.alpha = cfg.alpha
        else:
            sd = lambda2(g, tol=1e-10, max_iter=10000, seed=0)
            lower = len(g.gens) * (1.0 - sd.lambda2) / 2.0 if sd.converged else 0.0
            self.alpha = max(lower / 4.0, 1e-9)


def _prefix_counts(ws: ImprovementWorkspace, order: np.ndarray) -> np.ndarray:
    n = order.size
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    r1 = np.minimum(rank[ws.edges_u], rank[ws.edges_v])
    r2 = np.maximum(rank[ws.edges_u], rank[ws.edges_v])
    diff = np.zeros(n + 1, dtype=np.int64)
    np.add.at(diff, r1 + 1, 1)
    np.add.at(diff, r2 + 1, -1)
    return np.cumsum(diff)[1:n]


def _keep_best_per_fiber(pair_idx: np.ndarray, fiber: np.ndarray, value: np.ndarray) -> np.ndarray:
    """Indices of the best pair (largest value, ties by pair index) per fiber."""
    order = np.lexsort((pair_idx, -value, fiber))
    first = np.ones(order.size, dtype=bool)
    f = fiber[order]
    first[1:] = f[1:] != f[:-1]
    return order[first]


def _greedy_fill(g: LabeledGraph, w_col: np.ndarray, missing_rows: np.ndarray, missing_cols: np.ndarray) -> int:
    """Complete a partial permutation, preferring pairs whose product-graph
    neighbors already sit in the kept set (smallest added boundary).
    Deterministic: highest score first, ties by smallest (row, col)."""
    k = len(g.gens)
    rows = list(missing_rows)
    cols = list(missing_cols)
    added = 0
    full_rescoring = len(rows) <= REPAIR_RESCORING_LIMIT
    while rows:
        ra = np.asarray(rows, dtype=np.int64)
        ca = np.asarray(cols, dtype=np.int64)
        if full_rescoring:
            score = np.zeros((ra.size, ca.size), dtype=np.int64)
            for i in range(k):
                p = g.actions[i]
                score += w_col[p[ra]][:, None] == p[ca][None, :]
            xi, yi = np.unravel_index(int(np.argmax(score)), score.shape)
        else:
            xi = 0
            score_row = np.zeros(ca.size, dtype=np.int64)
            for i in range(k):
                p = g.actions[i]
                score_row += w_col[p[ra[0]]] == p[ca]
            yi = int(np.argmax(score_row))
        x, y = rows.pop(int(xi)), cols.pop(int(yi))
        w_col[x] = y
        added += 1
    return added


def improve(
    g: LabeledGraph,
    c: VertexMap,
    cfg: ImprovementConfig,
    workspace: ImprovementWorkspace | None = None,
) -> tuple[VertexMap, ImprovementTrace]:
    """Improve an almost automorphism by spectral sweep rounding plus repair.

    Never returns a map with more bad edges than the input: a worse candidate
    is discarded and ``c`` comes back unchanged with ``trace.reverted`` set.
    A final defect above ``target_delta * n`` is reported via
    ``trace.target_met`` rather than raised.
    """
    if c.n != g.n:
        raise LengthMismatch(f"map on {c.n} vertices, graph has {g.n}")
    if not c.bijective:
        raise NotBijective("improve expects a bijective input map")
    ws = workspace if workspace is not None else ImprovementWorkspace(g, cfg)
    n = g.n
    big_n = n * n
    initial = defect_of_map(g, c)

    b_mask = graph_of_map(g, c).mask
    t_mask = b_mask & ws.l_mask
    good_set_degraded = False
    if not t_mask.any():
        good_set_degraded = True
        if ws.good.cardinality == 0:
            warnings.warn("good vertex set is empty; improving over the full graph of the map")
        else:
            warnings.warn("graph of the map misses the good set; improving over the full graph")
        t_mask = b_mask.copy()
    t_size = int(t_mask.sum())

    chi = t_mask.astype(np.float64)
    smoothed = chi
    first_step = smoothed[ws.product.actions].mean(axis=0)
    smoothing_gap = float(((chi - first_step) ** 2).sum())
    smoothed = first_step
    for _ in range(cfg.smoothing_steps - 1):
        smoothed = smoothed[ws.product.actions].mean(axis=0)

    order = descending_order(smoothed)
    counts = _prefix_counts(ws, order)  # prefix sizes 1..big_n-1
    sizes = np.arange(1, big_n, dtype=np.int64)
    cum_t = np.cumsum(t_mask[order])[: big_n - 1]
    delta_t = t_size + sizes - 2 * cum_t
    feasible = counts <= ws.alpha * sizes
    if feasible.any():
        alpha_feasible = True
        dmin = int(delta_t[feasible].min())
        cand = np.flatnonzero(feasible & (delta_t == dmin))
        ratios = counts[cand] / sizes[cand]
        pick = int(cand[int(np.argmin(ratios))])  # ties: smallest prefix
    else:
        alpha_feasible = False
        ratios = counts / sizes
        pick = int(np.lexsort((sizes, delta_t, ratios))[0])
    u_size = int(sizes[pick])
    sym_diff = int(delta_t[pick])

    chosen = order[:u_size]
    pair_rows = chosen // n
    pair_cols = chosen % n
    values = smoothed[chosen]

    keep = _keep_best_per_fiber(chosen, pair_rows, values)
    rows_trimmed = chosen.size - keep.size
    chosen2, rows2, cols2, values2 = chosen[keep], pair_rows[keep], pair_cols[keep], values[keep]
    keep2 = _keep_best_per_fiber(chosen2, cols2, values2)
    cols_trimmed = chosen2.size - keep2.size

    w_col = np.full(n, -1, dtype=np.int64)
    w_col[rows2[keep2]] = cols2[keep2]
    used_cols = np.zeros(n, dtype=bool)
    used_cols[cols2[keep2]] = True
    missing_rows = np.flatnonzero(w_col < 0)
    missing_cols = np.flatnonzero(~used_cols)
    pairs_added = _greedy_fill(g, w_col, missing_rows, missing_cols)

    candidate = VertexMap(w_col)
    cand_report = defect_of_map(g, candidate)
    if cand_report.bad_edges > initial.bad_edges:
        reverted = True
        result, final = c, initial
    else:
        reverted = False
        result, final = candidate, cand_report
    hamming_moved = int(np.count_nonzero(result.images != c.images))
    trace = ImprovementTrace(
        t_size=t_size,
        u_size=u_size,
        symmetric_difference=sym_diff,
        hamming_moved=hamming_moved,
        fibers_repaired=rows_trimmed + cols_trimmed + pairs_added,
        final=final,
        initial=initial,
        alpha=ws.alpha,
        alpha_feasible=alpha_feasible,
        target_met=final.bad_edges <= cfg.target_delta * n,
        reverted=reverted,
        good_set_degraded=good_set_degraded,
        smoothing_gap=smoothing_gap,
        symmetric_difference_budget=10.0 / cfg.kappa**2 * smoothing_gap,
        candidate_bad_edges=cand_report.bad_edges,
        rows_trimmed=rows_trimmed,
        cols_trimmed=cols_trimmed,
        pairs_added=pairs_added,
        empirical_moved_ratio=(hamming_moved / initial.bad_edges) if initial.bad_edges else None,
    )
    return result, trace


def parse_map_text(text: str) -> VertexMap:
    """Map file format: one image per line, vertex order 0..n-1."""
    images = [int(line.strip()) for line in text.splitlines() if line.strip()]
    return VertexMap(images)


def format_map_text(c: VertexMap) -> str:
    return "\n".join(str(int(i)) for i in c.images) + "\n"


def label_automorphisms(g: LabeledGraph) -> list[VertexMap]:
    """All exact automorphisms of a connected labeled graph.

    A label automorphism of a connected graph is determined by the image of
    vertex 0: propagate c(s.x) = s.c(x) along a BFS tree and keep the
    candidates that commute with every action.
    """
    from .core_graph import is_connected

    if g.n == 0:
        return []
    if not is_connected(g):
        raise ValueError("automorphism enumeration requires a connected graph")
    n, k = g.n, len(g.gens)
    # BFS tree from vertex 0: vertex -> (parent, symbol)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    tree_order = [0]
    tree_edge: dict[int, tuple[int, int]] = {}
    head = 0
    while head < len(tree_order):
        u = tree_order[head]
        head += 1
        for i in range(k):
            w = int(g.actions[i][u])
            if not seen[w]:
                seen[w] = True
                tree_order.append(w)
                tree_edge[w] = (u, i)
    out = []
    for target in range(n):
        c = np.full(n, -1, dtype=np.int64)
        c[0] = target
        for u in tree_order[1:]:
            parent, i = tree_edge[u]
            c[u] = g.actions[i][c[parent]]
        ok = np.unique(c).size == n
        if ok:
            for i in range(k):
                p = g.actions[i]
                if not np.array_equal(c[p], p[c]):
                    ok = False
                    break
        if ok:
            out.append(VertexMap(c))
    return out
