"""Coarsening hierarchy and the multilevel solve driver.

Coarsening pairs each vertex with its most strongly coupled unmatched
neighbor and contracts the pairs; edge weights between aggregates add up,
as do vertex costs, sizes, and the interaction matrix.  Uncoarsening
copies aggregate values to their members, so every objective value and
sum constraint is preserved exactly across levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .cbp import (
    CbpInstance,
    DegenerateRepairError,
    Partition,
    Point,
    escape,
    extract_partition,
    instance_from_graph,
    objective,
    refine,
    round_to_binary,
    EPS,
)
from .graphs import Graph, validate
from .oracle import brute_force_vsp


class InfeasibleError(RuntimeError):
    """No partition can satisfy the size bounds."""


@dataclass(frozen=True)
class SolveParams:
    """Solver configuration; defaults match the standard benchmark setup."""

    ub_fraction: float = 0.503
    la: int = 1
    lb: int = 1
    coarsest_size: int = 64
    gamma_steps: int = 10
    multistarts: int = 20
    seed: int = 0
    max_levels: int = 64

    def __post_init__(self):
        if not 0 < self.ub_fraction <= 1:
            raise ValueError("ub_fraction must be in (0, 1]")
        if self.coarsest_size < 2:
            raise ValueError("coarsest_size must be >= 2")
        if self.multistarts < 1:
            raise ValueError("multistarts must be >= 1")
        if self.gamma_steps < 1:
            raise ValueError("gamma_steps must be >= 1")
        if self.la < 0 or self.lb < 0:
            raise ValueError("lower bounds must be >= 0")


@dataclass(frozen=True)
class Matching:
    """Disjoint matched pairs plus the vertices left single."""

    pairs: tuple[tuple[int, int], ...]
    singletons: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Level:
    """One level: its graph, its program, and the map down to the finer level."""

    graph: Graph
    inst: CbpInstance
    parent_map: tuple[tuple[int, ...], ...] | None  # None on the finest level


@dataclass(frozen=True, eq=False)
class Hierarchy:
    levels: tuple[Level, ...]  # finest first
    params: SolveParams


@dataclass
class LevelTrace:
    level: int
    n: int
    objective_before: float | None
    objective_after: float
    escapes: int
    separator_weight: int


def ascending_degree_order(g: Graph) -> np.ndarray:
    """Vertices by increasing degree, ties toward the lower index."""
    return np.argsort(g.degrees(), kind="stable")


def random_order(g: Graph, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(g.n)


def heavy_edge_matching(g: Graph, order: np.ndarray) -> Matching:
    """Visit vertices in the given order, pairing each unmatched vertex with
    its unmatched neighbor of maximum edge weight (ties toward the lower
    index).  Vertices with no unmatched neighbor stay single."""
    mate = np.full(g.n, -1, dtype=np.int64)
    pairs: list[tuple[int, int]] = []
    for u in order:
        u = int(u)
        if mate[u] >= 0:
            continue
        best = -1
        best_w = 0
        nbrs, ws = g.neighbors(u)
        for v, w in zip(nbrs, ws):
            if mate[v] < 0 and w > best_w:
                best, best_w = int(v), int(w)
        if best >= 0:
            mate[u] = best
            mate[best] = u
            pairs.append((u, best))
    singles = tuple(int(v) for v in np.flatnonzero(mate < 0))
    return Matching(tuple(pairs), singles)


def contract(level: Level, m: Matching) -> Level:
    """Merge each matched pair into one coarse vertex.

    Costs and sizes add over a group; parallel edges between two groups
    merge into one edge carrying the summed weight.  The coarse interaction
    matrix is the group-wise sum of the fine one, which keeps the bilinear
    objective of any prolonged point identical to its coarse value.
    """
    g = level.graph
    seen = np.zeros(g.n, dtype=bool)
    for u, v in m.pairs:
        nbrs, _ = g.neighbors(u)
        if v not in nbrs:
            raise ValueError(f"matched pair ({u}, {v}) is not an edge")
        seen[u] = seen[v] = True
    seen[list(m.singletons)] = True
    if not seen.all() or sum(len(p) for p in m.pairs) + len(m.singletons) != g.n:
        raise ValueError("matching does not partition the vertex set")

    groups = sorted(
        [tuple(sorted(p)) for p in m.pairs] + [(v,) for v in m.singletons],
        key=lambda grp: grp[0],
    )
    nc = len(groups)
    fine = np.fromiter((v for grp in groups for v in grp), dtype=np.int64, count=g.n)
    coarse = np.fromiter(
        (i for i, grp in enumerate(groups) for _ in grp), dtype=np.int64, count=g.n
    )
    P = sp.csr_array((np.ones(g.n), (fine, coarse)), shape=(g.n, nc))

    Bc = sp.csr_array(P.T @ level.inst.B @ P)
    cc = P.T @ level.inst.c
    sc = P.T @ level.inst.s
    inst = CbpInstance(
        nc, Bc, cc, sc, level.inst.la, level.inst.ua, level.inst.lb, level.inst.ub
    )
    return Level(_interaction_graph(inst), inst, tuple(groups))


def _interaction_graph(inst: CbpInstance) -> Graph:
    """Graph whose weighted adjacency is the off-diagonal part of B."""
    coo = inst.B.tocoo()
    mask = (coo.row < coo.col)
    edges = zip(coo.row[mask], coo.col[mask], coo.data[mask])
    return Graph.from_edges(
        inst.n,
        [(int(u), int(v), int(round(w))) for u, v, w in edges],
        vertex_cost=np.rint(inst.c).astype(np.int64),
        vertex_size=np.rint(inst.s).astype(np.int64),
    )


def prolong(coarse: Level, p: Point) -> Point:
    """Copy each aggregate's x/y values to all of its fine-level members."""
    pm = coarse.parent_map
    if pm is None:
        raise ValueError("the finest level cannot be prolonged")
    n_fine = sum(len(grp) for grp in pm)
    x = np.zeros(n_fine)
    y = np.zeros(n_fine)
    for idx, grp in enumerate(pm):
        for v in grp:
            x[v] = p.x[idx]
            y[v] = p.y[idx]
    return Point(x, y)


def build_hierarchy(g: Graph, params: SolveParams) -> Hierarchy:
    """Coarsen until the graph is small enough or matching stops shrinking it.

    The sum bounds ua = ub = floor(ub_fraction * n) are fixed from the
    finest level; the size vector keeps them meaningful on coarse levels.
    """
    ua = math.floor(params.ub_fraction * g.n)
    if ua < params.la or ua < params.lb:
        raise InfeasibleError(
            f"upper bound {ua} below lower bounds ({params.la}, {params.lb})"
        )
    levels = [Level(g, instance_from_graph(g, params.la, ua, params.lb, ua), None)]
    while len(levels) < params.max_levels:
        cur = levels[-1]
        if cur.graph.n <= params.coarsest_size:
            break
        matching = heavy_edge_matching(cur.graph, ascending_degree_order(cur.graph))
        n_next = len(matching.pairs) + len(matching.singletons)
        if n_next > 0.95 * cur.graph.n:
            break
        levels.append(contract(cur, matching))
    return Hierarchy(tuple(levels), params)


def _reachable_sums(s: np.ndarray) -> int:
    bits = 1
    for t in s:
        bits |= bits << int(t)
    return bits


def _sum_reachable(s: np.ndarray, l: int, u: int) -> bool:
    bits = _reachable_sums(s)
    total = int(s.sum())
    hi = min(u, total)
    if l > hi:
        return False
    window = (bits >> l) & ((1 << (hi - l + 1)) - 1)
    return window != 0


def _dp_binary_side(s: np.ndarray, l: int, u: int) -> np.ndarray:
    """Deterministic fallback: pick the smallest reachable sum in [l, u]."""
    n = s.size
    prefix = [1]
    for t in s:
        prefix.append(prefix[-1] | (prefix[-1] << int(t)))
    total = int(s.sum())
    target = next(t for t in range(max(l, 0), min(u, total) + 1) if (prefix[n] >> t) & 1)
    v = np.zeros(n)
    for i in range(n - 1, -1, -1):
        if not (prefix[i] >> target) & 1:
            v[i] = 1.0
            target -= int(s[i])
    return v


def _random_binary_side(
    s: np.ndarray, l: int, u: int, rng: np.random.Generator
) -> np.ndarray | None:
    target = int(rng.integers(l, u + 1)) if u > l else l
    v = np.zeros(s.size)
    run = 0.0
    for idx in rng.permutation(s.size):
        if run + s[idx] <= target:
            v[idx] = 1.0
            run += s[idx]
    return v if run >= l else None


def _random_binary_feasible(inst: CbpInstance, rng: np.random.Generator) -> Point:
    sides = []
    for l, u in ((inst.la, inst.ua), (inst.lb, inst.ub)):
        v = None
        for _ in range(32):
            v = _random_binary_side(inst.s, l, u, rng)
            if v is not None:
                break
        if v is None:
            v = _dp_binary_side(inst.s, l, u)
        sides.append(v)
    return Point(sides[0], sides[1])


def solve_coarsest(
    inst: CbpInstance, params: SolveParams, stats: dict | None = None
) -> Point:
    """Best binary orthogonal point over seeded multistarts.

    Each start refines a random feasible binary point, escapes, and rounds;
    the best objective at gamma0 wins (first found on ties).  For n <= 12
    an exhaustive search backstops the multistarts and its solution is used
    when strictly better.  Raises InfeasibleError when no binary point can
    satisfy the bounds.
    """
    if not _sum_reachable(inst.s, inst.la, inst.ua) or not _sum_reachable(
        inst.s, inst.lb, inst.ub
    ):
        raise InfeasibleError("no binary point satisfies the sum bounds")

    best: Point | None = None
    best_f = -math.inf
    for start in range(params.multistarts):
        rng = np.random.default_rng((params.seed, start))
        p = _random_binary_feasible(inst, rng)
        try:
            p = refine(inst, p, inst.gamma0)
            p = escape(inst, p, gamma_steps=params.gamma_steps, stats=stats)
            p = round_to_binary(inst, p)
        except DegenerateRepairError:
            continue
        f = objective(inst, p, inst.gamma0)
        if f > best_f + EPS:
            best, best_f = p, f

    # exhaustive backstop; also the tie-breaker of last resort when every
    # start failed to round and the instance is still small enough
    if inst.n <= 12 or (best is None and inst.n <= 16):
        result = brute_force_vsp(
            _interaction_graph(inst), inst.la, inst.ua, inst.lb, inst.ub
        )
        if not result.feasible:
            if best is None:
                raise InfeasibleError("exhaustive search found no valid partition")
        else:
            exact = _partition_point(inst.n, result.witness)
            f = objective(inst, exact, inst.gamma0)
            if best is None or f > best_f + EPS:
                best, best_f = exact, f
    if best is None:
        raise InfeasibleError("no start reached a binary orthogonal point")
    return best


def _partition_point(n: int, part: Partition) -> Point:
    x = np.zeros(n)
    y = np.zeros(n)
    x[list(part.a)] = 1.0
    y[list(part.b)] = 1.0
    return Point(x, y)


def _separator_weight(inst: CbpInstance, p: Point) -> int:
    mask = (p.x < 0.5) & (p.y < 0.5)
    return int(round(float(inst.c[mask].sum())))


def solve(g: Graph, params: SolveParams | None = None) -> tuple[Partition, list[LevelTrace]]:
    """Full multilevel pipeline from a graph to a separator partition.

    Coarsens, solves the coarsest level, then per finer level prolongs,
    refines, escapes, and rounds.  Returns the finest-level partition and
    one trace record per level (coarsest first).
    """
    params = params or SolveParams()
    problems = validate(g)
    if problems:
        raise ValueError(f"invalid graph: {problems[:3]}")
    hier = build_hierarchy(g, params)
    levels = hier.levels

    coarsest = levels[-1]
    stats: dict = {}
    p = solve_coarsest(coarsest.inst, params, stats=stats)
    trace = [
        LevelTrace(
            level=len(levels) - 1,
            n=coarsest.graph.n,
            objective_before=None,
            objective_after=objective(coarsest.inst, p, coarsest.inst.gamma0),
            escapes=stats.get("escapes", 0),
            separator_weight=_separator_weight(coarsest.inst, p),
        )
    ]

    for li in range(len(levels) - 2, -1, -1):
        fine = levels[li]
        p = prolong(levels[li + 1], p)
        f_before = objective(fine.inst, p, fine.inst.gamma0)
        stats = {}
        p = refine(fine.inst, p, fine.inst.gamma0)
        p = escape(fine.inst, p, gamma_steps=params.gamma_steps, stats=stats)
        p = round_to_binary(fine.inst, p)
        trace.append(
            LevelTrace(
                level=li,
                n=fine.graph.n,
                objective_before=f_before,
                objective_after=objective(fine.inst, p, fine.inst.gamma0),
                escapes=stats.get("escapes", 0),
                separator_weight=_separator_weight(fine.inst, p),
            )
        )

    return extract_partition(levels[0].inst, p), trace
