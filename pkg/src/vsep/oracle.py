"""Exhaustive reference solvers for tests and verification.

Both routines enumerate every candidate without pruning so that their
correctness is self-evident; they are meant for tiny inputs only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cbp import InfeasibleBoundsError, Partition
from .graphs import Graph


class TooLargeError(ValueError):
    """Input exceeds the exhaustive-search size cap."""


@dataclass(frozen=True)
class OracleResult:
    optimal_weight: int | None
    witness: Partition | None

    @property
    def feasible(self) -> bool:
        return self.optimal_weight is not None


_VSP_CAP = 16
_CHUNK = 3**11


def brute_force_vsp(graph: Graph, la: int, ua: int, lb: int, ub: int) -> OracleResult:
    """Exact minimum-weight separator by checking all 3^n assignments.

    Every vertex goes to side a, side b, or the separator; assignments with
    an a-b edge or a size bound violation are discarded.  Ties resolve to
    the lexicographically smallest assignment under the digit order
    a < b < separator, vertex 0 most significant.
    """
    n = graph.n
    if n > _VSP_CAP:
        raise TooLargeError(f"n={n} exceeds the exhaustive cap {_VSP_CAP}")
    cost = graph.vertex_cost.astype(np.int64)
    size = graph.vertex_size.astype(np.int64)
    edge_list = [(u, v) for u, v, _ in graph.edges()]

    powers = 3 ** np.arange(n - 1, -1, -1, dtype=np.int64) if n else np.zeros(0, np.int64)
    total = 3**n
    best_w: int | None = None
    best_code: int | None = None
    for chunk_start in range(0, total, _CHUNK):
        codes = np.arange(chunk_start, min(chunk_start + _CHUNK, total), dtype=np.int64)
        digits = (codes[:, None] // powers[None, :]) % 3 if n else np.zeros((1, 0), np.int64)
        in_a = digits == 0
        in_b = digits == 1
        ok = (
            (in_a @ size >= la)
            & (in_a @ size <= ua)
            & (in_b @ size >= lb)
            & (in_b @ size <= ub)
        )
        for u, v in edge_list:
            ok &= ~((in_a[:, u] & in_b[:, v]) | (in_b[:, u] & in_a[:, v]))
        if not ok.any():
            continue
        weights = (digits == 2) @ cost
        idx = np.flatnonzero(ok)
        k = idx[np.argmin(weights[idx])]  # first minimum: lexicographic tie-break
        if best_w is None or weights[k] < best_w:
            best_w = int(weights[k])
            best_code = int(codes[k])

    if best_w is None:
        return OracleResult(None, None)
    digits = (best_code // powers) % 3
    witness = Partition(
        a=tuple(int(i) for i in np.flatnonzero(digits == 0)),
        b=tuple(int(i) for i in np.flatnonzero(digits == 1)),
        s=tuple(int(i) for i in np.flatnonzero(digits == 2)),
        separator_weight=best_w,
    )
    return OracleResult(best_w, witness)


_LP_CAP = 12


def brute_force_lp(g, s, l: int, u: int) -> tuple[float, np.ndarray]:
    """Exact box-and-sum LP maximum by enumerating every polytope vertex.

    Candidates are all binary vectors inside the sum bounds plus, for each
    binary pattern and coordinate, the vector whose free coordinate lands
    the sum exactly on l or u.  Returns (value, maximizer); ties keep the
    first candidate in enumeration order.
    """
    g = np.asarray(g, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    n = g.size
    if n > _LP_CAP:
        raise TooLargeError(f"n={n} exceeds the exhaustive cap {_LP_CAP}")
    if l < 0 or l > u or l > float(s.sum()):
        raise InfeasibleBoundsError(f"bounds l={l} u={u} unreachable")

    patterns = np.arange(2**n, dtype=np.int64)
    bits = ((patterns[:, None] >> np.arange(n)[None, :]) & 1).astype(np.float64)
    sums = bits @ s
    vals = bits @ g

    best_val = -np.inf
    best_vec: np.ndarray | None = None
    inside = (sums >= l) & (sums <= u)
    if inside.any():
        idx = np.flatnonzero(inside)
        k = idx[np.argmax(vals[idx])]
        best_val = float(vals[k])
        best_vec = bits[k].copy()

    for i in range(n):
        base_sum = sums - bits[:, i] * s[i]
        base_val = vals - bits[:, i] * g[i]
        for bound in (l, u):
            vi = (bound - base_sum) / s[i]
            valid = (vi > 0.0) & (vi < 1.0)
            if not valid.any():
                continue
            cand = base_val + g[i] * vi
            idx = np.flatnonzero(valid)
            k = idx[np.argmax(cand[idx])]
            if cand[k] > best_val:
                best_val = float(cand[k])
                best_vec = bits[k].copy()
                best_vec[i] = vi[k]

    if best_vec is None:
        raise InfeasibleBoundsError(f"no vertex satisfies l={l}, u={u}")
    return best_val, best_vec
