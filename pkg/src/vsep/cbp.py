"""Bilinear separator program at one level of the hierarchy.

The program maximizes  c.(x + y) - gamma * x.B.y  over the box [0,1]^n
with sum constraints  la <= s.x <= ua  and  lb <= s.y <= ub.  At the
finest level B is the adjacency matrix plus the identity and s is all
ones; coarse levels aggregate both.  With gamma at its initial value
(the largest cost), binary points with x.B.y = 0 encode vertex
separators: A = {x_i = 1}, B = {y_i = 1}, S = the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .graphs import Graph

EPS = 1e-9

# below this dimension a dense copy of B makes matvecs noticeably cheaper
_DENSE_LIMIT = 128


class DimensionMismatchError(ValueError):
    """Vector length does not match the instance dimension."""


class InfeasibleBoundsError(ValueError):
    """No point in the box can satisfy the sum bounds."""


class DegenerateRepairError(RuntimeError):
    """Rounding cannot reach a binary orthogonal point without breaking a lower bound."""


class NotBinaryError(ValueError):
    """Operation requires a binary point."""


class NotOrthogonalError(ValueError):
    """Operation requires x.B.y = 0."""


class MonotonicityError(RuntimeError):
    """Internal check failed: a block update decreased the objective."""


@dataclass(frozen=True, eq=False)
class CbpInstance:
    """One level's bilinear program data.

    ``B`` is symmetric with positive integer entries; its diagonal is >= 1
    everywhere and its off-diagonal support is exactly the interaction
    (edge/aggregate) structure.  ``gamma0`` is derived as max(c).
    """

    n: int
    B: sp.csr_array
    c: np.ndarray
    s: np.ndarray
    la: int
    ua: int
    lb: int
    ub: int
    gamma0: float = field(init=False)

    def __post_init__(self):
        B = sp.csr_array(self.B)
        B.sort_indices()
        object.__setattr__(self, "B", B)
        c = np.ascontiguousarray(self.c, dtype=np.float64)
        s = np.ascontiguousarray(self.s, dtype=np.float64)
        c.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)
        if B.shape != (self.n, self.n):
            raise DimensionMismatchError(f"B is {B.shape}, expected ({self.n}, {self.n})")
        if c.shape != (self.n,) or s.shape != (self.n,):
            raise DimensionMismatchError("c and s must have length n")
        if np.any(c < 0):
            raise ValueError("costs must be >= 0")
        if np.any(s < 1):
            raise ValueError("sizes must be >= 1")
        if np.any(B.data < 1):
            raise ValueError("B entries must be >= 1")
        if self.n and np.any(B.diagonal() < 1):
            raise ValueError("B diagonal must be >= 1")
        total = float(s.sum())
        if not (0 <= self.la <= self.ua <= total and 0 <= self.lb <= self.ub <= total):
            raise ValueError(f"bad bounds la={self.la} ua={self.ua} lb={self.lb} ub={self.ub} (s total {total})")
        object.__setattr__(self, "gamma0", float(c.max()) if self.n else 0.0)
        dense = B.toarray() if self.n <= _DENSE_LIMIT else None
        object.__setattr__(self, "_dense", dense)

    def bdot(self, v: np.ndarray) -> np.ndarray:
        """B @ v."""
        if self._dense is not None:
            return self._dense @ v
        return self.B @ v

    def interactions(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Sorted column indices and values of row i of B (diagonal included)."""
        lo, hi = self.B.indptr[i], self.B.indptr[i + 1]
        return self.B.indices[lo:hi], self.B.data[lo:hi]


@dataclass
class Point:
    """A pair of relaxed indicator vectors in [0,1]^n."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)

    def copy(self) -> "Point":
        return Point(self.x.copy(), self.y.copy())


@dataclass(frozen=True)
class Partition:
    """A separator solution: disjoint sides a, b and the separator s."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    s: tuple[int, ...]
    separator_weight: int


def instance_from_graph(g: Graph, la: int, ua: int, lb: int, ub: int) -> CbpInstance:
    """Finest-level instance: B = adjacency + identity, c and s from the graph."""
    adj = sp.csr_array(
        (g.weights.astype(np.float64), g.indices, g.indptr), shape=(g.n, g.n)
    )
    B = sp.csr_array(adj + sp.eye_array(g.n, format="csr"))
    return CbpInstance(g.n, B, g.vertex_cost, g.vertex_size, la, ua, lb, ub)


def _point_arrays(inst: CbpInstance, p: Point) -> tuple[np.ndarray, np.ndarray]:
    if p.x.shape != (inst.n,) or p.y.shape != (inst.n,):
        raise DimensionMismatchError(
            f"point has shapes {p.x.shape}/{p.y.shape}, instance needs ({inst.n},)"
        )
    return p.x, p.y


def objective(inst: CbpInstance, p: Point, gamma: float) -> float:
    """c.(x + y) - gamma * x.B.y."""
    x, y = _point_arrays(inst, p)
    return float(inst.c @ (x + y) - gamma * (x @ inst.bdot(y)))


def feasible(inst: CbpInstance, p: Point, tol: float = EPS) -> bool:
    """Box bounds plus both sum constraints; x/y overlap is allowed."""
    x, y = _point_arrays(inst, p)
    if np.any(x < -tol) or np.any(x > 1 + tol) or np.any(y < -tol) or np.any(y > 1 + tol):
        return False
    sx = float(inst.s @ x)
    sy = float(inst.s @ y)
    return (
        inst.la - tol <= sx <= inst.ua + tol
        and inst.lb - tol <= sy <= inst.ub + tol
    )


def solve_block_lp(g: Sequence[float], s: Sequence[float], l: int, u: int) -> np.ndarray:
    """Maximize g.v over 0 <= v <= 1 with l <= s.v <= u.

    Greedy on the ratio g_i/s_i, ties broken toward the lower index: take
    positive-gain items until u is hit (cut item set fractionally to land
    exactly on u), then, if the sum is still below l, keep walking down the
    sorted order until it reaches exactly l.  The result is a vertex of the
    polytope with at most one fractional coordinate.
    """
    g = np.ascontiguousarray(g, dtype=np.float64)
    s = np.ascontiguousarray(s, dtype=np.float64)
    if g.shape != s.shape or g.ndim != 1:
        raise DimensionMismatchError(f"g has shape {g.shape}, s has shape {s.shape}")
    total = float(s.sum())
    if l < 0 or l > u or l > total:
        raise InfeasibleBoundsError(f"bounds l={l} u={u} unreachable with s total {total}")

    n = g.size
    if n <= 32:
        return _small_block_lp(g, s, l, u)
    v = np.zeros(n)
    order = np.argsort(-(g / s), kind="stable")
    ss = s[order]
    cums = np.cumsum(ss)
    npos = int(np.count_nonzero(g > 0))

    k = int(np.searchsorted(cums[:npos], u, side="right"))
    v[order[:k]] = 1.0
    run = float(cums[k - 1]) if k else 0.0
    if k < npos and run < u:
        i = order[k]
        v[i] = (u - run) / float(s[i])
        run = float(u)

    if run < l:
        # every positive-gain item is already fully in; continue down the order
        tail = order[npos:]
        tcums = run + np.cumsum(ss[npos:])
        j = int(np.searchsorted(tcums, l, side="left"))
        v[tail[:j]] = 1.0
        prev = float(tcums[j - 1]) if j else run
        i = tail[j]
        v[i] = min((l - prev) / float(s[i]), 1.0)
    return v


def _small_block_lp(g: np.ndarray, s: np.ndarray, l: int, u: int) -> np.ndarray:
    # same greedy as above; plain lists beat numpy overhead at this size
    gl = g.tolist()
    sl = s.tolist()
    neg_ratio = [-a / b for a, b in zip(gl, sl)]
    order = sorted(range(len(gl)), key=neg_ratio.__getitem__)  # stable: ties keep low index
    v = [0.0] * len(gl)
    run = 0.0
    pos = len(order)
    for t, i in enumerate(order):
        if gl[i] <= 0:
            pos = t
            break
        si = sl[i]
        if run + si <= u:
            v[i] = 1.0
            run += si
        else:
            if u > run:
                v[i] = (u - run) / si
                run = float(u)
            pos = t + 1
            break
    if run < l:
        for i in order[pos:]:
            need = l - run
            if need <= 0:
                break
            si = sl[i]
            if si <= need:
                v[i] = 1.0
                run += si
            else:
                v[i] = need / si
                run = float(l)
    return np.array(v)


def refine(
    inst: CbpInstance,
    p: Point,
    gamma: float,
    eps: float = EPS,
    step_log: list[float] | None = None,
) -> Point:
    """Alternate exact block-LP updates of x and y until a full sweep gains <= eps.

    Every update maximizes the objective over its block, so the objective
    is nondecreasing at each step; this is verified and a MonotonicityError
    is raised on any violation.  The returned point is a blockwise fixed
    point at the given gamma.

    The start must lie in the box; a start outside the sum bounds is
    allowed (the first update of each block restores them), in which case
    that block's first step is exempt from the monotonicity check.
    """
    x, y = _point_arrays(inst, p)
    if inst.n and (
        min(x.min(), y.min()) < -eps or max(x.max(), y.max()) > 1 + eps
    ):
        raise ValueError("refine requires a starting point inside the box")
    x, y = x.copy(), y.copy()
    c, s = inst.c, inst.s
    x_in_bounds = inst.la - eps <= float(s @ x) <= inst.ua + eps
    y_in_bounds = inst.lb - eps <= float(s @ y) <= inst.ub + eps
    f_prev = float(c @ (x + y) - gamma * (x @ inst.bdot(y)))
    while True:
        gx = c - gamma * inst.bdot(y)
        x = solve_block_lp(gx, s, inst.la, inst.ua)
        f_x = float(gx @ x + c @ y)
        if x_in_bounds:
            _check_step(f_prev, f_x, eps)
        x_in_bounds = True
        if step_log is not None:
            step_log.append(f_x)

        gy = c - gamma * inst.bdot(x)
        y = solve_block_lp(gy, s, inst.lb, inst.ub)
        f_y = float(gy @ y + c @ x)
        if y_in_bounds:
            _check_step(f_x, f_y, eps)
        y_in_bounds = True
        if step_log is not None:
            step_log.append(f_y)

        if f_y - f_prev <= eps:
            return Point(x, y)
        f_prev = f_y


def _check_step(before: float, after: float, eps: float) -> None:
    if after < before - eps:
        raise MonotonicityError(f"objective fell from {before!r} to {after!r}")


def round_to_binary(inst: CbpInstance, p: Point) -> Point:
    """Move to a feasible binary point with x.B.y = 0.

    Three phases: fractional coordinates of x are eliminated along
    sum-preserving two-coordinate directions (y fixed), then the same for
    y, then every remaining interaction with x_i = y_j = 1 is cleared by
    zeroing one endpoint.  Every move takes the best available objective
    direction at gamma0, so the objective never decreases unless the only
    fractional coordinate sits pinned on a sum bound where a lossless
    binary completion of its block does not exist.  Raises
    DegenerateRepairError when clearing an interaction would push both
    sides below their lower bounds.
    """
    if not feasible(inst, p):
        raise ValueError("round_to_binary requires a feasible point")
    x, y = p.x.copy(), p.y.copy()
    _snap(x)
    _snap(y)

    gx = inst.c - inst.gamma0 * inst.bdot(y)
    _defractionalize(x, gx, inst.s, inst.la, inst.ua)
    gy = inst.c - inst.gamma0 * inst.bdot(x)
    _defractionalize(y, gy, inst.s, inst.lb, inst.ub)
    _orthogonality_repair(inst, x, y)
    return Point(x, y)


def _snap(v: np.ndarray, tol: float = EPS) -> None:
    v[np.abs(v) <= tol] = 0.0
    v[np.abs(v - 1.0) <= tol] = 1.0


def _fractional(v: np.ndarray) -> list[int]:
    return [int(i) for i in np.flatnonzero((v > 0.0) & (v < 1.0))]


def _defractionalize(v: np.ndarray, grad: np.ndarray, s: np.ndarray, l: int, u: int) -> None:
    """Drive v to binary in place, keeping l <= s.v <= u and grad.v nondecreasing
    wherever a nondecreasing completion exists."""
    guard = 4 * v.size + 8
    while True:
        guard -= 1
        if guard < 0:
            raise DegenerateRepairError("rounding failed to converge")
        frac = _fractional(v)
        if not frac:
            return
        if len(frac) >= 2:
            _pair_step(v, grad, s, frac[0], frac[1])
            continue

        i = frac[0]
        preferred = 1 if grad[i] > 0 else 0  # ties go toward 0
        if not _finish_single(v, grad, s, l, u, i, preferred):
            if not _finish_single(v, grad, s, l, u, i, 1 - preferred):
                raise DegenerateRepairError(f"no move can finish coordinate {i}")


def _pair_step(v: np.ndarray, grad: np.ndarray, s: np.ndarray, i: int, j: int) -> None:
    """One move along s_j*e_i - s_i*e_j; at least one of v_i, v_j goes binary."""
    slope = s[j] * grad[i] - s[i] * grad[j]
    if slope >= 0:  # raise v_i, lower v_j (ties take the positive sign)
        t1 = (1.0 - v[i]) / s[j]
        t2 = v[j] / s[i]
        t = min(t1, t2)
        v[i] = 1.0 if t1 <= t2 else v[i] + t * s[j]
        v[j] = 0.0 if t2 <= t1 else v[j] - t * s[i]
    else:
        t1 = v[i] / s[j]
        t2 = (1.0 - v[j]) / s[i]
        t = min(t1, t2)
        v[i] = 0.0 if t1 <= t2 else v[i] - t * s[j]
        v[j] = 1.0 if t2 <= t1 else v[j] + t * s[i]


def _finish_single(
    v: np.ndarray, grad: np.ndarray, s: np.ndarray, l: int, u: int, i: int, toward: int
) -> bool:
    """Try to drive the single fractional v_i to ``toward`` (0 or 1).

    Moves v_i directly while the sum constraint allows; once pinned on a
    sum bound, continues along sum-preserving directions s_k*e_i - s_i*e_k
    with binary partners k.  Partners whose size matches the remaining
    fractional mass finish the pair exactly; smaller partners flip fully
    and shrink the mass.  Within a class, the partner with the best
    objective slope wins, ties toward the lower index.  Returns False when
    the mass cannot be placed this way (the caller then tries the other
    direction, which is not pinned).
    """
    sv = float(s @ v)
    if toward == 1:
        room = max((u - sv) / s[i], 0.0)
        if 1.0 - v[i] <= room:
            v[i] = 1.0
            return True
        v[i] += room  # now pinned at s.v = u
    else:
        room = max((sv - l) / s[i], 0.0)
        if v[i] <= room:
            v[i] = 0.0
            return True
        v[i] -= room  # now pinned at s.v = l

    while True:
        mass = (1.0 - v[i]) * s[i] if toward == 1 else v[i] * s[i]
        if mass <= EPS:
            v[i] = float(toward)
            return True
        if toward == 1:
            candidates = np.flatnonzero(v == 1.0)  # partners yield size to v_i
            scores = grad[i] * s - s[i] * grad
        else:
            candidates = np.flatnonzero(v == 0.0)  # partners take size from v_i
            scores = s[i] * grad - grad[i] * s
        candidates = candidates[candidates != i]
        if candidates.size == 0:
            return False

        exact = candidates[np.abs(s[candidates] - mass) <= EPS]
        if exact.size:
            k = int(exact[np.argmax(scores[exact])])
            v[i] = float(toward)
            v[k] = 1.0 - float(toward)
            return True
        saturating = candidates[s[candidates] < mass]
        if not saturating.size:
            return False
        k = int(saturating[np.argmax(scores[saturating])])
        v[k] = 1.0 - float(toward)
        v[i] += s[k] / s[i] if toward == 1 else -s[k] / s[i]


def _orthogonality_repair(inst: CbpInstance, x: np.ndarray, y: np.ndarray) -> None:
    """Zero one endpoint of every interacting pair with x_i = y_j = 1.

    Prefers the side whose sum stays above its lower bound; when both
    qualify, the endpoint with the smaller cost goes (ties clear y).  Each
    zeroing changes the objective by gamma0 * interaction - cost >= 0.
    """
    c, s = inst.c, inst.s
    sx = float(s @ x)
    sy = float(s @ y)
    for i in range(inst.n):
        if x[i] != 1.0:
            continue
        cols, _ = inst.interactions(i)
        for j in cols:
            j = int(j)
            if y[j] != 1.0:
                continue
            x_ok = sx - s[i] >= inst.la - EPS
            y_ok = sy - s[j] >= inst.lb - EPS
            if x_ok and (not y_ok or c[i] < c[j]):
                x[i] = 0.0
                sx -= s[i]
                break
            if not y_ok:
                raise DegenerateRepairError(
                    f"cannot clear interaction ({i}, {j}) without breaking a lower bound"
                )
            y[j] = 0.0
            sy -= s[j]


def extract_partition(inst: CbpInstance, p: Point) -> Partition:
    """Read the separator off a binary orthogonal point: S = {x_i = y_i = 0}."""
    x, y = _point_arrays(inst, p)
    if np.any(np.minimum(np.abs(x), np.abs(x - 1)) > EPS) or np.any(
        np.minimum(np.abs(y), np.abs(y - 1)) > EPS
    ):
        raise NotBinaryError("point is not binary")
    xb = x > 0.5
    yb = y > 0.5
    if float(xb @ inst.bdot(yb.astype(np.float64))) > EPS:
        raise NotOrthogonalError("x.B.y != 0")
    if not feasible(inst, p):
        raise ValueError("point violates the sum bounds")
    sep = ~xb & ~yb
    return Partition(
        a=tuple(int(i) for i in np.flatnonzero(xb)),
        b=tuple(int(i) for i in np.flatnonzero(yb)),
        s=tuple(int(i) for i in np.flatnonzero(sep)),
        separator_weight=int(round(float(inst.c[sep].sum()))),
    )


def escape(
    inst: CbpInstance,
    p: Point,
    gamma_steps: int = 10,
    eps: float = EPS,
    stats: dict | None = None,
    step_log: list[tuple[float, list[float]]] | None = None,
) -> Point:
    """Leave local maxima by refining at reduced penalties.

    Walks gamma down the schedule gamma0 * (1 - k/K) for k = 1..K, refining
    from the current point at each value and re-refining the result at
    gamma0.  A strict improvement restarts the schedule from the improved
    point; a full pass down to gamma = 0 without improvement terminates.
    The objective at gamma0 never decreases.

    When given, ``step_log`` collects one (gamma, per-step objectives) pair
    per inner refinement.
    """
    K = int(gamma_steps)
    current = p
    f_curr = objective(inst, current, inst.gamma0)
    escapes = 0
    k = 1
    while k <= K:
        gamma_k = inst.gamma0 * (1.0 - k / K)
        probe_log: list[float] | None = [] if step_log is not None else None
        probe = refine(inst, current, gamma_k, eps=eps, step_log=probe_log)
        back_log: list[float] | None = [] if step_log is not None else None
        back = refine(inst, probe, inst.gamma0, eps=eps, step_log=back_log)
        if step_log is not None:
            step_log.append((gamma_k, probe_log))
            step_log.append((inst.gamma0, back_log))
        f_back = objective(inst, back, inst.gamma0)
        if f_back > f_curr + eps:
            current, f_curr = back, f_back
            escapes += 1
            k = 1
        else:
            k += 1
    if stats is not None:
        stats["escapes"] = stats.get("escapes", 0) + escapes
    return current


def partition_violations(
    g: Graph, part: Partition, la: int, ua: int, lb: int, ub: int
) -> list[str]:
    """Check a Partition against the graph itself (not against B).

    Verifies the three sets partition the vertices, no edge joins a and b,
    both size bounds hold, and the recorded weight matches the separator's
    cost sum.  Returns one record per violation.
    """
    out: list[str] = []
    side = np.zeros(g.n, dtype=np.int8)  # 1 = a, 2 = b, 3 = s
    for label, group in ((1, part.a), (2, part.b), (3, part.s)):
        for v in group:
            if not 0 <= v < g.n:
                out.append(f"vertex out of range: {v}")
            elif side[v]:
                out.append(f"vertex in two sets: {v}")
            else:
                side[v] = label
    missing = np.flatnonzero(side == 0)
    out.extend(f"vertex in no set: {int(v)}" for v in missing)
    if out:
        return out

    for u in part.a:
        nbrs, _ = g.neighbors(u)
        for v in nbrs[side[nbrs] == 2]:
            out.append(f"edge between a and b: ({u}, {int(v)})")
    size_a = int(g.vertex_size[list(part.a)].sum()) if part.a else 0
    size_b = int(g.vertex_size[list(part.b)].sum()) if part.b else 0
    if not la <= size_a <= ua:
        out.append(f"size of a = {size_a} outside [{la}, {ua}]")
    if not lb <= size_b <= ub:
        out.append(f"size of b = {size_b} outside [{lb}, {ub}]")
    weight = int(g.vertex_cost[list(part.s)].sum()) if part.s else 0
    if weight != part.separator_weight:
        out.append(f"separator weight {part.separator_weight} != {weight}")
    return out
