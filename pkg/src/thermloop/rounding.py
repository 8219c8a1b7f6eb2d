"""Integer approximation of the relaxed machine switch trajectory.

Given the relaxed values q_k in [0,1] on intervals of length dt_k, both
methods construct a binary sequence whose running integral tracks the
relaxed one:

* sum-up rounding: greedy, b_k = 1 iff the accumulated surplus reaches
  half the current interval,
* combinatorial integral approximation: exact minimization of
  max_k |sum_{i<=k} (q_i - b_i) dt_i| by best-first branch and bound,
  ties broken by fewer switches, then lexicographically smaller b.

The branch and bound prunes on (position, latched value, switch use,
per-duration activation counts); the counts determine the accumulated
binary mass exactly, so states collapse onto a small lattice whenever the
grid uses few distinct interval lengths (uniform grids, the 10 min / 1 h
controller grid).  An exhaustive oracle covers small instances for tests.
"""

from __future__ import annotations

import heapq
import itertools

import numpy as np

__all__ = ["RelaxedBinary", "sum_up_rounding", "cia", "cia_exhaustive", "accumulated_deviation"]

MAX_EXPANSIONS = 2_000_000


class RelaxedBinary:
    """Validated (q, dt) pair."""

    def __init__(self, q, dt, tol: float = 1e-7):
        self.q = np.asarray(q, dtype=float)
        self.dt = np.asarray(dt, dtype=float)
        if self.q.shape != self.dt.shape or self.q.ndim != 1:
            raise ValueError("q and dt must be 1-d arrays of equal length")
        if self.q.size == 0:
            raise ValueError("at least one interval is required")
        if np.any(self.dt <= 0):
            raise ValueError("interval lengths must be positive")
        if np.any(self.q < -tol) or np.any(self.q > 1 + tol):
            raise ValueError("relaxed values must lie in [0, 1]")
        self.q = np.clip(self.q, 0.0, 1.0)

    @property
    def n(self) -> int:
        return self.q.size


def sum_up_rounding(q, dt) -> np.ndarray:
    """b_k = 1 iff sum_{i<=k} q_i dt_i - sum_{i<k} b_i dt_i >= dt_k / 2."""
    rb = RelaxedBinary(q, dt)
    b = np.zeros(rb.n, dtype=int)
    q_acc = 0.0
    b_acc = 0.0
    for k in range(rb.n):
        q_acc += rb.q[k] * rb.dt[k]
        if q_acc - b_acc >= 0.5 * rb.dt[k]:
            b[k] = 1
            b_acc += rb.dt[k]
    return b


def accumulated_deviation(q, b, dt) -> float:
    """max_k |sum_{i<=k} (q_i - b_i) dt_i| (order of intervals matters)."""
    q = np.asarray(q, dtype=float)
    b = np.asarray(b, dtype=float)
    dt = np.asarray(dt, dtype=float)
    gaps = np.cumsum((q - b) * dt)
    return float(np.max(np.abs(gaps))) if gaps.size else 0.0


def _switch_count(bits) -> int:
    bits = np.asarray(bits, dtype=int)
    return int(np.sum(bits[1:] != bits[:-1])) if bits.size > 1 else 0


def cia(q, dt, max_switches: int | None = None) -> np.ndarray:
    """Deviation-optimal binary sequence, switch- then lex-tie-broken."""
    rb = RelaxedBinary(q, dt)
    if max_switches is not None and max_switches < 0:
        raise ValueError("max_switches must be nonnegative")
    theta = _cia_optimum(rb, max_switches)
    if theta is None:
        raise ValueError(f"no binary sequence satisfies max_switches={max_switches}")
    limit = max_switches if max_switches is not None else rb.n - 1
    for budget in range(0, limit + 1):
        seq = _lex_smallest(rb, theta, budget)
        if seq is not None:
            return np.asarray(seq, dtype=int)
    raise RuntimeError("optimal sequence vanished during tie-break search")


def _dt_codes(rb: RelaxedBinary):
    values, codes = np.unique(rb.dt, return_inverse=True)
    return values.size, codes


def _cia_optimum(rb: RelaxedBinary, max_switches) -> float | None:
    """Minimal achievable deviation (best-first on the prefix-max bound)."""
    n_codes, codes = _dt_codes(rb)
    zero_counts = (0,) * n_codes
    heap = [(0.0, 0, 0, 0, zero_counts, 0.0)]
    seen: dict = {}
    expansions = 0
    while heap:
        bound, k, sw, last1, counts, gap = heapq.heappop(heap)
        if k == rb.n:
            return bound
        expansions += 1
        if expansions > MAX_EXPANSIONS:
            raise RuntimeError("branch-and-bound exceeded its expansion limit")
        for bk in (0, 1):
            sw2 = sw + (1 if (k > 0 and bk != last1) else 0)
            if max_switches is not None and sw2 > max_switches:
                continue
            gap2 = gap + (rb.q[k] - bk) * rb.dt[k]
            bound2 = max(bound, abs(gap2))
            counts2 = counts if bk == 0 else _bump(counts, codes[k])
            key = (k + 1, bk, sw2 if max_switches is not None else 0, counts2)
            prev = seen.get(key)
            if prev is not None and prev <= bound2:
                continue
            seen[key] = bound2
            heapq.heappush(heap, (bound2, k + 1, sw2, bk, counts2, gap2))
    return None


def _bump(counts: tuple, code: int) -> tuple:
    return counts[:code] + (counts[code] + 1,) + counts[code + 1:]


def _lex_smallest(rb: RelaxedBinary, theta: float, budget: int):
    """Lexicographically smallest sequence with deviation <= theta + tol."""
    n = rb.n
    n_codes, codes = _dt_codes(rb)
    tol = theta
    infeasible: set = set()

    def feasible(k, last1, sw, counts, gap) -> bool:
        if k == n:
            return True
        key = (k, last1, sw, counts)
        if key in infeasible:
            return False
        for bk in (0, 1):
            sw2 = sw + (1 if (k > 0 and bk != last1) else 0)
            if sw2 > budget:
                continue
            gap2 = gap + (rb.q[k] - bk) * rb.dt[k]
            if abs(gap2) <= tol and feasible(
                k + 1, bk, sw2, counts if bk == 0 else _bump(counts, codes[k]), gap2
            ):
                return True
        infeasible.add(key)
        return False

    seq = np.zeros(n, dtype=int)
    gap, last1, sw = 0.0, 0, 0
    counts = (0,) * n_codes
    for k in range(n):
        placed = False
        for bk in (0, 1):
            sw2 = sw + (1 if (k > 0 and bk != last1) else 0)
            if sw2 > budget:
                continue
            gap2 = gap + (rb.q[k] - bk) * rb.dt[k]
            counts2 = counts if bk == 0 else _bump(counts, codes[k])
            if abs(gap2) <= tol and feasible(k + 1, bk, sw2, counts2, gap2):
                seq[k] = bk
                gap, last1, sw, counts = gap2, bk, sw2, counts2
                placed = True
                break
        if not placed:
            return None
    return seq


def cia_exhaustive(q, dt, max_switches: int | None = None) -> np.ndarray:
    """Brute-force oracle over all 2^n sequences (n <= 20)."""
    rb = RelaxedBinary(q, dt)
    if rb.n > 20:
        raise ValueError("exhaustive search is limited to 20 intervals")
    best = None
    for bits in itertools.product((0, 1), repeat=rb.n):
        sw = _switch_count(bits)
        if max_switches is not None and sw > max_switches:
            continue
        dev = accumulated_deviation(rb.q, np.asarray(bits, dtype=float), rb.dt)
        key = (dev, sw, bits)
        if best is None or key < best:
            best = key
    if best is None:
        raise ValueError(f"no binary sequence satisfies max_switches={max_switches}")
    return np.asarray(best[2], dtype=int)
