"""Monte Carlo cross-check of the passage profiles.

Each face of a double row carries one percolation bond; the face tiling is
the bond bit XOR a checkerboard parity, because the strands separate an
occupied bond one way on one sublattice and the other way on the other.
At the isotropic point every bond is open with probability 1/2, so a strip
of height H double rows is just 2LH fair bits and the loop measure needs
no reweighting.  A sample is evolved bottom-up as a link state over the L top
ports (defect column = the open path's current end).  Crossing the marked
mid-height section is recorded per strand as an L-bit mask; gluing a row
merges strand masks by OR along the chase through the old state, so after
the top closure the mask sitting at the defect is exactly the set of
section edges the hull crosses.

The hull passes left of the half-integer point j+1/2 iff it crosses the
section an even number of times to the right of that point, so the
indicator is a popcount parity of the final mask.  P_{1/2} = 0 and
P_{L+1/2} = 1 come out exact, not just statistically.

Sample i always consumes counter positions [i*H, (i+1)*H) of a Philox
stream keyed by the seed (one 64-bit word per double row), which makes
results byte-identical for any chunking or thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .transfer import _row_diagram

_MAX_WIDTH = 8  # row tables are materialized, 4^L configs


@lru_cache(maxsize=None)
def row_table(L: int) -> np.ndarray:
    """External matchings of all 4^L double-row tile configs, (4^L, 2L).

    Entry [c, p] is the partner port of p (bottom ports 0..L-1, top
    L..2L-1) in the config whose tile k takes choice (c >> k) & 1.
    """
    if L > _MAX_WIDTH:
        raise ValueError(f"row table capped at L={_MAX_WIDTH}")
    table = np.empty((4**L, 2 * L), dtype=np.int8)
    for conf in range(4**L):
        match, _, _ = _row_diagram(L, [(conf >> i) & 1 for i in range(2 * L)])
        for p, q in match.items():
            table[conf, p] = q
    return table


def _initial_state(L: int, count: int):
    # '|()()...': defect in column 0, then nested-free arcs
    PP = np.empty((count, L), dtype=np.int8)
    PP[:, 0] = 0
    for a in range(1, L, 2):
        PP[:, a] = a + 1
        PP[:, a + 1] = a
    SM = np.zeros((count, L), dtype=np.uint32)
    return PP, SM


def _closing_pattern(L: int) -> np.ndarray:
    close = np.empty(L, dtype=np.int64)
    close[0] = 0
    for a in range(1, L, 2):
        close[a] = a + 1
        close[a + 1] = a
    return close


def _apply_row(PP, SM, rows):
    """Glue one double row (match arrays `rows`, (n, 2L)) onto each state."""
    n, L = PP.shape
    newPP = np.empty_like(PP)
    newSM = np.zeros_like(SM)
    for t in range(L):
        p = rows[:, L + t].astype(np.int64)
        acc = np.zeros(n, dtype=np.uint32)
        defect = np.zeros(n, dtype=bool)
        # each hop consumes one arc of the old state, so (L-1)/2+1 suffices
        for _ in range((L + 3) // 2):
            chase = np.flatnonzero(~defect & (p < L))
            if chase.size == 0:
                break
            x = p[chase]
            acc[chase] |= SM[chase, x]
            y = PP[chase, x]
            hit = y == x
            defect[chase[hit]] = True
            go = chase[~hit]
            p[go] = rows[go, y[~hit]]
        newPP[:, t] = np.where(defect, t, p - L)
        newSM[:, t] = acc
    return newPP, newSM


def _close_and_mask(PP, SM) -> np.ndarray:
    """Glue the fixed top closure; return the open path's section mask."""
    n, L = PP.shape
    close = _closing_pattern(L)
    x = np.zeros(n, dtype=np.int64)  # closure defect column
    acc = np.zeros(n, dtype=np.uint32)
    done = np.zeros(n, dtype=bool)
    for _ in range((L + 3) // 2):
        live = np.flatnonzero(~done)
        if live.size == 0:
            break
        xi = x[live]
        acc[live] |= SM[live, xi]
        y = PP[live, xi]
        hit = y == xi
        done[live[hit]] = True
        go = live[~hit]
        x[go] = close[y[~hit]]
    if not done.all():
        raise AssertionError("closure chase failed to terminate")
    return acc


def _bond_flip(L: int) -> np.uint64:
    # Tile choice = bond bit XOR face parity.  For odd L the faces of one
    # parity class sit exactly at the even bit positions of the 2L-bit row
    # word (bottom faces 0..L-1, top faces L..2L-1).
    return np.uint64(0x5555555555555555) & np.uint64(4**L - 1)


def _sample_configs(L, H, seed, start, count) -> np.ndarray:
    # One raw 64-bit word of bond bits per double row, low 2L bits kept.
    # Samples are padded to whole Philox blocks (4 words) so that advance()
    # lands exactly on sample boundaries for any chunk split.
    words = -(-H // 4) * 4
    bg = np.random.Philox(key=seed)
    bg.advance(start * (words // 4))
    raw = bg.random_raw(count * words).reshape(count, words)
    return (raw[:, :H] & np.uint64(4**L - 1)) ^ _bond_flip(L)


def section_masks(L, H, seed, start, count) -> np.ndarray:
    """Hull crossing masks of the mid-height section for `count` samples."""
    table = row_table(L)
    confs = _sample_configs(L, H, seed, start, count)
    PP, SM = _initial_state(L, count)
    bits = np.left_shift(np.uint32(1), np.arange(L, dtype=np.uint32))
    for r in range(H):
        PP, SM = _apply_row(PP, SM, table[confs[:, r]])
        if r + 1 == H // 2:
            SM = bits[None, :] | bits[PP]
    return _close_and_mask(PP, SM)


def _chunk_counts(L, H, seed, start, count) -> np.ndarray:
    fmask = section_masks(L, H, seed, start, count)
    counts = np.empty(L + 1, dtype=np.int64)
    for j in range(L + 1):
        parity = np.bitwise_count(fmask >> np.uint32(j)) & np.uint32(1)
        counts[j] = fmask.size - int(parity.sum())
    return counts


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    n_samples: int

    @classmethod
    def from_hits(cls, hits: int, n: int) -> "Estimate":
        p = hits / n
        var = p * (1.0 - p) * n / (n - 1) if n > 1 else 0.0
        return cls(p, math.sqrt(var / n), n)


@dataclass(frozen=True)
class PleftEstimates:
    """Empirical P_{j+1/2} (index j = 0..L) at the mid-height section."""

    L: int
    H: int
    n_samples: int
    seed: int
    p_half: tuple

    @property
    def x1(self) -> Estimate:
        # X_1 = P_{3/2} - P_{1/2} and P_{1/2} = 0
        return self.p_half[1]


def _thread_count(threads) -> int:
    if threads is None:
        threads = os.environ.get("TLSTRIP_THREADS")
    if threads is None:
        return min(os.cpu_count() or 1, 8)
    return max(1, int(threads))


def estimate_pleft(
    L: int,
    H=None,
    n_samples: int = 10**5,
    seed: int = 0,
    threads=None,
    chunk: int = 1 << 14,
) -> PleftEstimates:
    """Monte Carlo left-passage staircase; deterministic in (seed, L, H)."""
    if L % 2 == 0:
        raise ValueError("odd widths only")
    if n_samples < 1:
        raise ValueError("need at least one sample")
    if H is None:
        H = 8 * L
    if H < 2 or H % 2:
        raise ValueError("H must be even and >= 2")
    row_table(L)  # materialize once before threads race on the cache
    starts = list(range(0, n_samples, chunk))
    jobs = [(s, min(chunk, n_samples - s)) for s in starts]
    workers = min(_thread_count(threads), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(lambda sc: _chunk_counts(L, H, seed, sc[0], sc[1]), jobs)
            )
    else:
        parts = [_chunk_counts(L, H, seed, s, c) for s, c in jobs]
    counts = np.sum(parts, axis=0)
    ests = tuple(Estimate.from_hits(int(c), n_samples) for c in counts)
    return PleftEstimates(L, H, n_samples, seed, ests)


def sample_hull(L: int, H: int, seed: int, p: float = 0.5, index: int = 0):
    """Ordered hull walk of one sample: [(line, column), ...] crossings.

    Line r is the horizontal boundary below double row r (so line 0 is the
    bottom of the strip and line H the top); the walk starts at the bottom
    defect and ends at the top one.  With p = 0.5 the bond bits reproduce
    engine sample `index` of the same seed exactly; other p values open
    every bond independently, and the degenerate inputs p = 0 and p = 1
    give deterministic hulls that run up opposite walls of the strip.
    """
    if L % 2 == 0:
        raise ValueError("odd widths only")
    if p == 0.5:
        confs = _sample_configs(L, H, seed, index, 1)[0]
        rows = [
            [(int(c) >> i) & 1 for i in range(2 * L)] for c in confs
        ]
    else:
        gen = np.random.Generator(np.random.Philox(key=seed))
        gen.bit_generator.advance(index * H)
        rows = [
            [int(u < p) ^ ((i + 1) % 2) for i, u in enumerate(gen.random(2 * L))]
            for _ in range(H)
        ]
    matches = [_row_diagram(L, choices)[0] for choices in rows]
    bottom = _closing_pattern(L)  # same shape as the initial link state
    top = _closing_pattern(L)

    path = [(0, 0)]
    r, port = 0, 0  # entering row r from below at column `port`
    going_up = True
    for _ in range(2 * L * (H + 2) + 4):
        if going_up:
            q = matches[r][port]
        else:
            q = matches[r][port + L]
        if q >= L:  # leaves through the top of row r
            col = q - L
            if r == H - 1:
                path.append((H, col))
                if col == 0:  # top defect reached
                    return path
                port, going_up = int(top[col]), False
                path.append((H, port))
            else:
                r += 1
                path.append((r, col))
                port, going_up = col, True
        else:  # leaves through the bottom of row r
            if r == 0:
                path.append((0, q))
                if q == 0:
                    # walked back into the entry: defect only happens once
                    raise AssertionError("hull returned to the entry point")
                port = int(bottom[q])
                path.append((0, port))
                going_up = True
            else:
                r -= 1
                path.append((r + 1, q))
                port, going_up = q, False
    raise AssertionError("hull walk did not terminate")
