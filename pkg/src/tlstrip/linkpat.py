"""Link patterns of the dense Temperley-Lieb loop model on an odd strip.

A link pattern on L sites (L odd) is a planar pairing of the sites
1..L drawn below a horizontal line, with exactly one site left
unpaired.  The unpaired strand runs off to infinity, so no arc may
span it; every pattern therefore splits into a noncrossing perfect
matching left of the defect and another one right of it.  There are
Catalan((L+1)/2) such patterns.

Text form uses one character per site, e.g. for L = 7 the pattern
pairing {1-4, 2-3, 6-7} with defect at site 5 reads ``(())|()``.

Temperley-Lieb generators e_i act on adjacent sites (i, i+1): they
always produce another link pattern, plus one closed loop when i and
i+1 were already paired with each other.  Gluing an upward pattern on
top of a downward one produces closed loops and a single open strand
through both defects; passage indicators of that strand are the raw
material for the left-passage observables in :mod:`tlstrip.observables`.

Sites are numbered 1..L in the public interface; arrays are 0-based
internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class LinkPattern:
    """Planar pairing of sites 1..L (L odd) with one unpaired site.

    ``pair`` holds 0-based partner indices; the unpaired site is its
    own partner.
    """

    pair: tuple[int, ...]

    def __post_init__(self):
        L = len(self.pair)
        if L % 2 == 0:
            raise ValueError("link patterns are defined for odd L only")
        # stack matching validates noncrossing arcs, the involution,
        # and that no arc spans the single defect, all in one pass
        defects = 0
        stack: list[int] = []
        for i, p in enumerate(self.pair):
            if not 0 <= p < L:
                raise ValueError("partner index out of range")
            if p == i:
                if stack:
                    raise ValueError("an arc may not span the unpaired site")
                defects += 1
            elif p > i:
                stack.append(i)
            else:
                if not stack or stack.pop() != p:
                    raise ValueError("crossing or inconsistent arcs")
                if self.pair[p] != i:
                    raise ValueError("pairing is not an involution")
        if stack or defects != 1:
            raise ValueError("exactly one site must be unpaired")

    @property
    def L(self) -> int:
        return len(self.pair)

    @property
    def unpaired(self) -> int:
        """1-based position of the defect site."""
        return next(i for i, p in enumerate(self.pair) if p == i) + 1

    def partner(self, j: int) -> int:
        """1-based partner of 1-based site j (j itself if unpaired)."""
        return self.pair[j - 1] + 1

    def __str__(self) -> str:
        out = []
        for i, p in enumerate(self.pair):
            out.append("|" if p == i else "(" if p > i else ")")
        return "".join(out)

    @staticmethod
    def from_string(s: str) -> "LinkPattern":
        """Parse the one-character-per-site text form."""
        pair = [-1] * len(s)
        stack: list[int] = []
        for i, c in enumerate(s):
            if c == "(":
                stack.append(i)
            elif c == ")":
                if not stack:
                    raise ValueError(f"unbalanced ')' at site {i + 1}")
                j = stack.pop()
                pair[i], pair[j] = j, i
            elif c == "|":
                pair[i] = i
            else:
                raise ValueError(f"bad character {c!r} in link pattern")
        if stack:
            raise ValueError("unbalanced '(' in link pattern")
        return LinkPattern(tuple(pair))


def _noncrossing_matchings(n: int) -> list[tuple[int, ...]]:
    """All noncrossing perfect matchings of 0..n-1 as partner tuples."""
    if n == 0:
        return [()]
    out = []
    # 0 pairs with an odd position k, splitting into two even blocks
    for k in range(1, n, 2):
        for inner in _noncrossing_matchings(k - 1):
            for outer in _noncrossing_matchings(n - k - 1):
                pair = [0] * n
                pair[0], pair[k] = k, 0
                for i, p in enumerate(inner):
                    pair[1 + i] = 1 + p
                for i, p in enumerate(outer):
                    pair[k + 1 + i] = k + 1 + p
                out.append(tuple(pair))
    return out


@lru_cache(maxsize=None)
def enumerate_link_patterns(L: int) -> tuple[LinkPattern, ...]:
    """All link patterns on L sites in canonical order.

    Canonical order is lexicographic on the 0-based pairing arrays,
    which puts the pattern with defect at site 1 and fully nested
    arcs adjacent blocks first for small L (e.g. L=3 gives
    ``|()`` before ``()|``).
    """
    if L % 2 == 0 or L < 1:
        raise ValueError("L must be a positive odd integer")
    pats = []
    for u in range(0, L, 2):
        for left in _noncrossing_matchings(u):
            for right in _noncrossing_matchings(L - 1 - u):
                pair = [0] * L
                pair[u] = u
                for i, p in enumerate(left):
                    pair[i] = p
                for i, p in enumerate(right):
                    pair[u + 1 + i] = u + 1 + p
                pats.append(LinkPattern(tuple(pair)))
    pats.sort(key=lambda p: p.pair)
    return tuple(pats)


@lru_cache(maxsize=None)
def pattern_index(L: int) -> dict[tuple[int, ...], int]:
    """Map pairing tuple -> dense index in canonical order."""
    return {p.pair: i for i, p in enumerate(enumerate_link_patterns(L))}


def apply_e(i: int, pat: LinkPattern) -> tuple[LinkPattern, int]:
    """Act with the TL generator e_i on sites (i, i+1), 1-based i.

    Returns (new pattern, number of closed loops), the loop count
    being 1 exactly when i and i+1 were paired with each other.
    """
    L = pat.L
    if not 1 <= i <= L - 1:
        raise ValueError(f"e_{i} undefined for L={L}")
    a, b = i - 1, i
    pair = list(pat.pair)
    pa, pb = pair[a], pair[b]
    if pa == b:
        return pat, 1
    # join a-b; the former partners of a and b link up with each other
    # (the defect migrates when one of them was the unpaired site)
    pair[a], pair[b] = b, a
    if pa == a:
        pair[pb] = pb
    elif pb == b:
        pair[pa] = pa
    else:
        pair[pa], pair[pb] = pb, pa
    return LinkPattern(tuple(pair)), 0


def rotate_pi(pat: LinkPattern) -> LinkPattern:
    """Rotate a pattern by half a turn: site j goes to L+1-j."""
    L = pat.L
    pair = [0] * L
    for i, p in enumerate(pat.pair):
        pair[L - 1 - i] = L - 1 - p
    return LinkPattern(tuple(pair))


@dataclass(frozen=True)
class GlueDiagram:
    """A downward pattern glued to an upward one along the site line.

    ``upper`` is the pattern as drawn above the line: its arcs join
    the very sites its pairing lists.  A coefficient vector indexed by
    downward patterns is matched to upper patterns through
    :func:`rotate_pi` by the callers.
    """

    lower: LinkPattern
    upper: LinkPattern

    def __post_init__(self):
        if self.lower.L != self.upper.L:
            raise ValueError("glued patterns must share the same width")

    def strands(self) -> tuple[list[int], list[list[int]]]:
        """Decompose into the open strand and the closed loops.

        Returns (open strand as an ordered 1-based site list from the
        lower defect to the upper defect, list of closed loops as
        1-based site lists).
        """
        lo, up = self.lower.pair, self.upper.pair
        L = self.lower.L
        seen = [False] * L
        # open strand: enter at the lower defect from below, then
        # alternate upper and lower arcs until the upper defect exits
        path = []
        cur = self.lower.unpaired - 1
        path.append(cur + 1)
        seen[cur] = True
        going_up = True
        while True:
            nxt = up[cur] if going_up else lo[cur]
            if nxt == cur:
                break
            cur = nxt
            path.append(cur + 1)
            seen[cur] = True
            going_up = not going_up
        loops = []
        for start in range(L):
            if seen[start]:
                continue
            loop = []
            cur = start
            going_up = True
            while not seen[cur]:
                seen[cur] = True
                loop.append(cur + 1)
                cur = up[cur] if going_up else lo[cur]
                going_up = not going_up
            loops.append(loop)
        return path, loops

    def n_closed_loops(self) -> int:
        return len(self.strands()[1])


def open_strand_sites(diagram: GlueDiagram) -> frozenset[int]:
    """1-based sites visited by the open strand of a glued diagram."""
    return frozenset(diagram.strands()[0])


def passes_site(lower: LinkPattern, upper: LinkPattern, j: int) -> bool:
    """Does the open strand of the glued diagram pass through site j?"""
    return j in open_strand_sites(GlueDiagram(lower, upper))
