"""Double-row transfer matrix of the dense loop model on an odd strip.

Geometry.  One double row over a strip of odd width L consists of a
bottom row of faces B_1..B_L and a top row T_1..T_L.  Each face is a
square plaquette whose four ports are paired by one of two tiles,
{S-E, N-W} ("a") or {S-W, N-E} ("c").  The wiring is

    bottom external site j  --  (B_j, S)
    (B_j, N)  --  (T_j, S)
    (T_j, N)  --  top external site j
    (B_j, E)  --  (B_{j+1}, W)        (T_j, E) -- (T_{j+1}, W)
    (B_1, W)  --  (T_1, W)            left closure
    (B_L, E)  --  (T_L, E)            right U-turn

so a configuration of tiles maps a link pattern on the bottom edge to
one on the top edge, with every closed loop weighted n.  With spectral
parameter w for the row and z_j for column j, the tile weights are, up
to one overall denominator k(1/w, z_j) = [q w/z_j][q w z_j] per column,

    B_j:  a -> [q z_j / w]      c -> [z_j / w]
    T_j:  a -> [1 / (w z_j)]    c -> [q / (w z_j)]

with [x] = x - 1/x.  At q = exp(2i pi/3) the normalized weights of the
two tiles of any face sum to 1 for every w and z, so the transfer
matrix is column-stochastic and 1 is always an eigenvalue.  At the
isotropic point w = exp(-i pi/6), z_j = 1 all four normalized weights
equal 1/2, and 4^L times the transfer matrix literally counts tile
configurations.

The matrix is built by threading a frontier across the double row one
column at a time.  The frontier is a constant-length planar state of
L+2 stubs: emitted top sites, the dangling top and bottom horizontal
wires, and the not-yet-consumed bottom sites.  An "a" tile only renames
stubs; a "c" tile fuses two adjacent stubs and opens a fresh arc, which
is where loops can close.  A brute-force enumeration of all 4^L tile
configurations doubles as an independent oracle for small L.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .linkpat import LinkPattern, apply_e, enumerate_link_patterns, pattern_index, rotate_pi

Q_PERCOLATION = cmath.exp(2j * cmath.pi / 3)
W_ISOTROPIC = cmath.exp(-1j * cmath.pi / 6)


def bracket(z: complex) -> complex:
    return z - 1 / z


def kfun(a: complex, b: complex, q: complex = Q_PERCOLATION) -> complex:
    """k(a, b) = [q b/a] [q/(a b)], the two-variable pole factor."""
    return bracket(q * b / a) * bracket(q / (a * b))


def loop_weight(q: complex) -> complex:
    return -(q + 1 / q)


def rmatrix_coeffs(x: complex, q: complex = Q_PERCOLATION):
    """(a, b) with Rhat(x) = a*1 + b*e, a = [q/x]/[qx], b = -[x]/[qx]."""
    d = bracket(q * x)
    if abs(d) < 1e-14:
        raise ZeroDivisionError("R-matrix pole: [q x] = 0")
    return bracket(q / x) / d, -bracket(x) / d


@dataclass(frozen=True)
class SpectralPoint:
    """Width, row parameter w, column parameters z, and deformation q."""

    w: complex
    z: tuple
    q: complex = Q_PERCOLATION

    @classmethod
    def percolation(cls, L: int, w: complex = W_ISOTROPIC, z=None) -> "SpectralPoint":
        if z is None:
            z = (1.0,) * L
        return cls(complex(w), tuple(complex(x) for x in z), Q_PERCOLATION)

    @property
    def L(self) -> int:
        return len(self.z)

    @property
    def n(self) -> complex:
        return loop_weight(self.q)

    def face_weights(self, j: int):
        """Normalized tile weights (bot_a, bot_c, top_a, top_c) of column j."""
        w, zj, q = self.w, self.z[j - 1], self.q
        db = bracket(q * w / zj)
        dt = bracket(q * w * zj)
        if min(abs(db), abs(dt)) < 1e-13:
            raise ZeroDivisionError(f"transfer matrix pole at column {j}")
        return (
            bracket(q * zj / w) / db,
            bracket(zj / w) / db,
            bracket(1 / (w * zj)) / dt,
            bracket(q / (w * zj)) / dt,
        )

    def reversed(self) -> "SpectralPoint":
        return SpectralPoint(self.w, self.z[::-1], self.q)


# ---------------------------------------------------------------------------
# frontier threading

# A frontier is a tuple p of length L+2 with p[s] the partner slot of
# stub s, and p[s] == s marking the open strand's loose end.  Before
# column j (1-based): slots 0..j-2 hold emitted top sites, slot j-1 the
# top wire, slot j the bottom wire, slots j+1..L+1 the remaining bottom
# sites.  Both wires start out paired with each other (left closure).


def _fuse(p: list, x: int, y: int) -> int:
    """Connect stubs x and y in place; returns 1 if that closed a loop."""
    px, py = p[x], p[y]
    if px == y:
        return 1
    if px == x:
        p[py] = py
    elif py == y:
        p[px] = px
    else:
        p[px], p[py] = py, px
    return 0


def _initial_frontier(pat: LinkPattern) -> tuple:
    p = [1, 0] + [q + 2 for q in pat.pair]
    return tuple(p)


def _thread_states(states: dict, L: int, column_weights, n: complex) -> dict:
    """Push a dict {frontier: weight} through all 2L faces of a double row."""
    use_n = n != 1
    for j in range(1, L + 1):
        wba, wbc, wta, wtc = column_weights[j - 1]
        ti, bi, si = j - 1, j, j + 1
        out: dict = {}
        for p, wt in states.items():
            for bot_c in (False, True):
                if bot_c:
                    lb = list(p)
                    w1 = wt * wbc
                    if _fuse(lb, bi, si) and use_n:
                        w1 = w1 * n
                    lb[bi], lb[si] = si, bi
                    lb = tuple(lb)
                else:
                    lb, w1 = p, wt * wba
                for top_c in (False, True):
                    if top_c:
                        lt = list(lb)
                        w2 = w1 * wtc
                        if _fuse(lt, bi, ti) and use_n:
                            w2 = w2 * n
                        lt[ti], lt[bi] = bi, ti
                        key = tuple(lt)
                    else:
                        key, w2 = lb, w1 * wta
                    out[key] = out.get(key, 0) + w2
        states = out
    # close the right U-turn
    final: dict = {}
    for p, wt in states.items():
        lst = list(p)
        nl = _fuse(lst, L, L + 1)
        if use_n and nl:
            wt = wt * n
        key = tuple(lst[:L])
        final[key] = final.get(key, 0) + wt
    return final


def _column_weights(point: SpectralPoint):
    return [point.face_weights(j) for j in range(1, point.L + 1)]


def transfer_matrix(point: SpectralPoint) -> np.ndarray:
    """Dense transfer matrix T[beta, alpha] by per-source threading."""
    L = point.L
    pats = enumerate_link_patterns(L)
    idx = pattern_index(L)
    cw = _column_weights(point)
    C = len(pats)
    T = np.zeros((C, C), dtype=complex)
    for a, pat in enumerate(pats):
        fin = _thread_states({_initial_frontier(pat): 1.0 + 0j}, L, cw, point.n)
        for key, wt in fin.items():
            T[idx[key], a] += wt
    return T


def transfer_matrix_exact(L: int):
    """4^L times the isotropic percolation transfer matrix, as exact ints.

    Every tile weight is 1 (the common factor (1/2)^{2L} is pulled out),
    so entry [beta][alpha] counts tile configurations mapping alpha to
    beta.  Columns sum to 4^L.
    """
    pats = enumerate_link_patterns(L)
    idx = pattern_index(L)
    cw = [(1, 1, 1, 1)] * L
    C = len(pats)
    M = [[0] * C for _ in range(C)]
    for a, pat in enumerate(pats):
        fin = _thread_states({_initial_frontier(pat): 1}, L, cw, 1)
        for key, wt in fin.items():
            M[idx[key]][a] += wt
    return M


def transfer_apply(point: SpectralPoint, vec) -> np.ndarray:
    """T @ vec without forming T, threading all sources as one bundle."""
    L = point.L
    pats = enumerate_link_patterns(L)
    idx = pattern_index(L)
    states = {}
    for a, pat in enumerate(pats):
        x = complex(vec[a])
        if x != 0:
            states[_initial_frontier(pat)] = x
    fin = _thread_states(states, L, _column_weights(point), point.n)
    out = np.zeros(len(pats), dtype=complex)
    for key, wt in fin.items():
        out[idx[key]] += wt
    return out


# ---------------------------------------------------------------------------
# extended precision
#
# Brute-force wire contractions at complex spectral points hit severe
# cancellation (the glued normalization sits near partition-function
# zeros for a fair share of random unimodular draws), and double
# precision then loses eight or more digits.  The threading code is
# dtype-generic, so rerunning it on 80-bit scalars restores them.

_PI_HP = np.longdouble("3.14159265358979323846264338327950288")
Q_PERCOLATION_HP = np.exp(np.clongdouble(2j) * _PI_HP / 3)


def hp_point(point: SpectralPoint) -> SpectralPoint:
    """Recast a spectral point onto np.clongdouble scalars.

    Only the pure-arithmetic paths (face weights, threading, brute
    contractions, character determinants) accept the result; anything
    LAPACK-backed does not.  A q within 1e-14 of the percolation value
    is snapped to the extended-precision root of unity.
    """
    q = (
        Q_PERCOLATION_HP
        if abs(complex(point.q) - Q_PERCOLATION) < 1e-14
        else np.clongdouble(point.q)
    )
    return SpectralPoint(
        np.clongdouble(point.w), tuple(np.clongdouble(x) for x in point.z), q
    )


def transfer_matrix_hp(point: SpectralPoint) -> np.ndarray:
    """transfer_matrix on clongdouble scalars."""
    L = point.L
    pats = enumerate_link_patterns(L)
    idx = pattern_index(L)
    cw = _column_weights(point)
    C = len(pats)
    T = np.zeros((C, C), dtype=np.clongdouble)
    one = np.clongdouble(1.0)
    for a, pat in enumerate(pats):
        fin = _thread_states({_initial_frontier(pat): one}, L, cw, point.n)
        for key, wt in fin.items():
            T[idx[key], a] += wt
    return T


def _solve_hp(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting for clongdouble systems.

    LAPACK has no 80-bit kernels; the systems here are tiny (pattern
    count times pattern count), so an explicit elimination is fine.  A
    vanishing pivot is floored rather than raised: the one caller is
    inverse iteration, which feeds deliberately singular matrices.
    """
    A = A.astype(np.clongdouble).copy()
    b = b.astype(np.clongdouble).copy()
    m = len(b)
    for k in range(m):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if p != k:
            A[[k, p]] = A[[p, k]]
            b[[k, p]] = b[[p, k]]
        piv = A[k, k]
        if abs(piv) < 1e-300:
            piv = np.clongdouble(1e-300)
            A[k, k] = piv
        for i in range(k + 1, m):
            f = A[i, k] / piv
            if f != 0:
                A[i, k + 1 :] -= f * A[k, k + 1 :]
                b[i] -= f * b[k]
    x = np.zeros(m, dtype=np.clongdouble)
    for k in range(m - 1, -1, -1):
        x[k] = (b[k] - A[k, k + 1 :] @ x[k + 1 :]) / A[k, k]
    return x


# w values spread away from the unit circle and from each other; the
# ground state is w-independent, so any of them may serve as the solve
# parameter, and at least one sits far from the [q w / z_j] pole lines.
_AUX_W = (
    0.83 * cmath.exp(0.37j),
    1.31 * cmath.exp(-0.83j),
    0.51 * cmath.exp(2.2j),
    1.709 * cmath.exp(1.03j),
)


def ground_state_hp(point: SpectralPoint, refine: int = 3) -> np.ndarray:
    """Extended-precision eigenvalue-1 eigenvector at percolation.

    Seeds with the double-precision SVD vector and polishes by inverse
    iteration on the clongdouble transfer matrix.  The supplied w may
    sit near a pole of the face weights, which inflates both matrix
    norm and residual, so auxiliary w values are tried until the
    iteration converges to near-eps quality.
    """
    if not isinstance(point.w, np.clongdouble):
        point = hp_point(point)
    best = None
    for wcand in (complex(point.w),) + _AUX_W:
        try:
            pt64 = SpectralPoint(
                wcand, tuple(complex(x) for x in point.z), complex(point.q)
            )
            x = ground_state(pt64).astype(np.clongdouble)
            pth = SpectralPoint(np.clongdouble(wcand), point.z, point.q)
            T = transfer_matrix_hp(pth)
        except (ZeroDivisionError, ArithmeticError):
            continue
        A = T - np.eye(len(x), dtype=np.clongdouble)
        for _ in range(refine):
            x = _solve_hp(A, x)
            x = x / np.abs(x).max()
        resid = float(np.abs(T @ x - x).max())
        if best is None or resid < best[0]:
            best = (resid, x)
        if resid <= 5e-15:
            break
    if best is None:
        raise ArithmeticError("every solve parameter sat on a pole")
    resid, x = best
    if resid > 1e-12:
        raise ArithmeticError(f"inverse iteration stalled at residual {resid:.2e}")
    return x


# ---------------------------------------------------------------------------
# brute-force oracle

_TILE_A, _TILE_C = 0, 1


def _bport(L, j, port):
    return 4 * (j - 1) + "SWNE".index(port)


def _tport(L, j, port):
    return 4 * L + 4 * (j - 1) + "SWNE".index(port)


def edge_ports(L: int, kind: str, j: int) -> frozenset:
    """Port pair of a measurable wire of the double row.

    kind "mid": j = 0 is the left closure, j = 1..L the vertical wire
    between B_j and T_j, j = L+1 the right U-turn.  kind "aux": the
    bottom-row horizontal wires at x = j - 1/2 for j = 1..L+1; the two
    boundary ones coincide with mid 0 and mid L+1.
    """
    if kind == "mid":
        if j == 0:
            return frozenset({_bport(L, 1, "W"), _tport(L, 1, "W")})
        if j == L + 1:
            return frozenset({_bport(L, L, "E"), _tport(L, L, "E")})
        if 1 <= j <= L:
            return frozenset({_bport(L, j, "N"), _tport(L, j, "S")})
    elif kind == "aux":
        if j == 1:
            return edge_ports(L, "mid", 0)
        if j == L + 1:
            return edge_ports(L, "mid", L + 1)
        if 2 <= j <= L:
            return frozenset({_bport(L, j - 1, "E"), _bport(L, j, "W")})
    raise ValueError(f"no wire ({kind}, {j}) at width {L}")


def _row_diagram(L: int, choices):
    """External matching, loop count and wire ownership of one tile config.

    Ports are numbered 0..4L-1 as (B_j: S,W,N,E) = 4(j-1)+(0..3) for the
    bottom row read left to right; top-row ports get 4L + the same
    layout.  Returns (match, loops, owners) where match pairs the 2L
    externals (bottom site j -> index j-1, top site j -> index L+j-1)
    and owners maps each wire crossed by an external strand to one of
    that strand's external indices.
    """
    def b(j, port):
        return _bport(L, j, port)

    def t(j, port):
        return _tport(L, j, port)

    wire = {}

    def link(u, v):
        wire[u] = v
        wire[v] = u

    ext = {}
    for j in range(1, L + 1):
        ext[b(j, "S")] = j - 1
        ext[t(j, "N")] = L + j - 1
        link(b(j, "N"), t(j, "S"))
        if j < L:
            link(b(j, "E"), b(j + 1, "W"))
            link(t(j, "E"), t(j + 1, "W"))
    link(b(1, "W"), t(1, "W"))
    link(b(L, "E"), t(L, "E"))

    tile = {}
    for j in range(1, L + 1):
        for face, choice in ((b, choices[j - 1]), (t, choices[L + j - 1])):
            if choice == _TILE_A:
                tile[face(j, "S")] = face(j, "E")
                tile[face(j, "E")] = face(j, "S")
                tile[face(j, "N")] = face(j, "W")
                tile[face(j, "W")] = face(j, "N")
            else:
                tile[face(j, "S")] = face(j, "W")
                tile[face(j, "W")] = face(j, "S")
                tile[face(j, "N")] = face(j, "E")
                tile[face(j, "E")] = face(j, "N")

    seen = set()
    match = {}
    owners = {}
    for start, es in ext.items():
        if start in seen:
            continue
        cur = start
        seen.add(cur)
        while True:
            cur = tile[cur]
            seen.add(cur)
            if cur in ext:
                match[es] = ext[cur]
                match[ext[cur]] = es
                break
            owners[frozenset({cur, wire[cur]})] = es
            cur = wire[cur]
            seen.add(cur)
    loops = 0
    for start in tile:
        if start in seen:
            continue
        loops += 1
        cur = start
        while True:
            seen.add(cur)
            nxt = tile[cur]
            seen.add(nxt)
            cur = wire[nxt]
            if cur == start:
                break
    return match, loops, owners


def transfer_matrix_brute(point: SpectralPoint) -> np.ndarray:
    """Independent 4^L enumeration of the double row; L <= 5 only."""
    L = point.L
    if L > 5:
        raise ValueError("brute-force oracle is limited to L <= 5")
    pats = enumerate_link_patterns(L)
    idx = pattern_index(L)
    cw = _column_weights(point)
    C = len(pats)
    T = np.zeros((C, C), dtype=complex)
    n = point.n
    for conf in range(4**L):
        choices = [(conf >> i) & 1 for i in range(2 * L)]
        weight = 1.0 + 0j
        for j in range(1, L + 1):
            wba, wbc, wta, wtc = cw[j - 1]
            weight *= wbc if choices[j - 1] else wba
            weight *= wtc if choices[L + j - 1] else wta
        match, row_loops, _ = _row_diagram(L, choices)
        for a, pat in enumerate(pats):
            beta, loops = _glue_row(match, row_loops, pat)
            T[idx[beta.pair], a] += weight * n**loops
    return T


def _glue_row(match, row_loops, pat: LinkPattern):
    """Compose a row's external matching with a bottom pattern.

    Walks alternate between the row matching (bottom indices 0..L-1, top
    L..2L-1) and the pattern's arcs.  Closed circuits that stay below
    the top edge are loops.
    """
    L = pat.L
    top_partner = [None] * L
    used = [False] * L  # bottom externals consumed by some walk
    for s in range(L):
        if top_partner[s] is not None:
            continue
        cur = match[L + s]
        while cur < L:
            used[cur] = True
            nxt = pat.pair[cur]
            if nxt == cur:  # reached the defect: open end
                cur = -1 - s
                break
            used[nxt] = True
            cur = match[nxt]
        if cur >= L:
            top_partner[s] = cur - L
            top_partner[cur - L] = s
        else:
            top_partner[s] = s
    loops = row_loops
    for i in range(L):
        if used[i] or pat.pair[i] == i or i > pat.pair[i]:
            continue
        # untouched bottom arc: follow until the circuit closes
        start, cur = i, i
        while True:
            used[cur] = True
            nxt = pat.pair[cur]
            used[nxt] = True
            cur = match[nxt]
            if cur == start:
                loops += 1
                break
    return LinkPattern(tuple(top_partner)), loops


# ---------------------------------------------------------------------------
# exact ground state at the combinatorial point

def tl_matrix(L: int, i: int, n: complex = 1.0) -> np.ndarray:
    """Dense matrix of the generator e_i on the link-pattern basis."""
    pats = enumerate_link_patterns(L)
    idx = pattern_index(L)
    M = np.zeros((len(pats), len(pats)), dtype=complex)
    for a, pat in enumerate(pats):
        out, loops = apply_e(i, pat)
        M[idx[out.pair], a] += n**loops
    return M


def rhat_matrix(L: int, i: int, x: complex, q: complex = Q_PERCOLATION) -> np.ndarray:
    a, b = rmatrix_coeffs(x, q)
    return a * np.eye(len(enumerate_link_patterns(L))) + b * tl_matrix(L, i, loop_weight(q))


def hamiltonian_exact(L: int):
    """Integer matrix of sum_i e_i at n = 1; columns sum to L-1."""
    pats = enumerate_link_patterns(L)
    idx = pattern_index(L)
    C = len(pats)
    H = [[0] * C for _ in range(C)]
    for a, pat in enumerate(pats):
        for i in range(1, L):
            out, _ = apply_e(i, pat)
            H[idx[out.pair]][a] += 1
    return H


def _integer_kernel(M):
    """Kernel vector of an integer matrix with nullity 1, via Bareiss."""
    C = len(M)
    A = [row[:] for row in M]
    piv_rows, piv_cols = [], []
    prev = 1
    r = 0
    for c in range(C):
        p = next((i for i in range(r, C) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(r + 1, C):
            for jj in range(c + 1, C):
                A[i][jj] = (A[i][jj] * A[r][c] - A[i][c] * A[r][jj]) // prev
            A[i][c] = 0
        prev = A[r][c]
        piv_rows.append(r)
        piv_cols.append(c)
        r += 1
        if r == C:
            break
    free = [c for c in range(C) if c not in piv_cols]
    if len(free) != 1:
        raise ArithmeticError(f"kernel dimension is {len(free)}, expected 1")
    x = [Fraction(0)] * C
    x[free[0]] = Fraction(1)
    for rr in range(len(piv_cols) - 1, -1, -1):
        c = piv_cols[rr]
        s = sum(Fraction(A[rr][cc]) * x[cc] for cc in range(c + 1, C))
        x[c] = -s / A[rr][c]
    lcm = 1
    for v in x:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in x]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    ints = [v // g for v in ints]
    if sum(ints) < 0:
        ints = [-v for v in ints]
    return ints


def ground_state_exact(L: int) -> tuple:
    """Perron vector of sum_i e_i at n = 1, as coprime positive integers.

    This is the common ground state of the whole commuting family at the
    homogeneous point, so it also satisfies T psi = 4^L psi for the
    integer transfer matrix of transfer_matrix_exact.
    """
    H = hamiltonian_exact(L)
    for i in range(len(H)):
        H[i][i] -= L - 1
    psi = _integer_kernel(H)
    if any(v <= 0 for v in psi):
        raise ArithmeticError("kernel vector is not strictly positive")
    return tuple(psi)


# ---------------------------------------------------------------------------
# float ground states

def ground_state(point: SpectralPoint) -> np.ndarray:
    """Eigenvalue-1 eigenvector of T(point), unit-normalized.

    The transfer matrix is column-stochastic at q = exp(2i pi/3) for any
    (w, z), so the eigenvalue is exactly 1; the vector is found as the
    null space of T - 1 and is w-independent.
    """
    T = transfer_matrix(point)
    C = T.shape[0]
    _, s, vh = np.linalg.svd(T - np.eye(C))
    if s[-1] > 1e-8 * max(1.0, s[0]):
        raise ArithmeticError(f"no eigenvalue-1 eigenvector: smallest sv {s[-1]:.2e}")
    # the null direction is trustworthy as long as it is isolated; s[-2]
    # near the achieved floor s[-1] is what actual degeneracy looks like
    if C > 1 and s[-2] < 1e3 * s[-1]:
        raise ArithmeticError("eigenvalue 1 appears degenerate")
    psi = vh[-1].conj()
    # fix the overall phase: make the largest component real positive
    k = int(np.argmax(np.abs(psi)))
    psi = psi * (abs(psi[k]) / psi[k])
    return psi


def ground_state_homogeneous(L: int) -> np.ndarray:
    """Float Perron vector of sum_i e_i, normalized to sum 1.

    Power iteration on the sparse nonnegative Hamiltonian; the Perron
    value is exactly L-1 (constant column sums), which gives a cheap
    convergence certificate.
    """
    from scipy import sparse

    pats = enumerate_link_patterns(L)
    idx = pattern_index(L)
    C = len(pats)
    rows, cols = [], []
    for a, pat in enumerate(pats):
        for i in range(1, L):
            out, _ = apply_e(i, pat)
            rows.append(idx[out.pair])
            cols.append(a)
    H = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(C, C))
    x = np.full(C, 1.0 / C)
    lam = float(L - 1)
    for _ in range(100000):
        y = H @ x
        y /= y.sum()
        if np.abs(y - x).max() < 1e-16:
            x = y
            break
        x = y
    if np.abs(H @ x - lam * x).max() > 1e-10 * lam:
        raise ArithmeticError("power iteration did not converge")
    return x


def ground_state_loop(L: int, n) -> np.ndarray:
    """Dominant eigenvector of sum_i e_i at generic loop weight n.

    Dense solve (the pattern space is small for the widths this serves);
    for n >= 1 the matrix is nonnegative and the Perron vector is
    returned with positive entries summing to one.
    """
    pats = enumerate_link_patterns(L)
    idx = pattern_index(L)
    C = len(pats)
    H = np.zeros((C, C), dtype=complex if isinstance(n, complex) else float)
    for a, pat in enumerate(pats):
        for i in range(1, L):
            out, closed = apply_e(i, pat)
            H[idx[out.pair], a] += n**closed
    vals, vecs = np.linalg.eig(H)
    k = int(np.argmax(vals.real))
    order = np.argsort(vals.real)
    if C > 1 and vals.real[order[-1]] - vals.real[order[-2]] < 1e-10:
        raise ArithmeticError("dominant loop eigenvalue appears degenerate")
    psi = vecs[:, k]
    resid = np.abs(H @ psi - vals[k] * psi).max()
    if resid > 1e-9 * max(1.0, abs(vals[k])):
        raise ArithmeticError(f"loop eigenvector residual {resid:.2e}")
    if not isinstance(n, complex):
        if np.abs(psi.imag).max() > 1e-9:
            raise ArithmeticError("Perron vector came out non-real")
        psi = psi.real
        psi = psi * np.sign(psi[np.argmax(np.abs(psi))])
        if np.any(psi <= 0):
            raise ArithmeticError("Perron vector is not strictly positive")
        psi = psi / psi.sum()
    return psi


def rotate_permutation(L: int) -> np.ndarray:
    """Index permutation sigma with sigma[index(mu)] = index(rotate_pi(mu))."""
    pats = enumerate_link_patterns(L)
    idx = pattern_index(L)
    return np.array([idx[rotate_pi(p).pair] for p in pats])


def arc_insertion(L: int, i: int) -> np.ndarray:
    """0/1 matrix of the embedding C_{L-2} -> C_L adding a little arc (i, i+1)."""
    if not (1 <= i <= L - 1):
        raise ValueError("need 1 <= i <= L-1")
    small = enumerate_link_patterns(L - 2)
    idx = pattern_index(L)
    M = np.zeros((len(enumerate_link_patterns(L)), len(small)))
    for a, pat in enumerate(small):
        pair = [None] * L
        pair[i - 1], pair[i] = i, i - 1

        def lift(s):
            return s if s < i - 1 else s + 2

        for s in range(L - 2):
            pair[lift(s)] = lift(pat.pair[s])
        M[idx[tuple(pair)], a] = 1.0
    return M
