"""Left-passage observables of the critical dense loop model on odd strips.

An odd strip carries a single open path from the bottom edge off to
infinity.  With the ground state psi of the double-row transfer matrix
below and its reflection above, the probability X_j that the path
passes through site j of a horizontal section is a bilinear sum

    X_j = sum_{mu,a} psibar_mu psi_a n^{loops(a,mu)} [j on open strand]
        / sum_{mu,a} psibar_mu psi_a n^{loops(a,mu)},

where the indicator refers to the diagram obtained by gluing pattern mu
on top of pattern a.  Signed partial sums of X_j give the probability
P_{j+1/2} that the path passes to the left of the dual point j+1/2, and
every quantity here is a ratio, so the normalization of psi is free.

At q = exp(2i pi/3) everything collapses to integer combinatorics:
psi is a positive integer vector summing to csscpp_count(L+1), n = 1,
and the X_j Z^2 are integers.  Two boundary passage probabilities have
closed product/character forms (pb_formula, pbhat_formula), checked
against direct marked-wire contractions of the double row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import combinat
from .characters import symplectic_character
from .linkpat import GlueDiagram, LinkPattern, enumerate_link_patterns
from .transfer import (
    Q_PERCOLATION,
    W_ISOTROPIC,
    SpectralPoint,
    bracket,
    ground_state,
    ground_state_exact,
    ground_state_homogeneous,
    kfun,
    rotate_permutation,
    _row_diagram,
    edge_ports,
)

# ---------------------------------------------------------------------------
# glue tables


@lru_cache(maxsize=None)
def glue_table(L: int):
    """(loops, open-path site bitmask) for every (lower, upper) pattern pair.

    Index [a][m] corresponds to gluing pattern m (drawn mirrored) on top
    of pattern a; bit j-1 of the mask is set when the open strand passes
    site j.
    """
    pats = enumerate_link_patterns(L)
    table = []
    for a in pats:
        row = []
        for m in pats:
            d = GlueDiagram(a, m)
            path, closed = d.strands()
            mask = 0
            for s in path:
                mask |= 1 << (s - 1)
            row.append((len(closed), mask))
        table.append(row)
    return table


def bilinear_profile(L: int, psi, psibar, n=1):
    """Normalization and X_j from a state pair; exact if inputs are exact.

    Returns (norm, [X_1 Z.., X_L]) where the X are *unnormalized* sums,
    so X_j = x[j-1] / norm.
    """
    table = glue_table(L)
    norm = 0
    xs = [0] * L
    for a in range(len(table)):
        wa = psi[a]
        if wa == 0:
            continue
        row = table[a]
        for m in range(len(table)):
            wm = psibar[m]
            if wm == 0:
                continue
            loops, mask = row[m]
            w = wa * wm if n == 1 or loops == 0 else wa * wm * n**loops
            norm += w
            j = 0
            while mask:
                if mask & 1:
                    xs[j] += w
                mask >>= 1
                j += 1
    return norm, xs


@dataclass(frozen=True)
class PassageProfile:
    """Site passage probabilities X_j and the left-passage staircase.

    p_half[j] is P_{j+1/2} for j = 0..L (so p_half[0] = 0 at the free
    left edge and p_half[L] = 1 at the wired right edge is the full
    crossing), pbar[j-1] = (P_{j-1/2} + P_{j+1/2})/2 sits at the integer
    site j, and ptilde[j-1] = (-1)^{j-1} X_j / 2 is the staggered part.

    xhat[j] (j = 0..L+1) and y[j-1] (j = 1..L+1) are the mid-height and
    lower horizontal wire passage probabilities of one double row.  They
    need a marked-wire contraction over all tile configurations, so they
    are only filled in for small widths and stay None otherwise.
    """

    L: int
    x: tuple
    p_half: tuple
    pbar: tuple
    ptilde: tuple
    mode: str = "float"
    xhat: tuple | None = None
    y: tuple | None = None

    @classmethod
    def from_x(cls, x, mode: str = "float", xhat=None, y=None) -> "PassageProfile":
        L = len(x)
        p = [x[0] * 0]  # zero of the right exact/float type
        for j, xj in enumerate(x, start=1):
            p.append(p[-1] + (xj if j % 2 else -xj))
        pbar = tuple((p[j - 1] + p[j]) / 2 for j in range(1, L + 1))
        ptilde = tuple((x[j - 1] if j % 2 else -x[j - 1]) / 2 for j in range(1, L + 1))
        return cls(
            L,
            tuple(x),
            tuple(p),
            pbar,
            ptilde,
            mode,
            None if xhat is None else tuple(xhat),
            None if y is None else tuple(y),
        )


@lru_cache(maxsize=None)
def profile_exact(L: int):
    """Exact homogeneous profile: (Z, X Z^2 integers, profile of Fractions)."""
    psi = ground_state_exact(L)
    sigma = rotate_permutation(L)
    psibar = tuple(psi[sigma[m]] for m in range(len(psi)))
    norm, xs = bilinear_profile(L, psi, psibar, 1)
    Z = sum(psi)
    if norm != Z * Z:
        raise ArithmeticError("normalization is not Z^2 at the combinatorial point")
    x = [Fraction(v, norm) for v in xs]
    xh = yy = None
    if L <= 5:
        mx, xh, yy = marked_wire_profile_exact(L)
        if list(mx) != x:
            raise ArithmeticError("marked-wire X disagrees with glued-pattern X")
    prof = PassageProfile.from_x(x, "exact", xh, yy)
    return Z, tuple(xs), prof


def profile_float(point: SpectralPoint) -> PassageProfile:
    """Inhomogeneous profile from the transfer-matrix ground state.

    For real positive z the X_j are probabilities and are returned as
    real floats; at generic complex z they are analytic continuations
    and stay complex.
    """
    L = point.L
    psi = ground_state(point)
    sigma = rotate_permutation(L)
    psibar = ground_state(point.reversed())[sigma]
    norm, xs = bilinear_profile(L, psi, psibar, point.n)
    physical = all(abs(zj.imag) < 1e-13 and zj.real > 0 for zj in point.z)
    x = []
    for v in xs:
        r = v / norm
        if physical:
            if abs(r.imag) > 1e-9 * max(1.0, abs(r.real)):
                raise ArithmeticError(f"X_j came out non-real: {r}")
            r = r.real
        x.append(r)
    return PassageProfile.from_x(x)


def site_coordinate(j, L: int, offset: float = 0.25) -> float:
    """Continuum position of site j on the unit-width strip.

    The hull reflects off walls sitting a quarter cell outside the
    outermost strands, so the effective width is L + 1/2 and site j maps
    to (j - 1/4)/(L + 1/2).  The offset is a calibrated tunable: any
    value in roughly [0.05, 0.35] keeps the finite-size profiles
    converging monotonically onto the kappa=6 crossing curve, and 1/4
    minimizes the L <= 21 deviation.  Symmetric by construction:
    x(j) + x(L+1-j) = 1.
    """
    return (j - offset) / (L + 1 - 2 * offset)


def pleft_profile(
    L: int, z=None, w: complex = W_ISOTROPIC, method: str = "auto", Q=None
):
    """Left-passage profile; dispatches on width and arguments.

    method "exact" (homogeneous, Fractions), "loop" (transfer-matrix
    floats, any z), "xxz" (homogeneous floats via the spin-chain
    identity, scales to large L), or "auto".  Q defaults to percolation
    (Q = 1); other cluster weights are served by the homogeneous loop
    route with n = sqrt(Q).
    """
    homogeneous = z is None
    generic = Q is not None and abs(Q - 1.0) > 1e-12
    if generic:
        if not homogeneous:
            raise ValueError("generic-Q profiles are homogeneous only")
        from .transfer import ground_state_loop

        n = math.sqrt(Q)
        psi = ground_state_loop(L, n)
        sigma = rotate_permutation(L)
        norm, xs = bilinear_profile(L, psi, psi[sigma], n)
        return PassageProfile.from_x([float((v / norm).real) for v in xs])
    if method == "auto":
        if homogeneous and L <= 11:
            method = "exact"
        elif L <= 13:
            method = "loop"
        else:
            method = "xxz"
    if method == "exact":
        if not homogeneous:
            raise ValueError("exact profiles are homogeneous only")
        return profile_exact(L)[2]
    if method == "loop":
        if homogeneous:
            psi = ground_state_homogeneous(L)
            sigma = rotate_permutation(L)
            norm, xs = bilinear_profile(L, psi, psi[sigma], 1)
            return PassageProfile.from_x([v / norm for v in xs])
        return profile_float(SpectralPoint(complex(w), tuple(complex(x) for x in z)))
    if method == "xxz":
        if not homogeneous:
            raise ValueError("the spin-chain route is homogeneous only")
        from . import xxz

        return PassageProfile.from_x(xxz.site_passage_profile(L))
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# closed-form boundary passage probabilities
#
# P_b is the probability that the open path passes through the first
# site of a section: P_b = X_1.  Phat_b is the probability that it
# passes through the left closure arc of a double row, which is the
# mid-height wire at position 0 and does depend on w.


def pb_contract(point: SpectralPoint) -> complex:
    """P_b = X_1 by direct bilinear contraction of the ground state."""
    L = point.L
    psi = ground_state(point)
    sigma = rotate_permutation(L)
    psibar = ground_state(point.reversed())[sigma]
    norm, xs = bilinear_profile(L, psi, psibar, point.n)
    return xs[0] / norm


def pbhat_contract(point: SpectralPoint, states=None) -> complex:
    """Phat_b by marked-wire contraction of one double row (L <= 5)."""
    return marked_edge_passage(point, "mid", 0, states)


def _keep_width(x):
    """complex() cast that leaves clongdouble scalars untouched."""
    return x if isinstance(x, np.clongdouble) else complex(x)


def pb_formula(z, q: complex = Q_PERCOLATION) -> complex:
    """Left-boundary passage probability as a ratio of characters.

    P_b(z_1..z_L) = chi^(L-1)(z_2^2..z_L^2) chi^(L+1)(z_1^2, z_1^2, z_2^2..z_L^2)
                    / chi^(L)(z^2)^2,  independent of w.
    """
    if abs(complex(q) - Q_PERCOLATION) > 1e-12:
        raise ValueError("character form only holds at q = exp(2i pi/3)")
    zz = [_keep_width(x) ** 2 for x in z]
    num1 = symplectic_character(zz[1:]).value
    num2 = symplectic_character([zz[0]] + zz).value
    den = symplectic_character(zz).value
    return num1 * num2 / den**2


def pbhat_formula(w: complex, z, q: complex = Q_PERCOLATION) -> complex:
    """Right-boundary (U-turn) passage probability.

    Phat_b(w; z) = -[q][w^2] chi^(L+1)(w^2, z^2) chi^(L+1)((q/w)^2, z^2)
                   / ( prod_j k(1/w, z_j) chi^(L)(z^2)^2 ).
    """
    if abs(complex(q) - Q_PERCOLATION) > 1e-12:
        raise ValueError("character form only holds at q = exp(2i pi/3)")
    w = _keep_width(w)
    zz = [_keep_width(x) ** 2 for x in z]
    pref = -bracket(q) * bracket(w * w)
    for x in z:
        pref /= kfun(1 / w, _keep_width(x), q)
    num1 = symplectic_character([w * w] + zz).value
    num2 = symplectic_character([(q / w) ** 2] + zz).value
    den = symplectic_character(zz).value
    return pref * num1 * num2 / den**2


def pb_hom(L: int):
    """Exact homogeneous left-boundary passage, vsasm/csscpp products."""
    ex = combinat.combine_exponents(
        [("vsasm", L, 1), ("vsasm", L + 2, 1), ("csscpp", L + 1, -2)]
    )
    return combinat.exponents_to_fraction(ex)


def pbhat_hom(L: int):
    """Exact homogeneous U-turn passage at the isotropic point."""
    ex = combinat.combine_exponents(
        [("asm", L, 2), ("csscpp", L + 1, -2), ("vsasm", L, -2)]
    )
    ex[3] = ex.get(3, 0) + 1
    ex[2] = ex.get(2, 0) - 2 * L
    return combinat.exponents_to_fraction(ex)


def pb_hom_log(L: int) -> float:
    ex = combinat.combine_exponents(
        [("vsasm", L, 1), ("vsasm", L + 2, 1), ("csscpp", L + 1, -2)]
    )
    return combinat.exponents_to_log(ex)


def pbhat_hom_log(L: int) -> float:
    ex = combinat.combine_exponents(
        [("asm", L, 2), ("csscpp", L + 1, -2), ("vsasm", L, -2)]
    )
    ex[3] = ex.get(3, 0) + 1
    ex[2] = ex.get(2, 0) - 2 * L
    return combinat.exponents_to_log(ex)


# ---------------------------------------------------------------------------
# marked-wire contractions (brute force, small widths)


def _open_path_and_loops(match, alpha: LinkPattern, mu: LinkPattern, count_loops=True):
    """Open-path externals and closed-circuit count of a pattern/row/pattern
    sandwich; externals are row indices (bottom j-1, top L+j-1)."""
    L = alpha.L
    d0 = alpha.unpaired - 1
    path = {d0}
    cur = d0
    for _ in range(4 * L + 4):
        nxt = match[cur]
        path.add(nxt)
        if nxt >= L:
            t = nxt - L
            p = mu.pair[t]
            if p == t:
                break
            cur = L + p
        else:
            cur = alpha.pair[nxt]
        path.add(cur)
    else:
        raise RuntimeError("open-path walk failed to terminate")
    if not count_loops:
        return path, 0
    loops = 0
    seen = set()
    for s in range(2 * L):
        if s in path or s in seen:
            continue
        loops += 1
        cur = s
        while True:
            seen.add(cur)
            nxt = match[cur]
            seen.add(nxt)
            cur = alpha.pair[nxt] if nxt < L else L + mu.pair[nxt - L]
            if cur == s:
                break
    return path, loops


def marked_edge_passage(point: SpectralPoint, kind: str, j: int, states=None):
    """Probability that the open path crosses a given wire of one double row.

    kind "mid" (j = 0..L+1), "aux" (j = 1..L+1), or "site" (j = 1..L,
    the bottom external edge).  Enumerates all tile configurations, so
    it is limited to L <= 5.  ``states`` optionally supplies (psi,
    psibar) to reuse across calls.
    """
    L = point.L
    if L > 5:
        raise ValueError("marked-wire contraction is brute force, L <= 5 only")
    if kind == "site":
        wire = None
        if not 1 <= j <= L:
            raise ValueError("site index out of range")
    else:
        wire = edge_ports(L, kind, j)
    if states is None:
        sigma = rotate_permutation(L)
        psi = ground_state(point)
        psibar = ground_state(point.reversed())[sigma]
    else:
        psi, psibar = states
    pats = enumerate_link_patterns(L)
    cw = [point.face_weights(jj) for jj in range(1, L + 1)]
    n = point.n
    num = 0j
    den = 0j
    for conf in range(4**L):
        choices = [(conf >> i) & 1 for i in range(2 * L)]
        weight = 1.0 + 0j
        for jj in range(1, L + 1):
            wba, wbc, wta, wtc = cw[jj - 1]
            weight *= wbc if choices[jj - 1] else wba
            weight *= wtc if choices[L + jj - 1] else wta
        match, row_loops, owners = _row_diagram(L, choices)
        owner = None if wire is None else owners.get(wire)
        for a, alpha in enumerate(pats):
            if psi[a] == 0:
                continue
            for m, mu in enumerate(pats):
                wm = psi[a] * psibar[m]
                if wm == 0:
                    continue
                path, loops = _open_path_and_loops(match, alpha, mu)
                tot = row_loops + loops
                w = weight * wm * (n**tot if tot and n != 1 else 1)
                den += w
                if wire is None:
                    if (j - 1) in path:
                        num += w
                elif owner is not None and owner in path:
                    num += w
    return num / den


def _wire_sweep(L: int, weight_fn, psi, psibar, n):
    """Accumulate (den, X, Xhat, Y) sums over all 4^L tile configurations.

    Exactness follows the inputs: integer psi with weight_fn == 1 keeps
    everything in integers.
    """
    pats = enumerate_link_patterns(L)
    mids = [edge_ports(L, "mid", j) for j in range(L + 2)]
    auxs = [edge_ports(L, "aux", j) for j in range(1, L + 2)]
    pairs = []
    for a, wa in enumerate(psi):
        for m, wm in enumerate(psibar):
            wam = wa * wm
            if wam != 0:
                pairs.append((wam, pats[a], pats[m]))
    trivial_n = abs(n - 1) < 1e-12
    den = 0
    X = [0] * L
    Xhat = [0] * (L + 2)
    Y = [0] * (L + 1)
    for conf in range(4**L):
        choices = [(conf >> i) & 1 for i in range(2 * L)]
        weight = weight_fn(choices)
        match, row_loops, owners = _row_diagram(L, choices)
        mo = [owners.get(k) for k in mids]
        ao = [owners.get(k) for k in auxs]
        for wam, alpha, mu in pairs:
            path, loops = _open_path_and_loops(match, alpha, mu, not trivial_n)
            w = weight * wam
            if not trivial_n:
                tot = row_loops + loops
                if tot:
                    w = w * n**tot
            den += w
            for j in range(L):
                if j in path:
                    X[j] += w
            for j in range(L + 2):
                o = mo[j]
                if o is not None and o in path:
                    Xhat[j] += w
            for j in range(L + 1):
                o = ao[j]
                if o is not None and o in path:
                    Y[j] += w
    return den, X, Xhat, Y


def marked_wire_profile(point: SpectralPoint, states=None):
    """All wire passage probabilities of one double row in a single sweep.

    Returns (X, Xhat, Y) lists indexed as X_j for j = 1..L, Xhat_j for
    j = 0..L+1 and Y_j for j = 1..L+1.  Brute force over 4^L tile
    configurations, so L <= 5 only.
    """
    L = point.L
    if L > 5:
        raise ValueError("marked-wire contraction is brute force, L <= 5 only")
    if states is None:
        sigma = rotate_permutation(L)
        psi = ground_state(point)
        psibar = ground_state(point.reversed())[sigma]
    else:
        psi, psibar = states
    cw = [point.face_weights(jj) for jj in range(1, L + 1)]

    def weight_fn(choices):
        weight = 1.0 + 0j
        for jj in range(L):
            wba, wbc, wta, wtc = cw[jj]
            weight *= wbc if choices[jj] else wba
            weight *= wtc if choices[L + jj] else wta
        return weight

    den, X, Xhat, Y = _wire_sweep(L, weight_fn, psi, psibar, point.n)
    return (
        [v / den for v in X],
        [v / den for v in Xhat],
        [v / den for v in Y],
    )


@lru_cache(maxsize=None)
def marked_wire_profile_exact(L: int):
    """Exact (X, Xhat, Y) at the homogeneous isotropic point, L <= 5.

    Each of the 4L tile weights is exactly 1/2 there, so configurations
    count with unit weight against a denominator 4^L Z^2 and every entry
    is a Fraction.
    """
    if L > 5:
        raise ValueError("marked-wire contraction is brute force, L <= 5 only")
    psi = ground_state_exact(L)
    sigma = rotate_permutation(L)
    psibar = tuple(psi[sigma[m]] for m in range(len(psi)))
    den, X, Xhat, Y = _wire_sweep(L, lambda choices: 1, psi, psibar, 1)
    Z = sum(psi)
    if den != 4**L * Z * Z:
        raise ArithmeticError("weight-free sweep should normalize to 4^L Z^2")
    return (
        tuple(Fraction(v, den) for v in X),
        tuple(Fraction(v, den) for v in Xhat),
        tuple(Fraction(v, den) for v in Y),
    )


@lru_cache(maxsize=None)
def closure_passage_exact(L: int) -> Fraction:
    """Exact Xhat_0 at the homogeneous isotropic point for odd L <= 9.

    Same contraction as marked_wire_profile_exact but for the single
    left-closure wire, aggregated so it stays affordable beyond L = 5.
    All 4^L tile configurations carry unit weight and n = 1, so configs
    are grouped by (external matching, marked-strand owner); each class
    is composed with the lower pattern once, which leaves only a link
    pattern plus a marker position (dead, on the partial path, or on
    one of its arcs) to resolve against the upper pattern.
    """
    if L % 2 == 0 or L > 9:
        raise ValueError("closure contraction is tabulated for odd L <= 9")
    psi = ground_state_exact(L)
    sigma = rotate_permutation(L)
    psibar = tuple(psi[sigma[m]] for m in range(len(psi)))
    pats = enumerate_link_patterns(L)
    Z = sum(psi)
    wire0 = edge_ports(L, "mid", 0)

    classes: dict = {}
    for conf in range(4**L):
        choices = [(conf >> i) & 1 for i in range(2 * L)]
        match, _, owners = _row_diagram(L, choices)
        key = (tuple(match[i] for i in range(2 * L)), owners.get(wire0))
        classes[key] = classes.get(key, 0) + 1

    # stage 1: walk each class down through alpha, carrying the marker
    composed: dict = {}
    for (mt, owner), count in classes.items():
        for a, alpha in enumerate(pats):
            da = alpha.unpaired - 1
            top = [None] * L
            marker = "dead"
            for s in range(L):
                if top[s] is not None:
                    continue
                hit = owner is not None and owner in (L + s, mt[L + s])
                cur = mt[L + s]
                while cur < L and cur != da:
                    nxt = alpha.pair[cur]
                    if owner is not None and owner in (nxt, mt[nxt]):
                        hit = True
                    cur = mt[nxt]
                if cur == da:
                    top[s] = s
                    if hit:
                        marker = "path"
                else:
                    t = cur - L
                    top[s] = t
                    top[t] = s
                    if hit:
                        marker = (min(s, t), max(s, t))
            key2 = (tuple(top), marker)
            composed[key2] = composed.get(key2, 0) + count * psi[a]

    # stage 2: chase the open path through the upper pattern
    num = 0
    for (top, marker), weight in composed.items():
        if marker == "dead":
            continue
        if marker == "path":
            num += weight * Z
            continue
        d = next(s for s in range(L) if top[s] == s)
        for m, mu in enumerate(pats):
            cur = d
            onpath = False
            while mu.pair[cur] != cur:
                p = mu.pair[cur]
                q = top[p]
                if (min(p, q), max(p, q)) == marker:
                    onpath = True
                    break
                cur = q
            if onpath:
                num += weight * psibar[m]
    return Fraction(num, 4**L * Z * Z)


def conservation_residual(point: SpectralPoint, j: int) -> float:
    """|X_j + Xhat_j - Y_j - Y_{j+1}| for one double row, 1 <= j <= L."""
    sigma = rotate_permutation(point.L)
    psi = ground_state(point)
    psibar = ground_state(point.reversed())[sigma]
    st = (psi, psibar)
    lhs = marked_edge_passage(point, "site", j, st) + marked_edge_passage(
        point, "mid", j, st
    )
    rhs = marked_edge_passage(point, "aux", j, st) + marked_edge_passage(
        point, "aux", j + 1, st
    )
    return abs(lhs - rhs)


def conservation_residuals(point: SpectralPoint) -> float:
    """max_j |X_j + Xhat_j - Y_j - Y_{j+1}|, all sites in one sweep."""
    X, Xhat, Y = marked_wire_profile(point)
    return max(
        abs(X[j] + Xhat[j + 1] - Y[j] - Y[j + 1]) for j in range(point.L)
    )
