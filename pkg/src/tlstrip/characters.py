"""Symplectic characters with confluent (repeated-argument) evaluation.

The central object is the sp(2L) character of staircase shape
lambda_j = floor((L-j)/2), evaluated as a ratio of determinants

    chi_lambda(u_1..u_L) = det[ u_i^{mu_j} - u_i^{-mu_j} ]
                         / det[ u_i^{delta_j} - u_i^{-delta_j} ],

with delta_j = L-j+1 and mu_j = lambda_j + delta_j.  The applications
here routinely evaluate chi at coincident arguments (homogeneous limits,
doubled spectral parameters), where both determinants vanish; writing
u = v e^t and differentiating along t turns a multiplicity-c cluster
into rows

    r_k(m) = m^k (v^m - (-1)^k v^{-m}),

taken at orders k = 0..c-1 for generic v.  At v = +1 or -1 every
even-order row vanishes identically, so the cluster contributes the odd
orders 1, 3, .., 2c-1 instead.  Identical row operations hit numerator
and denominator, so the ratio is the honest limit of chi.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import combinat

Q_PERCOLATION = cmath.exp(2j * cmath.pi / 3)


@dataclass(frozen=True)
class CharacterValue:
    """Character evaluation plus a crude relative-error estimate."""

    value: complex
    cond: float

    def __complex__(self) -> complex:
        return complex(self.value)

    @property
    def real_checked(self) -> float:
        v = complex(self.value)
        if abs(v.imag) > 1e-6 * max(1.0, abs(v.real)):
            raise ValueError(f"character value {v} is not numerically real")
        return v.real


def staircase(L: int) -> tuple:
    return tuple((L - j) // 2 for j in range(1, L + 1))


def _cluster(args, tol: float):
    """Group numerically coincident arguments; returns [(value, mult)].

    clongdouble arguments are kept at full width so the determinant
    route below can run in extended precision.
    """
    clusters: list = []
    for a in args:
        if not isinstance(a, np.clongdouble):
            a = complex(a)
        for idx, (v, c) in enumerate(clusters):
            if abs(a - v) <= tol * max(1.0, abs(v)):
                clusters[idx] = (v, c + 1)
                break
        else:
            clusters.append((a, 1))
    return clusters


def _det_gauss(M: np.ndarray):
    """Determinant by partial-pivot elimination, any complex dtype."""
    A = M.copy()
    m = len(A)
    det = A.dtype.type(1.0)
    for k in range(m):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if p != k:
            A[[k, p]] = A[[p, k]]
            det = -det
        piv = A[k, k]
        if piv == 0:
            return A.dtype.type(0.0)
        det *= piv
        for i in range(k + 1, m):
            f = A[i, k] / piv
            if f != 0:
                A[i, k + 1 :] -= f * A[k, k + 1 :]
    return det


def _det_ratio(clusters, mu, delta):
    hp = any(isinstance(v, np.clongdouble) for v, _ in clusters)
    rows_n, rows_d = [], []
    for v, mult in clusters:
        special = min(abs(v - 1.0), abs(v + 1.0)) <= 1e-12
        orders = range(1, 2 * mult, 2) if special else range(mult)
        for k in orders:
            rn = [m**k * (v**m - (-1) ** k * v ** (-m)) for m in mu]
            rd = [d**k * (v**d - (-1) ** k * v ** (-d)) for d in delta]
            # same scale on both rows cancels in the det ratio
            s = 1.0 / max(max(abs(x) for x in rn), 1.0)
            rows_n.append([s * x for x in rn])
            rows_d.append([s * x for x in rd])
    dtype = np.clongdouble if hp else complex
    Mn = np.array(rows_n, dtype=dtype)
    Md = np.array(rows_d, dtype=dtype)
    if hp:
        dn, dd = _det_gauss(Mn), _det_gauss(Md)
    else:
        dn, dd = np.linalg.det(Mn), np.linalg.det(Md)
    if dd == 0:
        raise ZeroDivisionError("degenerate argument set: denominator det is 0")
    eps = float(np.finfo(Mn.dtype).eps)
    cond = eps * (
        np.linalg.cond(Mn.astype(complex)) + np.linalg.cond(Md.astype(complex))
    )
    return dn / dd, float(cond)


def symplectic_character(args, shape=None, tol: float = 1e-9) -> CharacterValue:
    """chi_shape(args) with staircase default shape; handles repeats in args.

    ``tol`` is the relative distance under which two arguments are merged
    into one confluent cluster.
    """
    L = len(args)
    if L == 0:
        return CharacterValue(1.0 + 0j, 0.0)
    if shape is None:
        shape = staircase(L)
    if len(shape) != L:
        raise ValueError("shape length must match the number of arguments")
    delta = [L - j for j in range(L)]  # L, L-1, .., 1
    mu = [shape[j] + delta[j] for j in range(L)]
    value, cond = _det_ratio(_cluster(args, tol), mu, delta)
    return CharacterValue(value, cond)


def schur(args, shape, tol: float = 1e-9) -> CharacterValue:
    """Schur polynomial s_shape(args) via the bialternant, repeats allowed."""
    N = len(args)
    if N == 0:
        return CharacterValue(1.0 + 0j, 0.0)
    if len(shape) != N:
        raise ValueError("shape must be padded to the number of arguments")
    kappa = [shape[j] + N - 1 - j for j in range(N)]
    eta = [N - 1 - j for j in range(N)]
    rows_n, rows_d = [], []
    for v, mult in _cluster(args, tol):
        for k in range(mult):
            rn = [m**k * v**m for m in kappa]
            rd = [d**k * v**d for d in eta]
            s = 1.0 / max(max(abs(x) for x in rn), 1.0)
            rows_n.append([s * x for x in rn])
            rows_d.append([s * x for x in rd])
    Mn = np.array(rows_n, dtype=complex)
    Md = np.array(rows_d, dtype=complex)
    dd = np.linalg.det(Md)
    if dd == 0:
        raise ZeroDivisionError("degenerate argument set: denominator det is 0")
    eps = np.finfo(float).eps
    cond = eps * (np.linalg.cond(Mn) + np.linalg.cond(Md))
    return CharacterValue(np.linalg.det(Mn) / dd, float(cond))


@lru_cache(maxsize=None)
def chi_homogeneous(L: int):
    """Exact chi at all arguments 1, as (power of 3, integer cofactor).

    chi^{(2m)}(1,..,1)   = 3^{m(m-1)}   * vsasm_count(2m+1)
    chi^{(2m-1)}(1,..,1) = 3^{(m-1)^2}  * csscpp_count(2m)
    """
    if L < 0:
        raise ValueError("need L >= 0")
    if L % 2 == 0:
        m = L // 2
        return m * (m - 1), combinat.vsasm_count(2 * m + 1)
    m = (L + 1) // 2
    return (m - 1) ** 2, combinat.csscpp_count(2 * m)


def chi_homogeneous_value(L: int) -> int:
    e3, rest = chi_homogeneous(L)
    return 3**e3 * rest


def chi_recursion_check(u, i: int, j: int, q: complex = Q_PERCOLATION) -> float:
    """Relative residual of the two-column reduction of the staircase character.

    Takes unsquared spectral parameters ``u`` (length L >= 3, generic),
    overwrites u_i with q*u_j, and compares chi^{(L)} of the squared
    arguments against

        (-1)^L * prod_{l != i,j} k(u_j, u_l) * chi^{(L-2)}((u_l^2)_{l != i,j}).

    Valid at q = exp(2i pi/3); the identity fails at generic q.
    ``i`` and ``j`` are 0-based and must differ.  At the default q the
    whole check runs in extended precision, since the double-precision
    determinant ratios leave residuals near 1e-9 already at L = 7.
    """
    from .transfer import Q_PERCOLATION_HP, kfun

    if abs(q - Q_PERCOLATION) < 1e-14:
        q = Q_PERCOLATION_HP
        u = [np.clongdouble(complex(x)) for x in u]
    else:
        u = [complex(x) for x in u]
    L = len(u)
    if L < 3 or i == j:
        raise ValueError("need L >= 3 and distinct indices")
    u[i] = q * u[j]
    lhs = symplectic_character([x * x for x in u]).value
    rhs = symplectic_character([u[l] * u[l] for l in range(L) if l not in (i, j)]).value
    rhs *= (-1) ** L
    for l in range(L):
        if l not in (i, j):
            rhs *= kfun(u[j], u[l], q)
    return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
