import cmath
import random

import numpy as np
import pytest

from tlstrip.characters import (
    chi_homogeneous,
    chi_homogeneous_value,
    chi_recursion_check,
    schur,
    staircase,
    symplectic_character,
)
from tlstrip.combinat import csscpp_count, vsasm_count
from tlstrip.transfer import Q_PERCOLATION


def test_staircase_shape():
    assert staircase(5) == (2, 1, 1, 0, 0)
    assert staircase(6) == (2, 2, 1, 1, 0, 0)
    assert staircase(1) == (0,)


def test_homogeneous_anchors():
    assert chi_homogeneous_value(3) == 6
    assert chi_homogeneous_value(4) == 27
    assert chi_homogeneous_value(5) == 891
    assert symplectic_character([1, 1, 1]).real_checked == pytest.approx(6, abs=1e-10)
    assert symplectic_character([1, 1, 1, 1]).real_checked == pytest.approx(27, abs=1e-9)
    assert symplectic_character([1] * 5).real_checked == pytest.approx(891, abs=1e-7)


def test_homogeneous_factorization():
    # even width 2m: 3^{m(m-1)} times the odd symmetric count;
    # odd width 2m-1: 3^{(m-1)^2} times the even self-complementary count
    for L in range(1, 13):
        e3, rest = chi_homogeneous(L)
        if L % 2 == 0:
            m = L // 2
            assert (e3, rest) == (m * (m - 1), vsasm_count(2 * m + 1))
        else:
            m = (L + 1) // 2
            assert (e3, rest) == ((m - 1) ** 2, csscpp_count(2 * m))
        assert chi_homogeneous_value(L) == 3**e3 * rest


def test_near_homogeneous_limit_converges_to_exact():
    # perturbed distinct arguments approach the confluent value; the
    # spread stays large enough that the alternant is well conditioned,
    # and the reported cond must confirm that
    rng = random.Random(3)
    for L in (3, 4):
        want = chi_homogeneous_value(L)
        for spread in (1e-2, 5e-2):
            # evenly spaced with small jitter so no pair re-clusters
            args = [1.0 + spread * (k + 1 + 0.2 * rng.random()) for k in range(L)]
            cv = symplectic_character(args)
            assert cv.cond < 1e-2
            assert cv.real_checked == pytest.approx(want, rel=0.1)


def test_confluent_pair_anchor():
    # chi with two equal arguments at L = 2 collapses to 1
    rng = random.Random(5)
    for _ in range(5):
        u = cmath.exp(2j * cmath.pi * rng.random())
        v = symplectic_character([u, u]).value
        assert abs(v - 1.0) < 1e-10


def test_q_squared_anchor():
    q = Q_PERCOLATION
    v = symplectic_character([q * q, 1, 1, 1]).real_checked
    assert v == pytest.approx(9.0, abs=1e-8)


def test_symmetric_and_inversion_invariant():
    # chi is a Laurent polynomial in the args, symmetric and invariant
    # under inverting any argument
    rng = random.Random(11)
    args = [cmath.exp(2j * cmath.pi * rng.random()) for _ in range(5)]
    base = symplectic_character(args).value
    shuffled = list(args)
    rng.shuffle(shuffled)
    assert abs(symplectic_character(shuffled).value - base) < 1e-9 * abs(base)
    inverted = [1 / args[0]] + args[1:]
    assert abs(symplectic_character(inverted).value - base) < 1e-9 * abs(base)


def test_extended_precision_path():
    args = [np.clongdouble(1.0)] * 5
    v = symplectic_character(args).value
    assert abs(complex(v) - 891) < 1e-10


def test_real_checked_rejects_complex_values():
    rng = random.Random(7)
    args = [cmath.exp(2j * cmath.pi * rng.random()) for _ in range(3)]
    cv = symplectic_character(args)
    if abs(complex(cv.value).imag) > 1e-6:
        with pytest.raises(ValueError):
            cv.real_checked


def test_condition_estimate_grows_when_arguments_cluster():
    well = symplectic_character([1.0, 2.0, 3.0])
    ill = symplectic_character([1.0, 1.0 + 1e-7, 3.0])
    assert well.cond >= 0
    assert ill.cond > well.cond


def test_schur_hand_values():
    rng = random.Random(13)
    x, y = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
    assert complex(schur([x, y], (1, 0)).value) == pytest.approx(x + y)
    assert complex(schur([x, y], (1, 1)).value) == pytest.approx(x * y)
    assert complex(schur([x, y], (2, 0)).value) == pytest.approx(x * x + x * y + y * y)


def test_two_column_recursion_residuals():
    rng = random.Random(17)
    for L in (3, 5, 7):
        for _ in range(3):
            u = [cmath.exp(2j * cmath.pi * rng.random()) for _ in range(L)]
            i = rng.randrange(L)
            j = (i + 1 + rng.randrange(L - 1)) % L
            assert chi_recursion_check(u, i, j) < 1e-10


def test_two_column_recursion_holds_only_at_cube_roots():
    # the reduction needs q^3 = 1; the residual must vanish at both
    # primitive roots and detect any drift away from them
    rng = random.Random(19)
    u = [cmath.exp(2j * cmath.pi * rng.random()) for _ in range(3)]
    assert chi_recursion_check(list(u), 0, 2, q=Q_PERCOLATION.conjugate()) < 1e-12
    off = Q_PERCOLATION * cmath.exp(1e-3j)
    assert chi_recursion_check(list(u), 0, 2, q=off) > 1e-5
