import cmath
import random
from fractions import Fraction

import numpy as np
import pytest

from tlstrip.observables import (
    bilinear_profile,
    closure_passage_exact,
    conservation_residuals,
    marked_edge_passage,
    marked_wire_profile,
    marked_wire_profile_exact,
    pb_contract,
    pb_formula,
    pb_hom,
    pb_hom_log,
    pbhat_contract,
    pbhat_formula,
    pbhat_hom,
    pbhat_hom_log,
    pleft_profile,
    profile_exact,
    profile_float,
    site_coordinate,
)
from tlstrip.transfer import SpectralPoint, W_ISOTROPIC

# exact staircase data, P_j Z^2 for j = 1/2, 3/2, ..., L+1/2; the two
# widest rows pin only the leading entries
STAIRCASE_ROWS = {
    3: (2, (0, 3, 1, 4)),
    5: (11, (0, 78, 22, 99, 43, 121)),
    7: (170, (0, 16796, 4484, 21093, 7807, 24416, 12104, 28900)),
    9: (7429, (0, 29641710, 7721790, 37074705, 12859293)),
    11: (920460, (0, 426943865250, 109785565350, 532943651700, 178807268772, 605036201854)),
}


def _unimodular(rng, n):
    return tuple(cmath.exp(2j * cmath.pi * rng.random()) for _ in range(n))


@pytest.mark.parametrize("L", sorted(STAIRCASE_ROWS))
def test_exact_staircase_rows(L):
    Z, row = STAIRCASE_ROWS[L]
    got_Z, _, prof = profile_exact(L)
    assert got_Z == Z
    scaled = [p * Z * Z for p in prof.p_half[: len(row)]]
    assert all(v.denominator == 1 for v in scaled)
    assert tuple(int(v) for v in scaled) == row


def test_site_passage_small_widths():
    _, _, p3 = profile_exact(3)
    assert p3.x == (Fraction(3, 4), Fraction(1, 2), Fraction(3, 4))
    _, _, p5 = profile_exact(5)
    assert p5.x == tuple(Fraction(v, 121) for v in (78, 56, 77, 56, 78))


def test_alternating_sum_rule_exact():
    for L in (1, 3, 5, 7, 9, 11):
        _, _, prof = profile_exact(L)
        assert sum((-1) ** j * x for j, x in enumerate(prof.x)) == 1


def test_profile_is_reflection_symmetric():
    for L in (3, 5, 7, 9):
        _, _, prof = profile_exact(L)
        assert prof.x == prof.x[::-1]


def test_staircase_brackets_and_monotone_envelope():
    _, _, prof = profile_exact(9)
    assert prof.p_half[0] == 0
    assert prof.p_half[-1] == 1
    # the smooth part interpolates monotonically
    assert all(b > a for a, b in zip(prof.pbar, prof.pbar[1:]))


def test_exact_wire_profiles_close_the_conservation_laws():
    for L in (1, 3, 5):
        Z, _, prof = profile_exact(L)
        X, Xhat, Y = marked_wire_profile_exact(L)
        assert tuple(X) == prof.x
        for j in range(1, L + 1):
            assert X[j - 1] + Xhat[j] == Y[j - 1] + Y[j]
        assert Xhat[0] == Y[0]
        assert Xhat[L + 1] == Y[L]


def test_pinned_wire_values_at_width_three():
    _, Xhat, Y = marked_wire_profile_exact(3)
    assert Xhat == (
        Fraction(147, 256),
        Fraction(57, 128),
        Fraction(95, 128),
        Fraction(57, 128),
        Fraction(147, 256),
    )
    assert Y == (
        Fraction(147, 256),
        Fraction(159, 256),
        Fraction(159, 256),
        Fraction(147, 256),
    )


def test_homogeneous_closed_forms_small():
    assert pb_hom(1) == 1
    assert pb_hom(5) == Fraction(78, 121)
    assert pbhat_hom(1) == Fraction(3, 4)
    assert pbhat_hom(3) == Fraction(147, 256)


def test_closure_contraction_matches_closed_form():
    # the aggregated sweep must reproduce the brute-force values and the
    # product formula; width nine runs only in the acceptance battery
    for L in (1, 3, 5):
        assert closure_passage_exact(L) == marked_wire_profile_exact(L)[1][0]
    for L in (1, 3, 5, 7):
        assert closure_passage_exact(L) == pbhat_hom(L)


def test_boundary_formulas_match_contractions():
    rng = random.Random(21)
    for L in (3, 5):
        for _ in range(3):
            z = _unimodular(rng, L)
            w = cmath.exp(2j * cmath.pi * rng.random())
            pt = SpectralPoint(w, z)
            pb = pb_formula(z)
            pbh = pbhat_formula(w, z)
            assert abs(pb - pb_contract(pt)) <= 1e-8 * abs(pb)
            assert abs(pbh - pbhat_contract(pt)) <= 1e-8 * abs(pbh)


def test_hom_log_routes_match_exact_values():
    import math

    for L in (5, 9):
        assert pb_hom_log(L) == pytest.approx(math.log(float(pb_hom(L))), rel=1e-12)
        assert pbhat_hom_log(L) == pytest.approx(
            math.log(float(pbhat_hom(L))), rel=1e-12
        )
    assert np.isfinite(pb_hom_log(4001))
    assert np.isfinite(pbhat_hom_log(4001))


def test_profile_is_w_independent():
    rng = random.Random(22)
    z = _unimodular(rng, 5)
    p1 = profile_float(SpectralPoint(cmath.exp(0.37j), z))
    p2 = profile_float(SpectralPoint(cmath.exp(2.03j), z))
    assert max(abs(a - b) for a, b in zip(p1.x, p2.x)) < 1e-10


def test_site_passage_block_symmetry():
    # X_3 cannot see an exchange of z_1, z_2 or of z_4, z_5, nor any
    # z -> 1/z flip of a spectator column
    rng = random.Random(23)
    z = list(_unimodular(rng, 5))
    base = profile_float(SpectralPoint(W_ISOTROPIC, tuple(z))).x[2]
    swapped = [z[1], z[0], z[2], z[4], z[3]]
    v1 = profile_float(SpectralPoint(W_ISOTROPIC, tuple(swapped))).x[2]
    flipped = [z[0], 1 / z[1], z[2], z[3], 1 / z[4]]
    v2 = profile_float(SpectralPoint(W_ISOTROPIC, tuple(flipped))).x[2]
    assert abs(v1 - base) < 2e-9
    assert abs(v2 - base) < 2e-9


def test_marked_edge_passage_specializations():
    rng = random.Random(24)
    L = 3
    z = _unimodular(rng, L)
    j = 2
    at_z = SpectralPoint(z[j - 1], z)
    assert abs(
        marked_edge_passage(at_z, "aux", j) - marked_edge_passage(at_z, "mid", j)
    ) < 1e-10
    at_qz = SpectralPoint(at_z.q * z[j - 1], z)
    assert abs(
        marked_edge_passage(at_qz, "aux", j) - marked_edge_passage(at_qz, "site", j)
    ) < 1e-10


def test_conservation_at_random_points():
    rng = random.Random(25)
    z = _unimodular(rng, 3)
    pt = SpectralPoint(cmath.exp(2j * cmath.pi * rng.random()), z)
    assert conservation_residuals(pt) < 1e-10


def test_width_guards():
    with pytest.raises(ValueError):
        marked_wire_profile(SpectralPoint.percolation(7))
    with pytest.raises(ValueError):
        closure_passage_exact(11)
    with pytest.raises(ValueError):
        marked_edge_passage(SpectralPoint.percolation(7), "mid", 0)


def test_site_coordinate_offset():
    # boundary sites pull in by a quarter lattice unit by default
    assert site_coordinate(1, 3) == pytest.approx(0.75 / 3.5)
    for L in (3, 9):
        for j in range(1, L + 1):
            s = site_coordinate(j, L) + site_coordinate(L + 1 - j, L)
            assert s == pytest.approx(1.0, abs=1e-15)
    assert site_coordinate(1, 5, offset=0.0) == pytest.approx(1 / 6)


def test_pleft_profile_routing():
    assert pleft_profile(9).mode == "exact"
    assert isinstance(pleft_profile(9).x[0], Fraction)
    assert pleft_profile(13).mode == "float"
    with pytest.raises(ValueError):
        pleft_profile(3, method="exact", z=(1.1, 1.0, 0.9))
    with pytest.raises(ValueError):
        pleft_profile(3, method="nope")
    # the loop and spin-chain routes must agree where both run
    pl = pleft_profile(13, method="loop")
    px = pleft_profile(13, method="xxz")
    assert max(abs(a - b) for a, b in zip(pl.p_half, px.p_half)) < 1e-8


def test_pleft_profile_exact_vs_float_routes():
    _, _, exact = profile_exact(9)
    got = pleft_profile(9, method="xxz")
    for a, b in zip(exact.p_half, got.p_half):
        assert float(a) == pytest.approx(float(b), abs=1e-9)


def test_bilinear_norm_equals_character_pairing():
    # scale-free statement of the normalization proposition: the glue
    # norm factorizes through the component sums
    from tlstrip.transfer import ground_state, rotate_permutation

    rng = random.Random(26)
    L = 5
    sigma = rotate_permutation(L)
    for _ in range(3):
        z = _unimodular(rng, L)
        pt = SpectralPoint(cmath.exp(2j * cmath.pi * rng.random()), z)
        psi = ground_state(pt)
        psibar = ground_state(pt.reversed())[sigma]
        norm, _ = bilinear_profile(L, psi, psibar, 1)
        assert abs(norm / (psi.sum() * psibar.sum()) - 1.0) < 1e-10
