import numpy as np
import pytest

from tlstrip.mcsim import (
    Estimate,
    estimate_pleft,
    row_table,
    sample_hull,
    section_masks,
)
from tlstrip.observables import profile_exact


def test_row_table_is_a_matching():
    for L in (1, 3, 5):
        table = row_table(L)
        assert table.shape == (4**L, 2 * L)
        idx = np.arange(2 * L)
        for conf in range(0, 4**L, 7):
            m = table[conf].astype(int)
            assert (m[m] == idx).all()
            assert (m != idx).all()
    with pytest.raises(ValueError):
        row_table(9)


def test_input_guards():
    with pytest.raises(ValueError):
        estimate_pleft(4)
    with pytest.raises(ValueError):
        estimate_pleft(3, H=7)
    with pytest.raises(ValueError):
        estimate_pleft(3, n_samples=0)
    with pytest.raises(ValueError):
        sample_hull(2, 8, 0)


def test_boundary_staircase_values_are_exact():
    est = estimate_pleft(3, n_samples=500, seed=5)
    assert est.p_half[0].mean == 0.0
    assert est.p_half[0].stderr == 0.0
    assert est.p_half[-1].mean == 1.0
    assert est.p_half[-1].stderr == 0.0
    assert est.x1 is est.p_half[1]


def test_stream_is_deterministic_and_chunk_invariant():
    a = estimate_pleft(5, n_samples=3000, seed=11, chunk=1 << 14, threads=1)
    b = estimate_pleft(5, n_samples=3000, seed=11, chunk=1 << 8, threads=1)
    c = estimate_pleft(5, n_samples=3000, seed=11, chunk=1 << 8, threads=2)
    d = estimate_pleft(5, n_samples=3000, seed=11, chunk=1 << 14, threads=1)
    assert a == b == c == d
    assert a != estimate_pleft(5, n_samples=3000, seed=12, threads=1)


def test_section_masks_slice_by_start_offset():
    full = section_masks(5, 16, seed=7, start=0, count=50)
    part = section_masks(5, 16, seed=7, start=20, count=30)
    assert (full[20:] == part).all()


def test_estimate_from_hits():
    e = Estimate.from_hits(30, 120)
    assert e.mean == 0.25
    assert e.stderr == pytest.approx(
        (0.25 * 0.75 * 120 / 119 / 120) ** 0.5, rel=1e-12
    )
    assert Estimate.from_hits(0, 40).stderr == 0.0
    assert Estimate.from_hits(1, 1).stderr == 0.0


def test_degenerate_bond_densities_pin_the_hull():
    L, H = 5, 8
    # all bonds closed: the hull runs straight up the left wall
    assert sample_hull(L, H, 3, p=0.0) == [(r, 0) for r in range(H + 1)]
    # all bonds open: across the bottom, up the right wall, back across
    wall = sample_hull(L, H, 3, p=1.0)
    assert len(wall) == H + 2 * L - 1
    assert wall[0] == (0, 0)
    assert wall[-1] == (H, 0)
    assert {c for r, c in wall if 0 < r < H} == {L - 1}


def test_hull_walk_reproduces_engine_masks():
    L, H, seed = 5, 8, 3
    masks = section_masks(L, H, seed, start=0, count=6)
    for index in range(6):
        path = sample_hull(L, H, seed, p=0.5, index=index)
        assert path[0] == (0, 0)
        assert path[-1] == (H, 0)
        mid = [c for r, c in path if r == H // 2]
        for j in range(L + 1):
            eng = int(masks[index]) >> j
            assert (bin(eng).count("1") & 1) == (len([c for c in mid if c >= j]) & 1)


def test_staircase_matches_exact_profile_statistically():
    _, _, prof = profile_exact(3)
    est = estimate_pleft(3, n_samples=2 * 10**5, seed=1)
    for j in (1, 2):
        e = est.p_half[j]
        assert abs(e.mean - float(prof.p_half[j])) < 5 * e.stderr
