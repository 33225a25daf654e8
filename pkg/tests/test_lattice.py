"""Toroidal indexing, patch extraction and snapshot round-trips."""

import numpy as np
import pytest

from gmrf_infogeo.lattice import (
    Configuration,
    NEIGHBOR_OFFSETS,
    PATCH_CENTER,
    PATCH_OFFSETS,
    extract_patches,
    neighbor_indices,
    neighbor_sums,
    neighbors,
    new_iid_configuration,
    read_snapshot,
    write_snapshot,
)

# 3x3 grid holding 1..9 row-major:
#   1 2 3
#   4 5 6
#   7 8 9
GRID_1_TO_9 = Configuration(3, 3, np.arange(1.0, 10.0))


def test_corner_neighbors_wrap_both_axes():
    # hand-derived for site (0,0): NW,N,NE,W,E,SW,S,SE with wraparound
    assert neighbors(GRID_1_TO_9, (0, 0)).tolist() == [9, 7, 8, 3, 2, 6, 4, 5]


def test_center_neighbors_no_wrap():
    assert neighbors(GRID_1_TO_9, (1, 1)).tolist() == [1, 2, 3, 4, 6, 7, 8, 9]


def test_neighbors_rejects_out_of_bounds():
    with pytest.raises(ValueError, match="out of bounds"):
        neighbors(GRID_1_TO_9, (3, 0))


def test_neighbor_indices_match_modular_arithmetic():
    rows, cols = 5, 4
    idx = neighbor_indices(rows, cols)
    assert idx.shape == (rows * cols, 8)
    assert not idx.flags.writeable
    for r in range(rows):
        for c in range(cols):
            expected = [
                ((r + dr) % rows) * cols + (c + dc) % cols
                for dr, dc in NEIGHBOR_OFFSETS
            ]
            assert idx[r * cols + c].tolist() == expected


def test_neighbor_sums_on_3x3_torus():
    # on a 3x3 torus every site's Moore neighborhood is all 8 other cells
    expected = 45.0 - GRID_1_TO_9.cells
    np.testing.assert_array_equal(neighbor_sums(GRID_1_TO_9), expected)


def test_extract_patches_one_hot():
    cells = np.zeros(16)
    cells[1 * 4 + 1] = 1.0  # hot cell at (1,1) on a 4x4 grid
    patches = extract_patches(Configuration(4, 4, cells))
    assert patches.shape == (16, 9)
    assert patches.sum() == 9.0  # the hot cell appears in exactly 9 patches
    for j, (dr, dc) in enumerate(PATCH_OFFSETS):
        # the patch centered at (1,1) - offset sees the hot cell in column j
        site = ((1 - dr) % 4) * 4 + (1 - dc) % 4
        assert patches[site, j] == 1.0


def test_patch_center_column_is_the_cell_itself():
    config = new_iid_configuration(6, 7, 0.0, 1.0, seed=3)
    patches = extract_patches(config)
    np.testing.assert_array_equal(patches[:, PATCH_CENTER], config.cells)


def test_patch_neighbor_columns_match_neighbors_helper():
    config = new_iid_configuration(5, 5, 0.0, 1.0, seed=4)
    patches = extract_patches(config)
    neighbor_cols = [0, 1, 2, 3, 5, 6, 7, 8]
    for r in range(5):
        for c in range(5):
            np.testing.assert_array_equal(
                patches[r * 5 + c, neighbor_cols], neighbors(config, (r, c))
            )


def test_configuration_validation():
    with pytest.raises(ValueError, match="at least 3x3"):
        Configuration(2, 3, np.zeros(6))
    with pytest.raises(ValueError, match="expected 9 cells"):
        Configuration(3, 3, np.zeros(8))
    bad = np.zeros(9)
    bad[0] = np.inf
    with pytest.raises(ValueError, match="finite"):
        Configuration(3, 3, bad)


def test_configuration_cells_are_read_only():
    config = Configuration(3, 3, np.zeros(9))
    with pytest.raises(ValueError):
        config.cells[0] = 1.0
    assert config.grid.shape == (3, 3)
    assert config.n_sites == 9


def test_new_iid_configuration_is_seed_deterministic():
    a = new_iid_configuration(8, 8, 1.5, 2.0, seed=11)
    b = new_iid_configuration(8, 8, 1.5, 2.0, seed=11)
    c = new_iid_configuration(8, 8, 1.5, 2.0, seed=12)
    np.testing.assert_array_equal(a.cells, b.cells)
    assert not np.array_equal(a.cells, c.cells)
    with pytest.raises(ValueError, match="variance must be positive"):
        new_iid_configuration(8, 8, 0.0, 0.0, seed=1)


def test_snapshot_round_trip_is_exact(tmp_path):
    config = new_iid_configuration(4, 6, -0.3, 3.0, seed=21)
    path = tmp_path / "field.snap"
    write_snapshot(config, path, beta_set=0.12345)
    back, beta_set = read_snapshot(path)
    assert (back.rows, back.cols) == (4, 6)
    assert beta_set == 0.12345
    np.testing.assert_array_equal(back.cells, config.cells)


@pytest.mark.parametrize(
    "content, message",
    [
        ("NOT-A-SNAPSHOT v1 3 3 0.0\n0 0 0\n0 0 0\n0 0 0\n", "not a"),
        ("GMRF-SNAPSHOT v9 3 3 0.0\n0 0 0\n0 0 0\n0 0 0\n", "version"),
        ("GMRF-SNAPSHOT v1 3 3 0.0\n0 0 0\n0 0 0\n", "expected 9 cells"),
        ("GMRF-SNAPSHOT v1 3 3 0.0\n0 0 x\n0 0 0\n0 0 0\n", "malformed"),
        ("GMRF-SNAPSHOT v1 3 0.0\n", "not a"),
    ],
)
def test_snapshot_rejects_malformed_input(tmp_path, content, message):
    path = tmp_path / "bad.snap"
    path.write_text(content)
    with pytest.raises(ValueError, match=message):
        read_snapshot(path)


def test_extract_patches_constant_field():
    config = Configuration(4, 5, np.full(20, 2.5))
    patches = extract_patches(config)
    np.testing.assert_array_equal(patches, np.full((20, 9), 2.5))


def test_patch_ensemble_is_invariant_under_toroidal_shifts():
    # rolling the torus permutes the sites but leaves the patch multiset alone
    rng = np.random.default_rng(23)
    grid = rng.normal(size=(5, 7))
    base = Configuration(5, 7, grid.ravel())
    shifted = Configuration(5, 7, np.roll(grid, (2, 3), axis=(0, 1)).ravel())
    sort_rows = lambda p: p[np.lexsort(p.T[::-1])]  # noqa: E731
    np.testing.assert_allclose(
        sort_rows(extract_patches(base)),
        sort_rows(extract_patches(shifted)),
        rtol=0.0,
        atol=0.0,
    )


def test_new_iid_configuration_matches_requested_moments():
    config = new_iid_configuration(512, 512, 0.0, 5.0, seed=90)
    assert config.cells.mean() == pytest.approx(0.0, abs=0.05)
    assert config.cells.var() == pytest.approx(5.0, rel=0.05)
