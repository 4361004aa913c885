import numpy as np
import pytest

from axelsmote import (
    CultureGrid,
    InvalidDimension,
    count_regions,
    cultural_similarity,
    derive_stream,
    grid_to_csv,
    init_grid,
    is_absorbed,
    run,
    step,
)


def grid_from_cells(cells, q, boundary="open", seed=0):
    return CultureGrid(
        cells=np.array(cells, dtype=np.int64),
        q=q,
        rng=derive_stream(seed, "lattice"),
        boundary=boundary,
    )


class TestInitGrid:
    def test_single_trait_value_gives_zero_grid(self):
        grid = init_grid(4, 3, 1, seed=0)
        assert (grid.cells == 0).all()

    def test_same_seed_same_grid(self):
        a = init_grid(2, 3, 5, seed=7)
        b = init_grid(2, 3, 5, seed=7)
        assert np.array_equal(a.cells, b.cells)

    def test_values_in_range(self):
        grid = init_grid(6, 4, 3, seed=1)
        assert grid.cells.min() >= 0 and grid.cells.max() < 3

    def test_single_agent_lattice(self):
        grid = init_grid(1, 3, 5, seed=0)
        assert grid.cells.shape == (1, 1, 3)
        assert step(grid) is False

    @pytest.mark.parametrize("dims", [(0, 3, 5), (3, 0, 5), (3, 3, 0)])
    def test_invalid_dimensions_rejected(self, dims):
        with pytest.raises(InvalidDimension):
            init_grid(*dims, seed=0)

    def test_bad_boundary_rejected(self):
        with pytest.raises(ValueError):
            init_grid(3, 2, 2, seed=0, boundary="wrapped")


class TestCulturalSimilarity:
    def test_identical(self):
        assert cultural_similarity(np.array([1, 2, 3]), np.array([1, 2, 3])) == 1.0

    def test_two_of_three_match(self):
        sim = cultural_similarity(np.array([0, 1, 2]), np.array([0, 1, 3]))
        assert sim == pytest.approx(2 / 3)

    def test_fully_distinct(self):
        assert cultural_similarity(np.array([0, 1]), np.array([2, 3])) == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            cultural_similarity(np.array([1, 2]), np.array([1, 2, 3]))


class TestStep:
    def test_uniform_grid_never_interacts(self):
        grid = grid_from_cells(np.zeros((3, 3, 4)), q=5)
        before = grid.cells.copy()
        assert not any(step(grid) for _ in range(200))
        assert np.array_equal(grid.cells, before)

    def test_single_feature_disagreement_freezes(self):
        # with one feature per agent, any differing pair has similarity 0,
        # so no interaction can ever fire
        cells = np.arange(9).reshape(3, 3, 1)
        grid = grid_from_cells(cells, q=9)
        before = grid.cells.copy()
        assert not any(step(grid) for _ in range(500))
        assert np.array_equal(grid.cells, before)

    def test_zero_similarity_everywhere_freezes(self):
        # 2x2 grid, all pairs fully distinct in both features
        cells = np.array(
            [[[0, 0], [1, 1]],
             [[2, 2], [3, 3]]]
        )
        grid = grid_from_cells(cells, q=4)
        before = grid.cells.copy()
        assert not any(step(grid) for _ in range(500))
        assert np.array_equal(grid.cells, before)

    def test_interaction_copies_exactly_one_trait(self):
        grid = init_grid(4, 4, 3, seed=12)
        for _ in range(2000):
            before = grid.cells.copy()
            changed = step(grid)
            delta = before != grid.cells
            if not changed:
                assert not delta.any()
                continue
            # exactly one cell changed in exactly one feature
            cell_rows, cell_cols, features = np.nonzero(delta)
            assert len(cell_rows) == 1
            r, c, p = cell_rows[0], cell_cols[0], features[0]
            # the new value was copied from an adjacent agent, raising the
            # similarity of that bond by exactly 1/f
            new = grid.cells[r, c]
            old = before[r, c]
            donors = []
            for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if 0 <= rr < 4 and 0 <= cc < 4:
                    donor = grid.cells[rr, cc]
                    if donor[p] == new[p] and donor[p] != old[p]:
                        donors.append(donor)
            assert donors
            gains = [
                cultural_similarity(new, d) - cultural_similarity(old, d)
                for d in donors
            ]
            assert any(g == pytest.approx(1 / 4) for g in gains)

    def test_trait_values_stay_in_range(self):
        grid = init_grid(5, 3, 4, seed=3)
        for _ in range(5000):
            step(grid)
        assert grid.cells.min() >= 0 and grid.cells.max() < 4


class TestAbsorptionAndRegions:
    def test_uniform_grid_absorbed_single_region(self):
        grid = grid_from_cells(np.zeros((3, 3, 2)), q=3)
        assert is_absorbed(grid)
        assert count_regions(grid) == 1

    def test_active_bond_detected(self):
        cells = np.zeros((2, 2, 2), dtype=np.int64)
        cells[0, 0] = (0, 1)  # shares 1 of 2 features with its neighbors
        grid = grid_from_cells(cells, q=2)
        assert not is_absorbed(grid)

    def test_fully_distinct_grid_absorbed(self):
        cells = np.array(
            [[[0, 0], [1, 1]],
             [[2, 2], [3, 3]]]
        )
        grid = grid_from_cells(cells, q=4)
        assert is_absorbed(grid)
        assert count_regions(grid) == 4

    def test_two_block_split(self):
        cells = np.zeros((4, 4, 2), dtype=np.int64)
        cells[:, 2:, :] = 1  # right half is a different culture
        grid = grid_from_cells(cells, q=2)
        assert count_regions(grid) == 2

    def test_periodic_boundary_adds_wrap_bonds(self):
        # one row pattern B, M, A where consecutive pairs have similarity 0
        # but the wrap pair A-B shares one of two features
        row = [[1, 0], [2, 3], [0, 0]]
        cells = np.array([row, row, row])
        open_grid = grid_from_cells(cells, q=4, boundary="open")
        periodic_grid = grid_from_cells(cells, q=4, boundary="periodic")
        assert is_absorbed(open_grid)
        assert not is_absorbed(periodic_grid)


class TestRun:
    def test_monoculture_converges_without_stepping(self):
        grid = init_grid(5, 3, 1, seed=0)
        report = run(grid, max_steps=10_000)
        assert report.converged
        assert report.steps_executed == 0
        assert report.region_count == 1

    def test_tiny_grid_huge_trait_space_freezes_apart(self):
        grid = init_grid(2, 1, 10**6, seed=123)
        assert len(np.unique(grid.cells)) == 4  # all four agents distinct
        report = run(grid, max_steps=10_000)
        assert report.converged
        assert report.steps_executed == 0
        assert report.region_count == 4

    def test_small_binary_grid_reaches_absorption(self):
        grid = init_grid(5, 3, 2, seed=0)
        report = run(grid, max_steps=1_000_000)
        assert report.converged
        assert report.steps_executed < 1_000_000

    def test_absorbed_grid_is_frozen(self):
        grid = init_grid(5, 3, 2, seed=1)
        report = run(grid, max_steps=1_000_000)
        assert report.converged
        frozen = report.final_grid
        before = frozen.cells.copy()
        for _ in range(1000):
            step(frozen)
        assert np.array_equal(frozen.cells, before)

    def test_repeat_run_identical(self):
        a = run(init_grid(5, 3, 2, seed=7), max_steps=1_000_000)
        b = run(init_grid(5, 3, 2, seed=7), max_steps=1_000_000)
        assert a.steps_executed == b.steps_executed
        assert a.region_count == b.region_count
        assert np.array_equal(a.final_grid.cells, b.final_grid.cells)

    def test_step_cap_respected(self):
        grid = init_grid(8, 5, 30, seed=2)  # high q rarely converges fast
        report = run(grid, max_steps=500, check_interval=100)
        assert report.steps_executed <= 500

    def test_report_snapshot_is_independent(self):
        grid = init_grid(4, 3, 8, seed=5)
        report = run(grid, max_steps=200, check_interval=50)
        cells = report.final_grid.cells.copy()
        for _ in range(500):
            step(grid)  # keep driving the original
        assert np.array_equal(report.final_grid.cells, cells)

    def test_argument_validation(self):
        grid = init_grid(3, 2, 2, seed=0)
        with pytest.raises(ValueError):
            run(grid, max_steps=0)
        with pytest.raises(ValueError):
            run(grid, max_steps=10, check_interval=0)


def test_grid_csv_dump_round_trips(tmp_path):
    grid = init_grid(4, 3, 5, seed=9)
    path = tmp_path / "grid.csv"
    grid_to_csv(grid, path)
    loaded = np.loadtxt(path, delimiter=",", dtype=np.int64)
    assert loaded.shape == (16, 3)
    assert np.array_equal(loaded, grid.cells.reshape(16, 3))
