"""Release gate: pinned behavioral contracts, each with a wall-clock budget.

Every test here is a hard guarantee the package makes.  Tolerances and
budgets are fixed; loosening them is an API break, not a test fix.
"""

import time
import warnings

import numpy as np

from axelsmote import (
    AxelParams,
    CsvSchema,
    Dataset,
    MetricWarning,
    TargetCounts,
    balanced_accuracy,
    class_counts,
    derive_stream,
    draw_blend_ratio,
    export_csv,
    f1_score,
    generate_one,
    init_grid,
    knn_classify,
    load_csv,
    normalize,
    partition_traits,
    resample,
    run,
    same_class_knn,
    step,
    stratified_split,
)


class Budget:
    """Context manager asserting its block finishes inside a time budget."""

    def __init__(self, seconds: float):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            elapsed = time.perf_counter() - self.start
            assert elapsed < self.seconds, (
                f"budget exceeded: {elapsed:.2f}s >= {self.seconds}s"
            )
        return False


def make_skewed(counts, d, seed, normalized=True):
    rng = np.random.default_rng(seed)
    labels = np.concatenate(
        [np.full(n, c, dtype=np.int64) for c, n in sorted(counts.items())]
    )
    return Dataset(
        features=rng.random((labels.size, d)), labels=labels, normalized=normalized
    )


def test_trait_partition_is_exhaustive_for_every_shape():
    with Budget(5.0):
        for d in range(1, 65):
            for t in range(1, d + 1):
                partition = partition_traits(d, t)
                assert len(partition) == t
                sizes = [trait.size for trait in partition]
                assert min(sizes) >= 1
                # concatenating in trait order reproducing 0..d-1 proves the
                # traits disjoint, exhaustive, and contiguous in one shot
                flat = np.concatenate(list(partition))
                assert np.array_equal(flat, np.arange(d))


def test_closed_gates_copy_the_base_bit_for_bit():
    with Budget(5.0):
        ds = make_skewed({0: 40, 1: 25}, 8, seed=3)
        partition = partition_traits(8, 3)
        closed_gate = [
            AxelParams(k=3, t=3, theta=1.0, alpha=0.7, seed=31),
            AxelParams(k=3, t=3, theta=0.0, alpha=0.0, seed=32),
        ]
        for params in closed_gate:
            for i in range(500):
                sample = generate_one(ds, i % 2, i, partition, params)
                assert np.array_equal(
                    sample.values, ds.features[sample.base_index]
                )
                assert sample.blend_log == ()
                assert not sample.noise_applied


def test_blending_never_leaves_the_participant_envelope():
    with Budget(30.0):
        ds = make_skewed({0: 600, 1: 100}, 12, seed=2)
        params = AxelParams(
            k=5,
            t=4,
            theta=0.2,
            alpha=0.9,
            diversity_injection=False,
            strategy=TargetCounts({1: 10100}),
            seed=99,
        )
        _, batch = resample(ds, params)
        assert len(batch) == 10_000
        partition = partition_traits(12, 4)
        for sample in batch.samples:
            for trait_idx, trait in enumerate(partition):
                rows = [sample.base_index] + [
                    rec.neighbor
                    for rec in sample.blend_log
                    if rec.trait == trait_idx
                ]
                block = ds.features[np.array(rows)][:, trait]
                got = sample.values[trait]
                assert (got >= block.min(axis=0)).all()
                assert (got <= block.max(axis=0)).all()


def test_blend_ratio_moments():
    with Budget(5.0):
        rng = derive_stream(7, "exchange")
        draws = np.array([draw_blend_ratio(rng) for _ in range(100_000)])
        assert 0.49 <= draws.mean() <= 0.51
        assert 0.045 <= draws.var() <= 0.055


def test_neighbor_search_matches_brute_force_everywhere():
    with Budget(30.0):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            n = int(rng.integers(10, 201))
            d = int(rng.integers(1, 11))
            m = int(rng.integers(2, 5))
            # at least two rows per class, rest random; rounding forces ties
            labels = np.concatenate(
                [np.repeat(np.arange(m), 2), rng.integers(0, m, n - 2 * m)]
            )
            features = np.round(rng.random((n, d)), 2)
            ds = Dataset(features=features, labels=labels, normalized=True)

            for query in range(n):
                candidates = np.flatnonzero(
                    (ds.labels == ds.labels[query])
                    & (np.arange(n) != query)
                )
                diffs = features[candidates] - features[query]
                squared = (diffs * diffs).sum(axis=1)
                ranked = sorted(zip(squared.tolist(), candidates.tolist()))
                for k in range(1, 11):
                    got = same_class_knn(ds, query, k)
                    want = [row for _, row in ranked[: min(k, len(ranked))]]
                    assert got.indices.tolist() == want
                    want_d = np.sqrt([d2 for d2, _ in ranked[: len(want)]])
                    assert np.array_equal(got.distances, want_d)


def test_scores_match_confusion_oracle():
    def oracle(y_true, y_pred):
        classes = sorted(set(y_true) | set(y_pred))
        f1s, recalls = [], []
        for c in classes:
            tp = sum(1 for a, b in zip(y_true, y_pred) if a == c and b == c)
            fp = sum(1 for a, b in zip(y_true, y_pred) if a != c and b == c)
            fn = sum(1 for a, b in zip(y_true, y_pred) if a == c and b != c)
            f1s.append(2 * tp / (2 * tp + fp + fn) if tp + fp + fn else 0.0)
            if tp + fn:
                recalls.append(tp / (tp + fn))
        return sum(f1s) / len(f1s), sum(recalls) / len(recalls)

    with Budget(5.0):
        rng = np.random.default_rng(60)
        for _ in range(500):
            n = int(rng.integers(2, 101))
            m = int(rng.integers(2, 6))
            y_true = rng.integers(0, m, n)
            y_pred = rng.integers(0, m, n)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", MetricWarning)
                ours = f1_score(y_true, y_pred), balanced_accuracy(y_true, y_pred)
            want = oracle(y_true.tolist(), y_pred.tolist())
            assert abs(ours[0] - want[0]) <= 1e-12
            assert abs(ours[1] - want[1]) <= 1e-12


def test_worker_count_never_changes_the_output(tmp_path):
    with Budget(30.0):
        ds = make_skewed({0: 900, 1: 100}, 20, seed=5)
        params = AxelParams(k=5, t=4, theta=0.3, alpha=0.5, seed=42)
        blobs = []
        for workers in (1, 2, 8):
            out, _ = resample(ds, params, n_workers=workers)
            path = tmp_path / f"w{workers}.csv"
            export_csv(out, None, path)
            blobs.append(path.read_bytes())
        assert blobs[0] == blobs[1] == blobs[2]


def test_balance_contract_on_nine_to_one(skew90_10):
    with Budget(1.0):
        out, batch = resample(
            skew90_10, AxelParams(k=2, t=2, theta=0.4, alpha=0.4, seed=8)
        )
        assert class_counts(out.labels) == {0: 90, 1: 90}
        assert np.array_equal(out.features[:100], skew90_10.features)
        assert np.array_equal(out.labels[:100], skew90_10.labels)
        assert len(batch) == 80


def test_trivial_trait_space_converges_at_first_check():
    grid = init_grid(6, 3, 1, seed=0)
    report = run(grid, max_steps=1_000_000, check_interval=1000)
    assert report.converged
    assert report.steps_executed == 0
    assert report.region_count == 1


def test_small_lattice_always_absorbs_and_stays_absorbed():
    with Budget(60.0):
        for seed in range(20):
            grid = init_grid(5, 3, 2, seed=seed)
            report = run(grid, max_steps=1_000_000, check_interval=1000)
            assert report.converged, f"seed {seed} did not absorb"

            cells = grid.cells
            horizontal = (cells[:, :-1] == cells[:, 1:]).sum(axis=-1)
            vertical = (cells[:-1, :] == cells[1:, :]).sum(axis=-1)
            for shared in (horizontal, vertical):
                assert np.all((shared == 0) | (shared == 3))

            frozen = cells.copy()
            changed = any(step(grid) for _ in range(10_000))
            assert not changed
            assert np.array_equal(grid.cells, frozen)


def test_resampling_lifts_balanced_accuracy_on_gaussian_overlap():
    with Budget(60.0):
        rng = np.random.default_rng(20260814)
        majority = rng.normal([0.0, 0.0], 0.4, size=(500, 2))
        minority = rng.normal([1.0, 0.0], 0.4, size=(56, 2))
        raw = Dataset(
            features=np.vstack([majority, minority]),
            labels=np.array([0] * 500 + [1] * 56, dtype=np.int64),
        )
        ds, _ = normalize(raw)

        plain_scores, lifted_scores = [], []
        for seed in range(10):
            split_rng = derive_stream(seed, "acceptance-split")
            train_idx, test_idx = stratified_split(ds.labels, 0.2, split_rng)
            train = Dataset(
                features=ds.features[train_idx],
                labels=ds.labels[train_idx],
                normalized=True,
            )
            test_X = ds.features[test_idx]
            truth = ds.labels[test_idx]

            plain_scores.append(
                balanced_accuracy(truth, knn_classify(train, test_X, 3))
            )
            grown, _ = resample(
                train, AxelParams(k=2, t=2, theta=0.4, alpha=0.4, seed=seed)
            )
            lifted_scores.append(
                balanced_accuracy(truth, knn_classify(grown, test_X, 3))
            )

        plain = float(np.mean(plain_scores))
        lifted = float(np.mean(lifted_scores))
        assert lifted >= plain + 0.02, f"lift too small: {lifted} vs {plain}"


def test_csv_round_trip_is_faithful(tmp_path):
    with Budget(10.0):
        rng = np.random.default_rng(77)
        label_pool = ["ok", "a,b", 'q"uote', "semi;colon", "x"]
        for case in range(50):
            n = int(rng.integers(1, 61))
            d = int(rng.integers(1, 9))
            scale = 10.0 ** int(rng.integers(-3, 7))
            features = rng.normal(0.0, scale, (n, d))
            features[rng.random((n, d)) < 0.1] = np.nan
            ids = rng.integers(0, len(label_pool), n)
            ds = Dataset(features=features, labels=ids)
            mapping = {name: i for i, name in enumerate(label_pool)}

            path = tmp_path / f"case{case}.csv"
            export_csv(ds, mapping, path)
            back, back_ids = load_csv(path, CsvSchema("label"))

            assert back.features.shape == features.shape
            close = np.isclose(
                back.features, features, rtol=0.0, atol=1e-12, equal_nan=True
            )
            assert close.all()
            decode_old = {v: k for k, v in mapping.items()}
            decode_new = {v: k for k, v in back_ids.items()}
            assert [decode_old[int(c)] for c in ds.labels] == [
                decode_new[int(c)] for c in back.labels
            ]
