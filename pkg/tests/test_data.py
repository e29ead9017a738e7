import numpy as np
import pytest

from qperceptron.data import (
    DimensionMismatchError,
    EmptyDatasetError,
    Sample,
    aggregate,
    data_density,
    flip_labels,
    gen_appendix_problems,
    gen_noisy_2d,
    gen_teacher_student,
    gen_xor,
    read_samples_csv,
    split_train_test,
    write_samples_csv,
)


class TestAggregate:
    def test_counts_and_label_mean(self):
        samples = [Sample((1, 1), -1)] * 7 + [Sample((1, 1), 1)] * 3
        agg = aggregate(samples)
        assert agg.total == 10
        assert agg.counts.tolist() == [10]
        assert agg.label_mean[0] == pytest.approx(-0.4)

    def test_single_sample(self):
        agg = aggregate([Sample((1, -1), 1)])
        assert agg.label_mean[0] == 1.0
        assert agg.weight[0] == 1.0

    def test_empty_rejected(self):
        with pytest.raises(EmptyDatasetError):
            aggregate([])

    def test_mixed_dims_rejected(self):
        with pytest.raises(DimensionMismatchError):
            aggregate([Sample((1,), 1), Sample((1, 1), 1)])

    def test_permutation_invariance(self):
        rng = np.random.default_rng(0)
        samples = gen_noisy_2d(40, 0.3, {(1, -1), (-1, -1)}, seed=3)
        shuffled = [samples[i] for i in rng.permutation(len(samples))]
        a, b = aggregate(samples), aggregate(shuffled)
        assert np.array_equal(a.patterns, b.patterns)
        assert np.array_equal(a.counts, b.counts)
        assert np.array_equal(a.label_mean, b.label_mean)

    def test_weights_sum_to_one_and_global_mean(self):
        samples = gen_noisy_2d(13, 0.4, {(1, 1)}, seed=5)
        agg = aggregate(samples)
        assert agg.weight.sum() == pytest.approx(1.0, abs=1e-12)
        overall = np.mean([s.y for s in samples])
        assert np.sum(agg.weight * agg.label_mean) == pytest.approx(overall, abs=1e-12)


class TestDataDensity:
    def test_b_minus_04(self):
        eta = data_density(-0.4)
        assert eta[0, 0] == pytest.approx(0.3)
        assert eta[1, 1] == pytest.approx(0.7)
        assert eta[0, 1] == pytest.approx(np.sqrt(0.21))

    def test_pure_label(self):
        assert np.allclose(data_density(1.0), np.diag([1.0, 0.0]))

    def test_maximal_noise(self):
        assert np.allclose(data_density(0.0), np.full((2, 2), 0.5))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            data_density(1.2)

    def test_trace_one_rank_one(self):
        for b in np.linspace(-1, 1, 21):
            eta = data_density(b)
            assert np.trace(eta) == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.det(eta) == pytest.approx(0.0, abs=1e-12)
            assert np.all(eta >= 0)


class TestNoisy2D:
    def test_fig1_statistics(self):
        samples = gen_noisy_2d(40, 0.3, {(1, -1), (-1, -1)}, seed=0)
        assert len(samples) == 160
        agg = aggregate(samples)
        # patterns sort lexicographically: (-1,-1), (-1,1), (1,-1), (1,1)
        assert agg.label_mean.tolist() == [-0.4, 1.0, -0.4, -1.0]
        for pat in ((1, -1), (-1, -1)):
            labels = [s.y for s in samples if s.x == pat]
            assert labels.count(1) == 12 and labels.count(-1) == 28

    def test_no_noise_single_copy(self):
        samples = gen_noisy_2d(1, 0.0, set(), seed=0)
        assert [(s.x, s.y) for s in samples] == [
            ((1, 1), -1), ((1, -1), -1), ((-1, 1), 1), ((-1, -1), -1)]

    def test_duplication_keeps_b(self):
        agg = aggregate(gen_noisy_2d(40, 0.0, set(), seed=0))
        assert agg.label_mean.tolist() == [-1.0, 1.0, -1.0, -1.0]


class TestTeacherStudent:
    def test_sizes_and_duplicates(self):
        samples, teacher = gen_teacher_student(600, 8, 5, seed=1)
        assert len(samples) == 3000
        assert teacher.shape == (8,)
        agg = aggregate(samples)
        assert np.all(agg.counts % 5 == 0)

    def test_labels_are_pure_before_noise(self):
        samples, _ = gen_teacher_student(100, 6, 3, seed=2)
        agg = aggregate(samples)
        assert set(agg.label_mean.tolist()) <= {-1.0, 1.0}

    def test_deterministic(self):
        a, ta = gen_teacher_student(50, 4, 2, seed=9)
        b, tb = gen_teacher_student(50, 4, 2, seed=9)
        assert a == b and np.array_equal(ta, tb)


class TestFlipAndSplit:
    def test_flip_zero_is_identity(self):
        samples, _ = gen_teacher_student(30, 4, 2, seed=0)
        assert flip_labels(samples, 0.0, seed=1) == samples

    def test_flip_counts(self):
        samples, _ = gen_teacher_student(600, 8, 4, seed=0)
        flipped = flip_labels(samples, 0.5, seed=1)
        changed = sum(a.y != b.y for a, b in zip(samples, flipped))
        assert changed == 1200

    def test_flip_is_involution_with_same_seed(self):
        samples, _ = gen_teacher_student(40, 5, 1, seed=3)
        twice = flip_labels(flip_labels(samples, 0.3, seed=7), 0.3, seed=7)
        assert twice == samples

    def test_split_sizes(self):
        samples, _ = gen_teacher_student(600, 8, 5, seed=4)
        train, test = split_train_test(samples, 0.8, seed=0)
        assert len(train) == 2400 and len(test) == 600

    def test_split_floor_rule(self):
        samples, _ = gen_teacher_student(10, 3, 1, seed=4)
        train, test = split_train_test(samples, 0.99, seed=0)
        assert len(train) == 9 and len(test) == 1

    def test_split_is_partition(self):
        samples, _ = gen_teacher_student(25, 4, 2, seed=5)
        train, test = split_train_test(samples, 0.8, seed=2)
        assert sorted(train + test, key=repr) == sorted(samples, key=repr)


class TestXorAndAppendix:
    def test_xor_truth_table(self):
        samples = gen_xor(1)
        assert len(samples) == 4
        for s in samples:
            assert s.y == (1 if s.x[0] != s.x[1] else -1)

    def test_xor_copies_pure(self):
        agg = aggregate(gen_xor(40))
        assert set(np.abs(agg.label_mean)) == {1.0}
        for b in agg.label_mean:
            eta = data_density(b)
            assert np.linalg.det(eta) == pytest.approx(0.0, abs=1e-12)
            assert sorted(np.diag(eta)) == [0.0, 1.0]

    def test_noisy_xor_bottom_statistics(self):
        agg = aggregate(gen_appendix_problems("noisy-xor", seed=0))
        stats = dict(zip(map(tuple, agg.patterns), agg.label_mean))
        assert stats[(1.0, -1.0)] == pytest.approx(0.4)
        assert stats[(-1.0, -1.0)] == pytest.approx(-0.4)
        assert stats[(1.0, 1.0)] == -1.0 and stats[(-1.0, 1.0)] == 1.0

    def test_ellipse_layout(self):
        agg = aggregate(gen_appendix_problems("ellipse", seed=0))
        minus = agg.patterns[agg.label_mean < 0]
        assert len(minus) == 1 and tuple(minus[0]) == (0.0, 0.0)
        assert np.sum(agg.label_mean > 0) >= 4

    def test_parallel_lines_linearly_separable(self):
        agg = aggregate(gen_appendix_problems("parallel-lines", seed=0))
        # separated by the horizontal line x1 = -1/2
        signs = np.sign(agg.patterns[:, 1] + 0.5)
        assert np.array_equal(signs, agg.label_mean)

    def test_unknown_problem(self):
        with pytest.raises(ValueError):
            gen_appendix_problems("circle")


class TestCsvRoundTrip:
    def test_round_trip(self, tmp_path):
        samples = gen_noisy_2d(5, 0.4, {(1, 1)}, seed=0)
        path = tmp_path / "dataset.csv"
        write_samples_csv(path, samples)
        header = path.read_text().splitlines()[0]
        assert header == "x0,x1,y"
        assert read_samples_csv(path) == samples
