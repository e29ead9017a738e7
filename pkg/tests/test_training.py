import numpy as np
import pytest

from qperceptron.data import aggregate, gen_noisy_2d, gen_teacher_student, gen_xor
from qperceptron.models import (
    ClassicalPerceptron,
    EntangledPerceptron,
    QubitPerceptron,
    entangled_loss_grad,
    qubit_loss_grad,
)
from qperceptron.training import ConfigError, DivergenceError, TrainConfig, TrainReport, train


class TestTrainConfig:
    def test_defaults(self):
        cfg = TrainConfig()
        assert cfg.learning_rate == 0.01
        assert cfg.loss_delta_threshold == 1e-7
        assert cfg.max_iterations == 200_000
        assert not cfg.record_trajectory

    @pytest.mark.parametrize("kwargs", [
        {"learning_rate": 0.0},
        {"learning_rate": -0.1},
        {"loss_delta_threshold": 0.0},
        {"max_iterations": 0},
    ])
    def test_invalid_values_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            TrainConfig(**kwargs)


class TestDescent:
    def test_noisy_2d_loss_decreases_monotonically(self):
        data = aggregate(gen_noisy_2d(40, 0.3, {(1, -1), (-1, -1)}, seed=0))
        cfg = TrainConfig(record_trajectory=True, loss_delta_threshold=1e-6)
        for model in (ClassicalPerceptron.zeros(2), QubitPerceptron.zeros(2)):
            _, report = train(model, data, cfg)
            traj = np.asarray(report.loss_trajectory)
            assert report.converged
            assert np.all(np.diff(traj) <= 0.0)
            assert report.final_loss == pytest.approx(traj[-1])

    def test_qubit_on_pure_labels_uses_z_fields_only(self):
        # fully consistent labels: the x/y drives vanish and only w^z grows
        samples, _ = gen_teacher_student(40, 3, 1, seed=7)
        data = aggregate(samples)
        model, report = train(QubitPerceptron.zeros(3), data,
                              TrainConfig(max_iterations=2_000))
        assert np.linalg.norm(model.wx) < 1e-10
        assert np.linalg.norm(model.wy) < 1e-10
        assert np.linalg.norm(model.wz) > 0.1

    def test_reports_iteration_cap(self):
        data = aggregate(gen_teacher_student(40, 3, 1, seed=7)[0])
        _, report = train(QubitPerceptron.zeros(3), data,
                          TrainConfig(max_iterations=5))
        assert not report.converged
        assert report.iterations == 5

    def test_compiled_and_generic_paths_agree(self):
        data = aggregate(gen_noisy_2d(10, 0.3, {(1, -1)}, seed=3))
        cfg_fast = TrainConfig(loss_delta_threshold=1e-6, max_iterations=20_000)
        cfg_slow = TrainConfig(loss_delta_threshold=1e-6, max_iterations=20_000,
                               record_trajectory=True)
        for model in (ClassicalPerceptron.zeros(2), QubitPerceptron.zeros(2)):
            fast_model, fast = train(model, data, cfg_fast)
            slow_model, slow = train(model, data, cfg_slow)
            assert fast.iterations == slow.iterations
            assert fast.converged == slow.converged
            assert fast.final_loss == pytest.approx(slow.final_loss, abs=1e-12)
            assert np.allclose(fast_model.params, slow_model.params, atol=1e-10)

    def test_training_is_deterministic(self):
        data = aggregate(gen_teacher_student(60, 4, 2, seed=9)[0])
        runs = [train(QubitPerceptron.zeros(4, bias=False), data)
                for _ in range(2)]
        assert np.array_equal(runs[0][0].params, runs[1][0].params)
        assert runs[0][1].iterations == runs[1][1].iterations

    def test_converged_loss_delta_below_threshold(self):
        data = aggregate(gen_noisy_2d(40, 0.3, {(1, -1), (-1, -1)}, seed=0))
        thr = 1e-7
        model, report = train(QubitPerceptron.zeros(2), data,
                              TrainConfig(loss_delta_threshold=thr))
        assert report.converged
        before = qubit_loss_grad(model, data)
        after = qubit_loss_grad(model.with_params(model.params - 0.01 * before.grad), data)
        assert abs(after.loss - before.loss) < thr

    def test_divergence_raises(self):
        from qperceptron.data import AggregatedDataset

        data = AggregatedDataset(patterns=np.array([[1e200, 1e200], [-1e200, 1e200]]),
                                 counts=np.array([3, 5]),
                                 label_mean=np.array([0.5, -0.5]), total=8)
        for model in (ClassicalPerceptron.zeros(2), QubitPerceptron.zeros(2)):
            with pytest.raises(DivergenceError):
                train(model, data, TrainConfig(max_iterations=100))

    def test_entangled_model_trains_through_generic_loop(self):
        data = aggregate(gen_xor(5))
        model = EntangledPerceptron.random(2, seed=0)
        start = entangled_loss_grad(model, data).loss
        trained, report = train(model, data, TrainConfig(learning_rate=0.05,
                                                         loss_delta_threshold=1e-6,
                                                         max_iterations=5_000))
        assert report.final_loss < start
        assert isinstance(report, TrainReport)
