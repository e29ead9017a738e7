"""Density-matrix perceptrons: quantum log-likelihood training of qubit classifiers."""

from .analysis import (
    ExpectationGrid,
    entangled_delta,
    entangled_quadric_residual,
    expectation_grid,
    qubit_equal_prob_residual,
    qubit_separation_residual,
    single_qubit_delta,
)
from .data import (
    AggregatedDataset,
    Sample,
    aggregate,
    data_density,
    flip_labels,
    gen_appendix_problems,
    gen_noisy_2d,
    gen_teacher_student,
    gen_xor,
    split_train_test,
)
from .linalg import BlochState, FieldVector, bloch_from_field, herm2_eigh, herm2_log, pauli
from .models import (
    ClassicalPerceptron,
    EntangledPerceptron,
    LossGrad,
    QubitPerceptron,
    classical_loss_grad,
    entangled_loss,
    entangled_loss_grad,
    entangled_predict,
    entangled_rho,
    model_from_json,
    model_to_json,
    mse,
    qubit_loss_grad,
    qubit_loss_trace_oracle,
    qubit_predict,
)
from .training import DivergenceError, TrainConfig, TrainReport, train

__version__ = "0.1.0"
