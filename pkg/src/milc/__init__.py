"""Mutual-information objectives, bounds, and oracles for classifiers.

The package centers on one identity: a classifier's plug-in mutual
information is the entropy of its predicted label marginal minus the mean
conditional entropy of its per-example predictions. ``losses`` turns that
identity into training objectives with analytic gradients, ``nn`` and
``harness`` train a small dense network against them, ``bounds`` converts
information quantities into error-probability lower bounds, and ``gauss``
supplies a closed-form two-class Gaussian testbed with independent
Monte-Carlo and quadrature oracles.
"""

from .batchstats import (
    empirical_label_dist,
    mi_estimate,
    naive_empirical_mi,
    one_hot_targets,
    predicted_marginal,
    smoothed_targets,
)
from .bounds import (
    BoundPoint,
    binary_entropy_quadratic_bound,
    bound_curve,
    classical_fano_lower_bound,
    fano_lower_bound,
    gauss_error_lower_bound,
)
from .data import (
    Dataset,
    IdxFormatError,
    LabeledBatch,
    batch_iter,
    load_idx_dataset,
    load_idx_images,
    load_idx_labels,
    normalize,
    read_gauss_dataset,
    read_metrics_csv,
    write_gauss_dataset,
    write_metrics_csv,
)
from .estimator import MlpClassifier
from .gauss import (
    GaussBinaryModel,
    label_entropy_nats,
    mc_mi,
    mi_bounds,
    posterior,
    quad_form_expectation,
    quadrature_mi_1d,
    sample,
)
from .harness import EpochMetrics, TrainConfig, evaluate, train
from .info import (
    LN2,
    convert,
    cross_entropy,
    entropy,
    entropy_gap_bounds,
    kl_divergence,
)
from .losses import (
    LOSS_KINDS,
    LossConfig,
    LossOutput,
    cel_loss,
    compute_loss,
    mil_loss,
    softmax,
    variant_loss,
)
from .nn import (
    MlpModel,
    backward,
    count_params,
    forward,
    init_mlp,
    load_checkpoint,
    predict,
    save_checkpoint,
    sgd_step,
)
from .validation import NumericError

__version__ = "0.1.0"

__all__ = [
    "LN2",
    "LOSS_KINDS",
    "BoundPoint",
    "Dataset",
    "EpochMetrics",
    "GaussBinaryModel",
    "IdxFormatError",
    "LabeledBatch",
    "LossConfig",
    "LossOutput",
    "MlpClassifier",
    "MlpModel",
    "NumericError",
    "TrainConfig",
    "backward",
    "batch_iter",
    "binary_entropy_quadratic_bound",
    "bound_curve",
    "cel_loss",
    "classical_fano_lower_bound",
    "compute_loss",
    "convert",
    "count_params",
    "cross_entropy",
    "empirical_label_dist",
    "entropy",
    "entropy_gap_bounds",
    "evaluate",
    "fano_lower_bound",
    "forward",
    "gauss_error_lower_bound",
    "init_mlp",
    "kl_divergence",
    "label_entropy_nats",
    "load_checkpoint",
    "load_idx_dataset",
    "load_idx_images",
    "load_idx_labels",
    "mc_mi",
    "mi_bounds",
    "mi_estimate",
    "mil_loss",
    "naive_empirical_mi",
    "normalize",
    "one_hot_targets",
    "posterior",
    "predict",
    "predicted_marginal",
    "quad_form_expectation",
    "quadrature_mi_1d",
    "read_gauss_dataset",
    "read_metrics_csv",
    "sample",
    "save_checkpoint",
    "sgd_step",
    "smoothed_targets",
    "softmax",
    "train",
    "variant_loss",
    "write_gauss_dataset",
    "write_metrics_csv",
]
