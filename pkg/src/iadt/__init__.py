"""Attention-weighted autoencoder with domain transfer for tabular
brain-ROI features, plus classical domain-adaptation baselines and an
evaluation toolkit.
"""

from .data import (
    Dataset,
    FeatureStats,
    Sample,
    apply_standardizer,
    by_domain,
    dataset_from_arrays,
    duplicate_to_balance,
    fit_standardizer,
    load_csv,
    split_stratified,
    synth_domains,
    write_csv,
)
from .evaluation import (
    Confusion,
    MetricsReport,
    RoiRanking,
    auc,
    bootstrap_metric,
    confusion,
    evaluate_predictions,
    metrics,
    paired_ttest,
    rank_rois,
)
from .losses import KernelSpec, cross_entropy, l1_recon, mmd_sq, mmd_sq_grad, total_loss
from .network import (
    ForwardCache,
    Gradients,
    ModelParams,
    attention_forward,
    backward,
    classify,
    decode,
    encode,
    forward,
    init_params,
    load_model,
    save_model,
)
from .roi_names import AAL90, aal90_names
from .training import (
    AdamState,
    TrainConfig,
    TrainHistory,
    adam_step,
    export_latent,
    finetune,
    predict,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "AAL90",
    "AdamState",
    "Confusion",
    "Dataset",
    "FeatureStats",
    "ForwardCache",
    "Gradients",
    "KernelSpec",
    "MetricsReport",
    "ModelParams",
    "RoiRanking",
    "Sample",
    "TrainConfig",
    "TrainHistory",
    "aal90_names",
    "adam_step",
    "apply_standardizer",
    "attention_forward",
    "auc",
    "backward",
    "bootstrap_metric",
    "by_domain",
    "classify",
    "confusion",
    "cross_entropy",
    "dataset_from_arrays",
    "decode",
    "duplicate_to_balance",
    "encode",
    "evaluate_predictions",
    "export_latent",
    "finetune",
    "fit_standardizer",
    "forward",
    "init_params",
    "l1_recon",
    "load_csv",
    "load_model",
    "metrics",
    "mmd_sq",
    "mmd_sq_grad",
    "paired_ttest",
    "predict",
    "rank_rois",
    "save_model",
    "split_stratified",
    "synth_domains",
    "total_loss",
    "train",
    "write_csv",
]
