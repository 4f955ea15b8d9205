"""Joint training of the adaptation network with Adam, plus prediction,
latent export and supervised fine-tuning.

Each epoch re-duplicates the target set to the source size, reshuffles both
domains with an epoch-derived seed and walks paired batches; every batch
does one forward/backward pass and one Adam step. Everything is a pure
function of (datasets, config), so a fixed seed reproduces each output bit.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from . import network
from .data import (
    apply_standardizer,
    duplicate_to_balance,
    fit_standardizer,
    identity_stats,
)
from .errors import DimensionError, ParameterError
from .losses import KernelSpec
from .network import DenseLayer, Gradients, ModelParams

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

HIDDEN_DIM = 64


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters; the defaults are the published training recipe."""

    latent_dim: int = 32
    lambda1: float = 0.1
    lambda2: float = 0.1
    lr: float = 0.001
    epochs: int = 60
    batch_size: int = 128
    kernel: KernelSpec = field(default_factory=KernelSpec)
    seed: int = 0
    standardize: bool = True

    def __post_init__(self):
        if self.latent_dim < 1 or self.batch_size < 2:
            raise ParameterError("latent_dim must be >= 1 and batch_size >= 2")
        if self.lambda1 < 0 or self.lambda2 < 0 or self.lr <= 0 or self.epochs < 0:
            raise ParameterError("invalid training hyperparameters")


@dataclass(frozen=True)
class AdamState:
    """First/second moment accumulators and the step counter."""

    m: Gradients
    v: Gradients
    t: int = 0


@dataclass(frozen=True)
class TrainHistory:
    """Per-epoch mean losses: mmd, cls, recon and the weighted total."""

    epochs: list

    def __len__(self):
        return len(self.epochs)


def _zeros_like_params(params):
    pairs = {
        name: (np.zeros_like(layer.w), np.zeros_like(layer.b))
        for name, layer in params.layers().items()
    }
    return Gradients(**pairs)


def init_adam(params):
    return AdamState(m=_zeros_like_params(params), v=_zeros_like_params(params))


def adam_step(params, grads, state, lr):
    """One bias-corrected Adam update; returns new params and state."""
    t = state.t + 1
    new_layers = {}
    new_m = {}
    new_v = {}
    for name, layer in params.layers().items():
        gw, gb = grads.layers()[name]
        if gw.shape != layer.w.shape or gb.shape != layer.b.shape:
            raise DimensionError(f"gradient shape mismatch in layer {name!r}")
        mw, mb = state.m.layers()[name]
        vw, vb = state.v.layers()[name]
        mw = ADAM_BETA1 * mw + (1.0 - ADAM_BETA1) * gw
        mb = ADAM_BETA1 * mb + (1.0 - ADAM_BETA1) * gb
        vw = ADAM_BETA2 * vw + (1.0 - ADAM_BETA2) * gw**2
        vb = ADAM_BETA2 * vb + (1.0 - ADAM_BETA2) * gb**2
        corr1 = 1.0 - ADAM_BETA1**t
        corr2 = 1.0 - ADAM_BETA2**t
        w = layer.w - lr * (mw / corr1) / (np.sqrt(vw / corr2) + ADAM_EPS)
        b = layer.b - lr * (mb / corr1) / (np.sqrt(vb / corr2) + ADAM_EPS)
        new_layers[name] = DenseLayer(w=w, b=b, activation=layer.activation)
        new_m[name] = (mw, mb)
        new_v[name] = (vw, vb)
    new_params = ModelParams(d=params.d, h=params.h, m=params.m, **new_layers)
    return new_params, AdamState(m=Gradients(**new_m), v=Gradients(**new_v), t=t)


def _epoch_seed(base_seed, epoch, salt):
    ss = np.random.SeedSequence([int(base_seed) & 0xFFFFFFFF, salt, epoch])
    return int(ss.generate_state(1)[0])


def _batch_slices(n, batch_size):
    """Batch index ranges; a trailing partial batch survives only with >= 2 rows."""
    edges = list(range(0, n, batch_size))
    slices = []
    for start in edges:
        stop = min(start + batch_size, n)
        if stop - start >= 2:
            slices.append((start, stop))
    return slices


def train(source, target, cfg):
    """Jointly train classifier, decoder and alignment on a domain pair.

    The source must be fully labeled; the target may be unlabeled. Returns
    (params, stats, history) where stats is the source-fit standardizer
    (identity when standardization is disabled).
    """
    if source.feature_count != target.feature_count:
        raise DimensionError(
            f"feature counts differ: {source.feature_count} vs {target.feature_count}"
        )
    y_src_all = source.labels_strict()
    if len(target) == 0:
        raise ParameterError("target dataset is empty")

    if cfg.standardize:
        stats = fit_standardizer(source)
    else:
        stats = identity_stats(source.feature_count)
    src_std = apply_standardizer(source, stats)
    tgt_std = apply_standardizer(target, stats)
    x_src_all = src_std.features()

    params = network.init_params(source.feature_count, HIDDEN_DIM, cfg.latent_dim, cfg.seed)
    state = init_adam(params)
    history = []

    n = len(source)
    for epoch in range(cfg.epochs):
        balanced = duplicate_to_balance(tgt_std, n, _epoch_seed(cfg.seed, epoch, 1))
        x_tgt_all = balanced.features()
        rng = np.random.default_rng(_epoch_seed(cfg.seed, epoch, 2))
        src_order = rng.permutation(n)
        tgt_order = rng.permutation(n)

        sums = {"mmd": 0.0, "cls": 0.0, "recon": 0.0, "total": 0.0}
        slices = _batch_slices(n, cfg.batch_size)
        for start, stop in slices:
            si = src_order[start:stop]
            ti = tgt_order[start:stop]
            cache = network.forward(params, x_src_all[si], x_tgt_all[ti])
            parts, grads = network.backward(
                params, cache, y_src_all[si], cfg.lambda1, cfg.lambda2, cfg.kernel
            )
            params, state = adam_step(params, grads, state, cfg.lr)
            for key in ("mmd", "cls", "recon"):
                sums[key] += parts[key]
            sums["total"] += network.total_from_parts(parts, cfg.lambda1, cfg.lambda2)
        count = max(len(slices), 1)
        history.append({key: value / count for key, value in sums.items()})

    return params, stats, TrainHistory(epochs=history)


def predict(params, stats, ds, threshold=0.5):
    """Probabilities and thresholded labels for every sample in ds."""
    if ds.feature_count != params.d:
        raise DimensionError(
            f"dataset has {ds.feature_count} features, model expects {params.d}"
        )
    if len(ds) == 0:
        return np.zeros(0), np.zeros(0, dtype=int)
    x = apply_standardizer(ds, stats).features()
    _, xw = network.attention_forward(params, x)
    z = network.encode(params, xw)
    probs = network.classify(params, z)
    labels = (probs >= threshold).astype(int)
    return probs, labels


def attention_weights(params, stats, ds):
    """Per-sample attention vectors for a dataset (rows sum to 1)."""
    if len(ds) == 0:
        return np.zeros((0, params.d))
    x = apply_standardizer(ds, stats).features()
    w, _ = network.attention_forward(params, x)
    return w


def latent_codes(params, stats, ds):
    """Latent representations of every sample in ds."""
    if len(ds) == 0:
        return np.zeros((0, params.m))
    x = apply_standardizer(ds, stats).features()
    _, xw = network.attention_forward(params, x)
    return network.encode(params, xw)


def export_latent(params, stats, ds, path):
    """Write `subject_id,domain,label,z_1..z_m` latent codes as CSV."""
    z = latent_codes(params, stats, ds)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["subject_id", "domain", "label"] + [f"z_{j + 1}" for j in range(params.m)]
        )
        for sample, row in zip(ds.samples, z):
            label = "NA" if sample.label is None else str(sample.label)
            writer.writerow(
                [sample.subject_id, sample.domain, label] + [repr(float(v)) for v in row]
            )


def finetune(params, labeled_target, cfg, stats=None):
    """Continue training with cross-entropy only on labeled target data.

    Alignment and reconstruction are switched off (their gradients are
    exactly zero, so decoder weights stay untouched); Adam restarts fresh.
    """
    y = labeled_target.labels_strict()
    if labeled_target.feature_count != params.d:
        raise DimensionError(
            f"dataset has {labeled_target.feature_count} features, model expects {params.d}"
        )
    if stats is None:
        stats = identity_stats(params.d)
    x_all = apply_standardizer(labeled_target, stats).features()
    n = len(labeled_target)
    state = init_adam(params)
    for epoch in range(cfg.epochs):
        rng = np.random.default_rng(_epoch_seed(cfg.seed, epoch, 3))
        order = rng.permutation(n)
        for start, stop in _batch_slices(n, cfg.batch_size):
            idx = order[start:stop]
            cache = network.forward(params, x_all[idx], x_all[idx])
            _, grads = network.backward(
                params, cache, y[idx], 0.0, cfg.lambda2, cfg.kernel, recon_weight=0.0
            )
            params, state = adam_step(params, grads, state, cfg.lr)
    return params
