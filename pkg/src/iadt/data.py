"""Dataset ingestion and preparation for tabular ROI features.

The on-disk format is a UTF-8 CSV with header
``subject_id,domain,label,<name_1>,...,<name_k>``, one row per subject,
``domain`` in {source, target} (case-insensitive) and ``label`` in
{0, 1, NA}. Row numbers in error messages count data rows, header excluded.
"""

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionError, ParameterError, ParseError
from .roi_names import AAL90

SD_FLOOR = 1e-8

_DOMAINS = ("source", "target")


@dataclass(frozen=True)
class Sample:
    """One subject: id, domain tag, optional binary label, feature vector."""

    subject_id: str
    domain: str
    label: int | None
    features: np.ndarray

    def __post_init__(self):
        if self.domain not in _DOMAINS:
            raise ParameterError(f"unknown domain {self.domain!r}")
        if self.label is not None and self.label not in (0, 1):
            raise ParameterError(f"label must be 0/1/None, got {self.label!r}")
        feats = np.asarray(self.features, dtype=np.float64)
        if feats.ndim != 1 or not np.all(np.isfinite(feats)):
            raise ParameterError("features must be a finite 1-D vector")
        object.__setattr__(self, "features", feats)


@dataclass(frozen=True)
class Dataset:
    """A list of samples sharing one feature space."""

    feature_names: list[str]
    samples: list[Sample]
    standardized: bool = False

    def __post_init__(self):
        names = list(self.feature_names)
        if len(set(names)) != len(names):
            raise ParameterError("feature names must be unique")
        k = len(names)
        for s in self.samples:
            if s.features.shape[0] != k:
                raise DimensionError(
                    f"sample {s.subject_id!r} has {s.features.shape[0]} features, expected {k}"
                )
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "samples", list(self.samples))

    def __len__(self):
        return len(self.samples)

    @property
    def feature_count(self):
        return len(self.feature_names)

    def features(self):
        """Stacked feature matrix, shape (n_samples, n_features)."""
        if not self.samples:
            return np.zeros((0, self.feature_count))
        return np.stack([s.features for s in self.samples])

    def labels(self):
        """Label vector with NaN for unlabeled samples."""
        return np.array(
            [np.nan if s.label is None else float(s.label) for s in self.samples]
        )

    def labels_strict(self):
        """Label vector; raises if any sample is unlabeled."""
        y = self.labels()
        if np.isnan(y).any():
            bad = [s.subject_id for s, v in zip(self.samples, y) if np.isnan(v)]
            raise ParameterError(f"unlabeled samples present: {bad[:5]}")
        return y

    def subject_ids(self):
        return [s.subject_id for s in self.samples]


def dataset_from_arrays(x, y=None, domain="source", ids=None, feature_names=None,
                        standardized=False):
    """Build a Dataset from a feature matrix and optional labels.

    90-dimensional data defaults to the AAL region names; other widths get
    generic ``roi_i`` names.
    """
    x = np.asarray(x, dtype=np.float64)
    n, k = x.shape
    if feature_names is None:
        feature_names = list(AAL90) if k == 90 else [f"roi_{i + 1}" for i in range(k)]
    if ids is None:
        ids = [f"{domain[:3]}_{i:04d}" for i in range(n)]
    y_arr = None if y is None else np.asarray(y, dtype=np.float64)
    samples = []
    for i in range(n):
        label = None if y_arr is None or np.isnan(y_arr[i]) else int(y_arr[i])
        samples.append(Sample(ids[i], domain, label, x[i]))
    return Dataset(feature_names, samples, standardized=standardized)


def by_domain(ds):
    """Split a mixed dataset into (source, target) datasets."""
    src = [s for s in ds.samples if s.domain == "source"]
    tgt = [s for s in ds.samples if s.domain == "target"]
    return (
        Dataset(ds.feature_names, src, standardized=ds.standardized),
        Dataset(ds.feature_names, tgt, standardized=ds.standardized),
    )


@dataclass(frozen=True)
class FeatureStats:
    """Per-feature mean and sample standard deviation (floored at 1e-8)."""

    means: np.ndarray
    sds: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64)
        sds = np.asarray(self.sds, dtype=np.float64)
        if means.shape != sds.shape or means.ndim != 1:
            raise DimensionError("means and sds must be 1-D vectors of equal length")
        if np.any(sds < SD_FLOOR):
            raise ParameterError(f"sds must be >= {SD_FLOOR}")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sds", sds)


def identity_stats(k):
    """Stats that leave features unchanged (used when standardization is off)."""
    return FeatureStats(means=np.zeros(k), sds=np.ones(k))


def load_csv(path):
    """Parse a dataset file, validating header, domains, labels and features."""
    try:
        return _load_csv(path)
    except (UnicodeDecodeError, csv.Error) as exc:
        raise ParseError(f"{path}: not a readable CSV file ({exc})") from None


def _load_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if len(header) < 4 or header[:3] != ["subject_id", "domain", "label"]:
            raise ParseError(
                f"{path}: header must start with subject_id,domain,label followed by feature names"
            )
        feature_names = header[3:]
        if len(set(feature_names)) != len(feature_names):
            raise ParseError(f"{path}: duplicate feature names in header")
        samples = []
        seen = set()
        for row_idx, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: row {row_idx} has {len(row)} fields, expected {len(header)}"
                )
            subject_id, domain_raw, label_raw = row[0], row[1], row[2]
            domain = domain_raw.strip().lower()
            if domain not in _DOMAINS:
                raise ParseError(
                    f"{path}: row {row_idx}, column domain: unknown domain {domain_raw!r}"
                )
            label_token = label_raw.strip()
            if label_token.upper() == "NA":
                label = None
            elif label_token in ("0", "1"):
                label = int(label_token)
            else:
                raise ParseError(
                    f"{path}: row {row_idx}, column label: expected 0, 1 or NA, got {label_raw!r}"
                )
            key = (domain, subject_id)
            if key in seen:
                raise ParseError(
                    f"{path}: row {row_idx}, column subject_id: duplicate id {subject_id!r} in domain {domain}"
                )
            seen.add(key)
            feats = np.empty(len(feature_names))
            for j, token in enumerate(row[3:]):
                try:
                    feats[j] = float(token)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {row_idx}, column {feature_names[j]}: "
                        f"non-numeric feature value {token!r}"
                    ) from None
            if not np.all(np.isfinite(feats)):
                j = int(np.argmax(~np.isfinite(feats)))
                raise ParseError(
                    f"{path}: row {row_idx}, column {feature_names[j]}: non-finite feature value"
                )
            samples.append(Sample(subject_id, domain, label, feats))
    return Dataset(feature_names, samples)


def write_csv(ds, path):
    """Write a dataset in the canonical CSV format (round-trips via load_csv)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subject_id", "domain", "label"] + list(ds.feature_names))
        for s in ds.samples:
            label = "NA" if s.label is None else str(s.label)
            writer.writerow(
                [s.subject_id, s.domain, label] + [repr(float(v)) for v in s.features]
            )


def fit_standardizer(ds):
    """Per-feature mean and n-1 standard deviation of a dataset."""
    if len(ds) < 2:
        raise ParameterError("standardizer needs at least 2 samples")
    x = ds.features()
    means = x.mean(axis=0)
    sds = np.maximum(x.std(axis=0, ddof=1), SD_FLOOR)
    return FeatureStats(means=means, sds=sds)


def apply_standardizer(ds, stats):
    """Return a copy of the dataset with features replaced by z-scores."""
    if stats.means.shape[0] != ds.feature_count:
        raise DimensionError(
            f"stats cover {stats.means.shape[0]} features, dataset has {ds.feature_count}"
        )
    samples = [
        replace(s, features=(s.features - stats.means) / stats.sds) for s in ds.samples
    ]
    return Dataset(ds.feature_names, samples, standardized=True)


def duplicate_to_balance(target, n_source, seed):
    """Enlarge the target set to exactly n_source samples by cycled duplication.

    The sample list is shuffled once (seeded) and then cycled, so per-sample
    copy counts differ by at most one. Subject ids are preserved.
    """
    if len(target) == 0:
        raise ParameterError("cannot duplicate an empty target dataset")
    if n_source < len(target):
        raise ParameterError(
            f"n_source ({n_source}) must be >= target size ({len(target)})"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(target))
    samples = [target.samples[order[i % len(target)]] for i in range(n_source)]
    return Dataset(target.feature_names, samples, standardized=target.standardized)


def split_stratified(ds, fraction, seed):
    """Split a fully labeled dataset into (taken, rest), stratified by class.

    The first part receives ceil(fraction * n_c) samples of each class c,
    drawn by a seeded shuffle. Parts are disjoint and their union is ds.
    """
    if not (0.0 < fraction < 1.0):
        raise ParameterError(f"fraction must be in (0, 1), got {fraction}")
    y = ds.labels_strict()
    rng = np.random.default_rng(seed)
    take_idx = []
    for cls in (0, 1):
        idx = np.flatnonzero(y == cls)
        if idx.size == 0:
            continue
        count = int(np.ceil(fraction * idx.size))
        take_idx.extend(rng.permutation(idx)[:count].tolist())
    take_set = set(take_idx)
    taken = [ds.samples[i] for i in sorted(take_set)]
    rest = [ds.samples[i] for i in range(len(ds)) if i not in take_set]
    return (
        Dataset(ds.feature_names, taken, standardized=ds.standardized),
        Dataset(ds.feature_names, rest, standardized=ds.standardized),
    )


def synth_domains(n_source, n_target, shift, rotation_angle, class_sep, noise_sd,
                  dim, seed):
    """Generate a labeled two-class source/target pair with a controlled shift.

    Both domains are a balanced mixture of two isotropic Gaussians with
    means at +/- (class_sep / 2) along the first axis. Target points are
    additionally rotated by `rotation_angle` in the plane of the first two
    axes and translated by `shift`. Target labels are attached for
    evaluation only.
    """
    if dim < 2:
        raise ParameterError("dim must be >= 2")
    if n_source < 4 or n_target < 4:
        raise ParameterError("need at least 4 samples per domain")
    if n_source % 2 or n_target % 2:
        raise ParameterError("sample counts must be even for balanced classes")
    shift_vec = np.zeros(dim)
    shift_arr = np.atleast_1d(np.asarray(shift, dtype=np.float64))
    if shift_arr.size > dim:
        raise ParameterError(f"shift has {shift_arr.size} entries, dim is {dim}")
    shift_vec[: shift_arr.size] = shift_arr

    rot = np.eye(dim)
    c, s = np.cos(rotation_angle), np.sin(rotation_angle)
    rot[0, 0], rot[0, 1], rot[1, 0], rot[1, 1] = c, -s, s, c

    rng = np.random.default_rng(seed)

    def draw(n, domain):
        half = n // 2
        y = np.concatenate([np.ones(half), np.zeros(half)])
        means = np.zeros((n, dim))
        means[:, 0] = np.where(y == 1, class_sep / 2.0, -class_sep / 2.0)
        x = means + rng.normal(0.0, noise_sd, size=(n, dim))
        if domain == "target":
            x = x @ rot.T + shift_vec
        return x, y

    xs, ys = draw(n_source, "source")
    xt, yt = draw(n_target, "target")
    names = [f"roi_{i + 1}" for i in range(dim)]
    source = dataset_from_arrays(xs, ys, "source", feature_names=names)
    target = dataset_from_arrays(xt, yt, "target", feature_names=names)
    return source, target
