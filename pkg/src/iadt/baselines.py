"""Classical comparison methods: a source-only logistic classifier and four
subspace adaptation techniques (transfer components, geodesic flow kernel,
subspace alignment, correlation alignment).

Each `*_fit` returns a SubspaceMap holding everything needed to project raw
features into the adapted space; `baseline_predict` then trains a logistic
classifier on adapted source data and scores the adapted target.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError
from .linalg import eig_sym, inv_sqrt_psd, pca, sqrt_psd
from .losses import KernelSpec

LOGISTIC_TOL = 1e-8

# Principal angles below this are treated as zero when assembling the
# geodesic kernel (the integrand has a removable singularity there).
ANGLE_EPS = 1e-8


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float


def _sigmoid(t):
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def logistic_fit(x, y, l2=1e-4, iters=500, lr=0.1):
    """Full-batch gradient descent on L2-regularized mean cross-entropy.

    Stops early once the gradient infinity-norm drops below 1e-8. The bias
    is not regularized.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.shape[0] != x.shape[0]:
        raise DimensionError("x must be 2-D with one label per row")
    if len(np.unique(y)) < 2:
        raise ParameterError("logistic_fit needs samples of both classes")
    n, k = x.shape
    w = np.zeros(k)
    b = 0.0
    for _ in range(iters):
        p = _sigmoid(x @ w + b)
        resid = p - y
        gw = x.T @ resid / n + l2 * w
        gb = float(resid.mean())
        if max(np.max(np.abs(gw)), abs(gb)) <= LOGISTIC_TOL:
            break
        w -= lr * gw
        b -= lr * gb
    return LogisticModel(weights=w, bias=b)


def logistic_predict(model, x, threshold=0.5):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[1] != model.weights.shape[0]:
        raise DimensionError(
            f"x has {x.shape[1]} features, model expects {model.weights.shape[0]}"
        )
    probs = _sigmoid(x @ model.weights + model.bias)
    return probs, (probs >= threshold).astype(int)


@dataclass(frozen=True)
class SubspaceMap:
    """A fitted domain-adaptation transform; `arrays` holds its operators."""

    method: str
    arrays: dict = field(default_factory=dict)


def _kernel_matrix(a, b, kernel):
    if kernel.kind == "linear":
        return a @ b.T
    sq = (
        np.sum(a * a, axis=1)[:, None]
        + np.sum(b * b, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-kernel.gamma * np.clip(sq, 0.0, None))


def tca_fit(xs, xt, dim=40, mu=0.01, kernel=KernelSpec()):
    """Transfer components: kernelized projection that shrinks the MMD.

    Builds the combined kernel over stacked source/target rows, then takes
    the top generalized eigenvectors of (K H K, K L K + mu I), where L is
    the MMD coefficient matrix and H the centering projector. Solved by
    whitening with the inverse square root of the regularized left side, so
    the result matches a dense generalized eigensolver.
    """
    xs = np.asarray(xs, dtype=np.float64)
    xt = np.asarray(xt, dtype=np.float64)
    ns, nt = xs.shape[0], xt.shape[0]
    n = ns + nt
    if not (1 <= dim <= n):
        raise ParameterError(f"tca dim {dim} invalid for {n} stacked samples")
    stacked = np.vstack([xs, xt])
    k = _kernel_matrix(stacked, stacked, kernel)

    coeff = np.empty(n)
    coeff[:ns] = 1.0 / ns
    coeff[ns:] = -1.0 / nt
    l_mat = np.outer(coeff, coeff)
    h_mat = np.eye(n) - np.ones((n, n)) / n

    a_mat = k @ l_mat @ k + mu * np.eye(n)
    b_mat = k @ h_mat @ k
    b_mat = 0.5 * (b_mat + b_mat.T)

    a_inv_sqrt = inv_sqrt_psd(0.5 * (a_mat + a_mat.T))
    c_mat = a_inv_sqrt @ b_mat @ a_inv_sqrt
    eig = eig_sym(0.5 * (c_mat + c_mat.T))
    w = a_inv_sqrt @ eig.vectors[:, :dim]
    return SubspaceMap(
        method="tca",
        arrays={"reference": stacked, "projection": w, "kernel": kernel},
    )


def _tca_transform(smap, x):
    k = _kernel_matrix(
        np.asarray(x, dtype=np.float64), smap.arrays["reference"], smap.arrays["kernel"]
    )
    return k @ smap.arrays["projection"]


def _complement_basis(basis):
    """Orthonormal basis of the orthogonal complement of `basis`'s columns."""
    d, r = basis.shape
    proj = np.eye(d) - basis @ basis.T
    eig = eig_sym(0.5 * (proj + proj.T))
    return eig.vectors[:, : d - r]


def gfk_fit(xs, xt, dim=20):
    """Geodesic flow kernel between the source and target PCA subspaces.

    Closed-form integral of the projector along the geodesic connecting the
    two subspaces on the Grassmann manifold; small principal angles use the
    series limits of the integrand so identical subspaces yield exactly the
    shared projector.
    """
    xs = np.asarray(xs, dtype=np.float64)
    xt = np.asarray(xt, dtype=np.float64)
    d = xs.shape[1]
    if xt.shape[1] != d:
        raise DimensionError("feature counts differ between domains")
    if not (1 <= dim <= d // 2):
        raise ParameterError(f"gfk dim must be in [1, {d // 2}] for {d} features")
    ps = pca(xs, dim)
    pt = pca(xt, dim)
    rs = _complement_basis(ps)

    a = ps.T @ pt
    u1, cos_t, v_t = np.linalg.svd(a)
    v = v_t.T
    cos_t = np.clip(cos_t, -1.0, 1.0)
    theta = np.arccos(cos_t)
    sin_t = np.sin(theta)

    bv = rs.T @ pt @ v
    u2 = np.zeros((d - dim, dim))
    for j in range(dim):
        if sin_t[j] > ANGLE_EPS:
            u2[:, j] = -bv[:, j] / sin_t[j]

    # Diagonal blocks of the integrated projector; series at theta ~ 0.
    small = theta < ANGLE_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        sinc2 = np.where(small, 1.0 - (2.0 * theta**2) / 3.0, np.sin(2.0 * theta) / (2.0 * theta))
        cosm1 = np.where(small, -theta, (np.cos(2.0 * theta) - 1.0) / (2.0 * theta))
    lam1 = 0.5 * (1.0 + sinc2)
    lam2 = 0.5 * cosm1
    lam3 = 0.5 * (1.0 - sinc2)

    phi1 = ps @ u1
    phi2 = rs @ u2
    g = (
        (phi1 * lam1) @ phi1.T
        + (phi1 * lam2) @ phi2.T
        + (phi2 * lam2) @ phi1.T
        + (phi2 * lam3) @ phi2.T
    )
    g = 0.5 * (g + g.T)
    g_sqrt = sqrt_psd(g, eps=0.0)
    return SubspaceMap(method="gfk", arrays={"g": g, "g_sqrt": g_sqrt})


def sa_fit(xs, xt, dim=20):
    """Subspace alignment: map the source PCA basis onto the target's."""
    xs = np.asarray(xs, dtype=np.float64)
    xt = np.asarray(xt, dtype=np.float64)
    ps = pca(xs, dim)
    pt = pca(xt, dim)
    m = ps.T @ pt
    return SubspaceMap(method="sa", arrays={"ps": ps, "pt": pt, "m": m})


def coral_fit(xs, xt, reg=1.0):
    """Correlation alignment: whiten source covariance, recolor to target.

    The adapted source is recentered on the target mean; target data is
    left untouched.
    """
    xs = np.asarray(xs, dtype=np.float64)
    xt = np.asarray(xt, dtype=np.float64)
    if xs.shape[0] < 2 or xt.shape[0] < 2:
        raise ParameterError("coral needs at least 2 samples per domain")
    d = xs.shape[1]
    cs = np.cov(xs, rowvar=False, ddof=1) + reg * np.eye(d)
    ct = np.cov(xt, rowvar=False, ddof=1) + reg * np.eye(d)
    transform = inv_sqrt_psd(cs) @ sqrt_psd(ct)
    return SubspaceMap(
        method="coral",
        arrays={
            "transform": transform,
            "source_mean": xs.mean(axis=0),
            "target_mean": xt.mean(axis=0),
        },
    )


def adapt_source(smap, x):
    """Project source-domain rows into the adapted feature space."""
    x = np.asarray(x, dtype=np.float64)
    if smap.method == "tca":
        return _tca_transform(smap, x)
    if smap.method == "gfk":
        return x @ smap.arrays["g_sqrt"]
    if smap.method == "sa":
        return x @ smap.arrays["ps"] @ smap.arrays["m"]
    if smap.method == "coral":
        centered = x - smap.arrays["source_mean"]
        return centered @ smap.arrays["transform"] + smap.arrays["target_mean"]
    raise ParameterError(f"unknown method {smap.method!r}")


def adapt_target(smap, x):
    """Project target-domain rows into the adapted feature space."""
    x = np.asarray(x, dtype=np.float64)
    if smap.method == "tca":
        return _tca_transform(smap, x)
    if smap.method == "gfk":
        return x @ smap.arrays["g_sqrt"]
    if smap.method == "sa":
        return x @ smap.arrays["pt"]
    if smap.method == "coral":
        return x
    raise ParameterError(f"unknown method {smap.method!r}")


def baseline_predict(smap, xs, ys, xt, threshold=0.5, l2=1e-4, iters=500, lr=0.1):
    """Adapt both domains, fit logistic on adapted source, score the target."""
    model = logistic_fit(adapt_source(smap, xs), ys, l2=l2, iters=iters, lr=lr)
    return logistic_predict(model, adapt_target(smap, xt), threshold=threshold)
