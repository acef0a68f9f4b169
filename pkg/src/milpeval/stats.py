"""Distribution statistics used by the comparison pipeline.

Everything here is defined on plain 1-D samples or row matrices:

- jsd_similarity: 1 - JSD/ln 2 over shared equal-width histograms,
  natural log, so 1.0 means indistinguishable and 0.0 disjoint.
- structural_similarity: the mean of that score over the 11 structural
  features of two instance sets.
- wasserstein1: exact 1-Wasserstein distance between empirical
  distributions via the quantile-function integral; sizes may differ.
- pca_fit / PcaModel: z-scored PCA with deterministic component signs.
- compare_cut_vectors: proportion-normalized cut usage compared along
  shared principal components, one W1 per retained component.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import EmptySample, InvalidBins, InvalidK, TooFewRows
from .graphs import FEATURE_NAMES

DEFAULT_BINS = 30
_LN2 = float(np.log(2.0))


def _as_sample(values, label):
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptySample(f"{label} is empty")
    if not np.all(np.isfinite(arr)):
        raise EmptySample(f"{label} contains non-finite values")
    return arr


def jsd_similarity(sample_a, sample_b, bins=DEFAULT_BINS):
    """Histogram similarity 1 - JSD/ln2, clamped to [0, 1].

    Both samples are binned with `bins` equal-width bins spanning the
    pooled range. A degenerate pooled range (all values identical)
    collapses to a single shared bin and scores 1.0.
    """
    if int(bins) < 1:
        raise InvalidBins(f"bins must be >= 1, got {bins}")
    bins = int(bins)
    a = _as_sample(sample_a, "first sample")
    b = _as_sample(sample_b, "second sample")

    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if lo == hi:
        return 1.0
    edges = np.linspace(lo, hi, bins + 1)
    p = np.histogram(a, bins=edges)[0].astype(np.float64)
    q = np.histogram(b, bins=edges)[0].astype(np.float64)
    p /= p.sum()
    q /= q.sum()

    m = 0.5 * (p + q)
    jsd = 0.5 * _kl(p, m) + 0.5 * _kl(q, m)
    score = 1.0 - jsd / _LN2
    return float(min(1.0, max(0.0, score)))


def _kl(p, m):
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / m[mask])))


@dataclass
class SimilarityReport:
    per_feature: dict
    overall: float
    bins: int
    size_a: int
    size_b: int


def structural_similarity(features_a, features_b, bins=DEFAULT_BINS):
    """Mean per-feature JSD similarity between two feature-vector sets.

    Inputs are sequences of StructuralFeatureVector (or anything with
    as_dict). Returns the 11 per-feature scores plus their mean.
    """
    if len(features_a) == 0 or len(features_b) == 0:
        raise EmptySample("both feature sets must be nonempty")
    cols_a = {name: np.array([f.as_dict()[name] for f in features_a]) for name in FEATURE_NAMES}
    cols_b = {name: np.array([f.as_dict()[name] for f in features_b]) for name in FEATURE_NAMES}
    scores = {}
    for name in FEATURE_NAMES:
        scores[name] = jsd_similarity(cols_a[name], cols_b[name], bins=bins)
    overall = float(np.mean([scores[name] for name in FEATURE_NAMES]))
    return SimilarityReport(
        per_feature=scores,
        overall=overall,
        bins=int(bins),
        size_a=len(features_a),
        size_b=len(features_b),
    )


def wasserstein1(sample_a, sample_b):
    """Exact W1 between two empirical distributions.

    Integral of |F_a - F_b| over the merged support; handles unequal
    sample sizes. For equal sizes this equals the optimal-pairing mean
    |a_(i) - b_(i)| over sorted samples.
    """
    a = np.sort(_as_sample(sample_a, "first sample"))
    b = np.sort(_as_sample(sample_b, "second sample"))
    pooled = np.sort(np.concatenate([a, b]))
    if pooled[0] == pooled[-1]:
        return 0.0
    deltas = np.diff(pooled)
    cdf_a = np.searchsorted(a, pooled[:-1], side="right") / a.size
    cdf_b = np.searchsorted(b, pooled[:-1], side="right") / b.size
    return float(np.sum(np.abs(cdf_a - cdf_b) * deltas))


@dataclass
class PcaModel:
    mean: np.ndarray  # (d,)
    std: np.ndarray  # (d,)
    components: np.ndarray  # (k, d) rows are principal directions
    explained_ratios: np.ndarray  # (k,)
    constant_columns: np.ndarray  # (d,) bool

    def transform(self, x):
        x = np.asarray(x, dtype=np.float64)
        flat = x.ndim == 1
        if flat:
            x = x.reshape(1, -1)
        z = np.where(self.constant_columns, 0.0, (x - self.mean) / np.where(self.std == 0.0, 1.0, self.std))
        out = z @ self.components.T
        return out[0] if flat else out


def pca_fit(rows, k=3):
    """PCA on z-scored columns via eigendecomposition of the sample
    covariance. Constant columns are flagged and z-scored to zero.
    Component signs are fixed: the largest-magnitude loading of each
    component is positive (first index wins ties)."""
    x = np.asarray(rows, dtype=np.float64)
    if x.ndim != 2:
        raise TooFewRows("PCA input must be a 2-D row matrix")
    n, d = x.shape
    if n < 2:
        raise TooFewRows(f"PCA needs at least 2 rows, got {n}")
    if not 1 <= int(k) <= d:
        raise InvalidK(f"k must be in [1, {d}], got {k}")
    k = int(k)

    mean = x.mean(axis=0)
    std = x.std(axis=0)
    constant = std == 0.0
    safe = np.where(constant, 1.0, std)
    z = (x - mean) / safe
    z[:, constant] = 0.0

    cov = (z.T @ z) / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    eigvals = np.clip(eigvals, 0.0, None)

    total = float(eigvals.sum())
    ratios = eigvals[:k] / total if total > 0.0 else np.zeros(k)

    comps = eigvecs[:, :k].T.copy()
    for i in range(k):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0.0:
            comps[i] = -comps[i]

    return PcaModel(
        mean=mean,
        std=std,
        components=comps,
        explained_ratios=np.asarray(ratios, dtype=np.float64),
        constant_columns=constant,
    )


@dataclass
class CutVectorComparison:
    per_component_w1: List[float]
    explained_ratios: List[float]
    zero_vectors_a: int
    zero_vectors_b: int


def compare_cut_vectors(set_a, set_b, k=3):
    """Compare two sets of per-instance cut-usage count vectors.

    Counts are normalized to per-instance proportions (all-zero rows
    stay zero and are counted as flagged), a PCA is fit on the union,
    both sets are projected, and each retained component contributes
    one W1 distance between the projections.
    """
    a = np.asarray(set_a, dtype=np.float64)
    b = np.asarray(set_b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise TooFewRows("cut vector sets must be 2-D with a shared width")
    prop_a, zeros_a = _proportions(a)
    prop_b, zeros_b = _proportions(b)

    union = np.vstack([prop_a, prop_b])
    model = pca_fit(union, k=k)
    proj_a = model.transform(prop_a)
    proj_b = model.transform(prop_b)
    w1 = [wasserstein1(proj_a[:, i], proj_b[:, i]) for i in range(model.components.shape[0])]
    return CutVectorComparison(
        per_component_w1=w1,
        explained_ratios=[float(r) for r in model.explained_ratios],
        zero_vectors_a=zeros_a,
        zero_vectors_b=zeros_b,
    )


def _proportions(counts):
    sums = counts.sum(axis=1, keepdims=True)
    zero_rows = sums[:, 0] == 0.0
    out = np.divide(counts, np.where(sums == 0.0, 1.0, sums))
    return out, int(zero_rows.sum())


def summary_stats(values):
    """Count/mean/std/min/median/max block used in reports."""
    arr = _as_sample(values, "sample")
    return {
        "count": int(arr.size),
        "mean": float(arr.mean()),
        "std": float(arr.std()),
        "min": float(arr.min()),
        "median": float(np.median(arr)),
        "max": float(arr.max()),
    }
