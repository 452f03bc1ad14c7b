"""Weighted sampling of must-link / cannot-link instance pairs.

A pair's label-overlap ratio is the size of the label-set intersection
divided by the mean label-set size. Ratios at or above the threshold theta
route the pair to the must-link list, everything below goes to the
cannot-link list. Endpoints are drawn with probability proportional to the
per-instance weights, which is how the boosting loop steers later members
toward the samples it got wrong.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dataset import MultiLabelDataset
from .errors import ConfigError, ValidationError

DEFAULT_ATTEMPT_FACTOR = 50


@dataclass(frozen=True)
class ConstraintConfig:
    theta: float
    target_must: int
    target_cannot: int
    max_attempts: int = None

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigError(f"theta must lie in [0, 1], got {self.theta}")
        if self.target_must < 0 or self.target_cannot < 0:
            raise ConfigError("constraint targets must be non-negative")
        if self.max_attempts is None:
            object.__setattr__(
                self,
                "max_attempts",
                DEFAULT_ATTEMPT_FACTOR * (self.target_must + self.target_cannot),
            )
        elif self.max_attempts < self.target_must + self.target_cannot:
            raise ConfigError("max_attempts must cover at least target_must + target_cannot draws")


@dataclass(frozen=True)
class PairConstraintSets:
    """Ordered (i, j) index pairs; duplicates across draws are allowed."""

    must: np.ndarray
    cannot: np.ndarray

    def __post_init__(self):
        must = np.asarray(self.must, dtype=np.int64).reshape(-1, 2)
        cannot = np.asarray(self.cannot, dtype=np.int64).reshape(-1, 2)
        if must.size and np.any(must[:, 0] == must[:, 1]):
            raise ValidationError("must-link pairs may not pair an instance with itself")
        if cannot.size and np.any(cannot[:, 0] == cannot[:, 1]):
            raise ValidationError("cannot-link pairs may not pair an instance with itself")
        must.setflags(write=False)
        cannot.setflags(write=False)
        object.__setattr__(self, "must", must)
        object.__setattr__(self, "cannot", cannot)

    @property
    def n_must(self) -> int:
        return self.must.shape[0]

    @property
    def n_cannot(self) -> int:
        return self.cannot.shape[0]


def label_overlap_ratio(labels_i, labels_j) -> float:
    """Intersection size over mean set size; 1.0 when both sets are empty."""
    li = np.asarray(labels_i, dtype=bool)
    lj = np.asarray(labels_j, dtype=bool)
    if li.shape != lj.shape:
        raise ValidationError("label vectors must come from the same label universe")
    inter = int(np.count_nonzero(li & lj))
    denom = (int(np.count_nonzero(li)) + int(np.count_nonzero(lj))) / 2.0
    if denom == 0.0:
        return 1.0
    return inter / denom


def weighted_indices(weights, uniforms) -> np.ndarray:
    """Inverse-CDF lookup mapping uniforms in [0, 1) to weighted indices."""
    cumw = np.cumsum(np.asarray(weights, dtype=np.float64))
    idx = np.searchsorted(cumw, np.asarray(uniforms, dtype=np.float64), side="right")
    return np.minimum(idx, len(cumw) - 1)


def _check_weights(weights, n):
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise ValidationError(f"weights must have one entry per instance ({n}), got shape {w.shape}")
    if np.any(w < 0.0):
        raise ValidationError("weights must be non-negative")
    if abs(float(w.sum()) - 1.0) > 1e-9:
        raise ValidationError(f"weights must sum to 1 within 1e-9, got {w.sum()!r}")
    return w


def sample_constraints(
    ds: MultiLabelDataset,
    weights,
    cfg: ConstraintConfig,
    rng: np.random.Generator,
) -> PairConstraintSets:
    """Draw weighted pairs until both lists hit their targets or attempts run out.

    Deterministic for a fixed generator state: the full block of uniforms is
    drawn up front, so the generator always advances by the same amount no
    matter how many attempts the routing loop actually needs. A list that is
    still empty when attempts run out is returned empty; the projection step
    treats empty lists as zero scatter.
    """
    n = ds.instance_count
    if n < 2:
        raise ConfigError("constraint sampling needs at least 2 instances")
    w = _check_weights(weights, n)
    uniforms = rng.random(2 * cfg.max_attempts)
    labels = np.ascontiguousarray(ds.labels, dtype=np.uint8)
    sizes = labels.sum(axis=1).astype(np.int64)
    must, cannot = _kernels.route_pairs(
        np.cumsum(w),
        uniforms,
        labels,
        sizes,
        cfg.theta,
        cfg.target_must,
        cfg.target_cannot,
    )
    return PairConstraintSets(must=must, cannot=cannot)
