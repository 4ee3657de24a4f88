"""Dense real tensors and the boundary MPS used by the sweep contractor.

Tensors are plain numpy arrays. An MPS site has axes (left bond, physical, right bond) and an MPO
site (left bond, physical in, physical out, right bond). Site tensors are kept at max-abs 1; the
removed scale lives in `BoundaryMPS.log_scale`.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .exceptions import DimensionError, NumericalError


def contract(a: np.ndarray, b: np.ndarray, pairs: Sequence[Tuple[int, int]]) -> np.ndarray:
    """Sum over the paired axes; remaining axes are ordered a-then-b."""
    for i, j in pairs:
        if a.shape[i] != b.shape[j]:
            raise DimensionError(f'cannot pair axis {i} (extent {a.shape[i]}) with axis {j} (extent {b.shape[j]})')
    return np.tensordot(a, b, axes=([i for i, _ in pairs], [j for _, j in pairs]))


def _norms(m: np.ndarray) -> dict:
    finite = m[np.isfinite(m)]
    return {
        'shape': list(m.shape),
        'frobenius': float(np.linalg.norm(finite)) if finite.size else None,
        'max_abs': float(np.abs(finite).max()) if finite.size else None,
        'non_finite': int(m.size - finite.size),
    }


def svd(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    try:
        return scipy.linalg.svd(m, full_matrices=False, lapack_driver='gesdd')
    except (np.linalg.LinAlgError, ValueError):
        pass
    try:
        return scipy.linalg.svd(m, full_matrices=False, lapack_driver='gesvd')
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f'SVD did not converge: {e}', _norms(m))


def svd_truncate(m: np.ndarray, chi: Optional[int]) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Rank-capped SVD: (U, S, Vh, discarded weight). `chi=None` keeps the full rank."""
    if m.ndim != 2:
        raise DimensionError(f'svd_truncate needs a matrix, got shape {m.shape}')
    if chi is not None and chi < 1:
        raise DimensionError(f'bond dimension must be at least 1, not {chi}')
    u, s, vh = svd(m)
    keep = len(s) if chi is None else min(chi, len(s))
    total = float(np.sum(s ** 2))
    discarded = float(np.sum(s[keep:] ** 2)) / total if total > 0 else 0.0
    return u[:, :keep], s[:keep], vh[:keep], discarded


@dataclass
class BoundaryMPS:
    sites: List[np.ndarray]
    log_scale: float = 0.0
    zero: bool = False
    discarded: float = field(default=0.0)

    @staticmethod
    def product(vectors: Sequence[np.ndarray]) -> 'BoundaryMPS':
        mps = BoundaryMPS([np.asarray(v, dtype=float).reshape(1, -1, 1) for v in vectors])
        mps.rescale()
        return mps

    @staticmethod
    def ones(physical: Sequence[int]) -> 'BoundaryMPS':
        return BoundaryMPS.product([np.ones(p) for p in physical])

    @property
    def physical(self) -> List[int]:
        return [site.shape[1] for site in self.sites]

    @property
    def bonds(self) -> List[int]:
        return [site.shape[2] for site in self.sites[:-1]]

    def rescale(self) -> None:
        for i, site in enumerate(self.sites):
            top = float(np.abs(site).max()) if site.size else 0.0
            if not np.isfinite(top):
                raise NumericalError(f'non-finite entry in MPS site {i}', _norms(site))
            if top == 0:
                self.zero = True
                return
            self.sites[i] = site / top
            self.log_scale += math.log(top)

    def scalar(self, closing: Sequence[np.ndarray] = None) -> Tuple[float, float]:
        """Close every physical leg (with all-ones by default) and return (mantissa, log_scale)."""
        if self.zero:
            return 0.0, -math.inf
        v = np.ones((1,))
        log_scale = self.log_scale
        for i, site in enumerate(self.sites):
            vector = np.ones(site.shape[1]) if closing is None else np.asarray(closing[i], dtype=float)
            v = v @ contract(site, vector, [(1, 0)])
            top = float(np.abs(v).max())
            if top == 0:
                return 0.0, -math.inf
            v = v / top
            log_scale += math.log(top)
        return float(v[0]), log_scale

    def log_value(self, closing: Sequence[np.ndarray] = None) -> float:
        mantissa, log_scale = self.scalar(closing)
        if mantissa <= 0:
            return -math.inf
        return log_scale + math.log(mantissa)

    def to_dense(self) -> np.ndarray:
        """Full tensor over the physical legs, scale included; small chains only."""
        if self.zero:
            return np.zeros(self.physical)
        dense = np.ones((1, 1))
        for site in self.sites:
            dense = contract(dense, site, [(dense.ndim - 1, 0)])
        return dense.reshape(dense.shape[1:-1]) * math.exp(self.log_scale)


def identity_column(physical: Sequence[int]) -> List[np.ndarray]:
    return [np.eye(p).reshape(1, p, p, 1) for p in physical]


def column_to_dense(column: Sequence[np.ndarray]) -> np.ndarray:
    """Dense operator with axes (in_0, out_0, in_1, out_1, ...); small columns only."""
    dense = np.ones((1, 1))
    for w in column:
        dense = contract(dense, w, [(dense.ndim - 1, 0)])
    return dense.reshape(dense.shape[1:-1])


def _compress(sites: List[np.ndarray], chi: Optional[int]) -> float:
    """Right-to-left orthogonalization, then a truncating left-to-right SVD sweep; in place."""
    for i in range(len(sites) - 1, 0, -1):
        left, p, right = sites[i].shape
        u, s, vh = svd(sites[i].reshape(left, p * right))
        sites[i] = vh.reshape(-1, p, right)
        sites[i - 1] = contract(sites[i - 1], u * s, [(2, 0)])
    discarded = 0.0
    for i in range(len(sites) - 1):
        left, p, right = sites[i].shape
        u, s, vh, weight = svd_truncate(sites[i].reshape(left * p, right), chi)
        discarded += weight
        sites[i] = u.reshape(left, p, -1)
        sites[i + 1] = contract(s[:, None] * vh, sites[i + 1], [(1, 0)])
    return discarded


def apply_column(mps: BoundaryMPS, column: Sequence[np.ndarray], chi: Optional[int]) -> BoundaryMPS:
    """Contract an MPO column into the boundary and compress every bond to at most `chi`."""
    if len(column) != len(mps.sites):
        raise DimensionError(f'column has {len(column)} sites, boundary has {len(mps.sites)}')
    if mps.zero:
        return BoundaryMPS([np.zeros((1, w.shape[2], 1)) for w in column], -math.inf, True, mps.discarded)
    sites = []
    for i, (a, w) in enumerate(zip(mps.sites, column)):
        if a.shape[1] != w.shape[1]:
            raise DimensionError(f'site {i}: boundary leg {a.shape[1]} does not match column leg {w.shape[1]}')
        merged = np.einsum('lar,LabR->lLbrR', a, w)
        l, big_l, b, r, big_r = merged.shape
        sites.append(merged.reshape(l * big_l, b, r * big_r))
    if sites[0].shape[0] != 1 or sites[-1].shape[2] != 1:
        raise DimensionError('outermost column bonds must have extent 1')

    result = BoundaryMPS(sites, mps.log_scale, False, mps.discarded)
    result.rescale()
    if result.zero:
        return result
    result.discarded += _compress(result.sites, chi)
    result.rescale()
    return result
