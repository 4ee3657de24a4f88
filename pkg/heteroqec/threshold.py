"""Threshold estimation by finite-size scaling.

Near the threshold the failure rate is modelled as a polynomial in the rescaled distance from it,
p_fail = A + B x + C x^2 (+ D x^3) with x = (p - p_th) d^(1/nu). The polynomial coefficients enter
linearly, so they are solved by weighted least squares inside a Nelder-Mead search over (p_th, nu).
"""
import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from icecream import ic
from scipy.optimize import minimize

from .constants import FIT_WINDOW, FIT_ORDER, BOOTSTRAP_RESAMPLES, NU_STARTS, SIMPLEX_DIAMETER
from .exceptions import NoCrossingError, DegenerateFitError, ParameterError
from .montecarlo import ExperimentPoint, merge_points, wilson_interval

_print = print
print = ic

MAX_STARTS = 8


@dataclass(frozen=True)
class FitSample:
    d: int
    p: float
    p_fail: float
    sigma: float
    trials: Optional[int] = None
    failures: Optional[int] = None

    def __post_init__(self):
        if not (math.isfinite(self.p_fail) and math.isfinite(self.sigma)) or self.sigma <= 0:
            raise ParameterError(f'sample (d={self.d}, p={self.p}) needs a finite p_fail and a positive sigma')

    @staticmethod
    def from_counts(d: int, p: float, failures: int, trials: int) -> 'FitSample':
        lo, hi = wilson_interval(failures, trials)
        return FitSample(d, p, failures / trials, (hi - lo) / 2, trials, failures)

    @staticmethod
    def from_point(point: ExperimentPoint) -> 'FitSample':
        return FitSample.from_counts(point.d, point.p, point.failures, point.trials)


@dataclass(frozen=True)
class Crossing:
    d_small: int
    d_large: int
    p: float


@dataclass(frozen=True)
class FitResult:
    p_th: float
    nu: float
    coefficients: Tuple[float, ...]
    stderr_p_th: Optional[float]
    residual: float
    n_points: int
    converged: bool
    window: Tuple[float, float]
    order: int = FIT_ORDER
    crossings: Tuple[float, ...] = field(default=(), repr=False)

    @property
    def A(self) -> float:
        return self.coefficients[0]

    @property
    def B(self) -> float:
        return self.coefficients[1]

    @property
    def C(self) -> float:
        return self.coefficients[2]

    def predict(self, d: int, p) -> np.ndarray:
        x = (np.asarray(p, dtype=float) - self.p_th) * d ** (1 / self.nu)
        return np.polyval(self.coefficients[::-1], x)

    @property
    def as_dict(self):
        return {
            'p_th': self.p_th,
            'stderr': self.stderr_p_th,
            'nu': self.nu,
            'A': self.A,
            'B': self.B,
            'C': self.C,
            'coefficients': list(self.coefficients),
            'order': self.order,
            'window': list(self.window),
            'n_points': self.n_points,
            'residual': self.residual,
            'converged': self.converged,
        }


def as_samples(points: Iterable) -> List[FitSample]:
    """Fit samples sorted by (d, p); tallied points sharing (d, p) are merged first."""
    points = list(points)
    if all(isinstance(point, ExperimentPoint) for point in points):
        return sorted((FitSample.from_point(point) for point in merge_points(points)), key=lambda s: (s.d, s.p))
    merged = {}
    for sample in points:
        key = (sample.d, sample.p)
        if key not in merged:
            merged[key] = sample
            continue
        other = merged[key]
        if sample.trials is None or other.trials is None:
            raise ParameterError(f'duplicate sample at d={sample.d}, p={sample.p} without tallies to merge')
        merged[key] = FitSample.from_counts(sample.d, sample.p, sample.failures + other.failures,
                                            sample.trials + other.trials)
    return sorted(merged.values(), key=lambda s: (s.d, s.p))


def _curves(samples: Sequence[FitSample]) -> dict:
    curves = {}
    for sample in samples:
        curves.setdefault(sample.d, {})[sample.p] = sample.p_fail
    return curves


def _saturated(a: float, b: float) -> bool:
    return (a == 0 and b == 0) or (a == 1 and b == 1)


def crossing_scan(points: Iterable) -> List[Crossing]:
    """Crossings of every pair of distance curves over their common p values.

    A strict sign change is linearly interpolated. An exact tie counts once, at the first p of its run,
    and only when the nearest unequal differences on either side disagree in sign. Two curves both at 0
    or both at 1 never make a crossing.
    """
    curves = _curves(as_samples(points))
    crossings = []
    for d_small, d_large in combinations(sorted(curves), 2):
        common = sorted(set(curves[d_small]) & set(curves[d_large]))
        diff = [curves[d_large][p] - curves[d_small][p] for p in common]
        for j, p in enumerate(common):
            if diff[j] == 0:
                if (j > 0 and diff[j - 1] == 0) or _saturated(curves[d_small][p], curves[d_large][p]):
                    continue
                before = next((v for v in reversed(diff[:j]) if v != 0), 0)
                after = next((v for v in diff[j + 1:] if v != 0), 0)
                if before * after < 0:
                    crossings.append(Crossing(d_small, d_large, p))
            elif j + 1 < len(common) and diff[j] * diff[j + 1] < 0:
                p_next = common[j + 1]
                crossings.append(Crossing(d_small, d_large, p - diff[j] * (p_next - p) / (diff[j + 1] - diff[j])))
    return crossings


def _no_crossing(samples: Sequence[FitSample]) -> NoCrossingError:
    curves = _curves(samples)
    small, large = curves[min(curves)], curves[max(curves)]
    common = sorted(set(small) & set(large))
    if not common:
        raise DegenerateFitError('the smallest and largest distances share no p values')
    # larger codes winning everywhere puts the threshold above the simulated range
    if sum(large[p] - small[p] for p in common) < 0:
        return NoCrossingError('lower', max(sample.p for sample in samples))
    return NoCrossingError('upper', min(sample.p for sample in samples))


class _Objective:
    def __init__(self, samples: Sequence[FitSample], order: int, scale: float):
        self.d = np.array([s.d for s in samples], dtype=float)
        self.p = np.array([s.p for s in samples])
        self.y = np.array([s.p_fail for s in samples])
        self.w = 1 / np.array([s.sigma for s in samples])
        self.order = order
        self.scale = scale

    def solve(self, u: np.ndarray) -> Tuple[float, np.ndarray, int]:
        p_th, nu = u[0] * self.scale, u[1]
        if not nu > 0.05:
            return math.inf, None, 0
        x = (self.p - p_th) * self.d ** (1 / nu)
        v = np.vander(x, self.order + 1, increasing=True)
        coefficients, _, rank, _ = np.linalg.lstsq(v * self.w[:, None], self.y * self.w, rcond=None)
        residual = float(np.sum((self.w * (self.y - v @ coefficients)) ** 2))
        return residual if math.isfinite(residual) else math.inf, coefficients, int(rank)

    def __call__(self, u: np.ndarray) -> float:
        return self.solve(u)[0]


def _simplex_diameter(simplex: np.ndarray) -> float:
    return max(float(np.linalg.norm(a - b)) for a, b in combinations(simplex, 2))


def _minimize(objective: _Objective, start: Tuple[float, float]):
    # simplex size alone decides termination
    return minimize(objective, np.array(start), method='Nelder-Mead',
                    options={'xatol': 1e-10, 'fatol': math.inf, 'maxiter': 20_000, 'maxfev': 40_000})


def _best_fit(samples: Sequence[FitSample], order: int, scale: float, starts: Sequence[Tuple[float, float]]):
    objective = _Objective(samples, order, scale)
    best = None
    for start in starts:
        result = _minimize(objective, start)
        if best is None or result.fun < best.fun:
            best = result
    return objective, best


def _window(samples: Sequence[FitSample], center: float, window: float) -> List[FitSample]:
    inside = [s for s in samples if abs(s.p - center) <= window * center]
    distances = {s.d for s in inside}
    if len(distances) < 2 or len({s.p for s in inside}) < 3:
        raise DegenerateFitError(f'the window {center:.4g} +- {window:.0%} holds too few distances or p values')
    return inside


def _resample(samples: Sequence[FitSample], rng: np.random.Generator) -> List[FitSample]:
    res = []
    for s in samples:
        if s.trials:
            failures = int(rng.binomial(s.trials, s.p_fail))
            res.append(FitSample.from_counts(s.d, s.p, failures, s.trials))
        else:
            res.append(replace(s, p_fail=float(s.p_fail + s.sigma * rng.standard_normal())))
    return res


def fit_threshold(points: Iterable, window: float = FIT_WINDOW, order: int = FIT_ORDER,
                  resamples: int = BOOTSTRAP_RESAMPLES, seed: int = 0,
                  nu_starts: Sequence[float] = NU_STARTS) -> FitResult:
    if order not in (2, 3):
        raise ParameterError(f'ansatz order must be 2 or 3, not {order}')
    if not window > 0:
        raise ParameterError(f'fit window must be positive, not {window}')
    samples = as_samples(points)
    if len({s.d for s in samples}) < 2:
        raise DegenerateFitError('a threshold fit needs at least two distances')
    if len({s.p for s in samples}) < 3:
        raise DegenerateFitError('a threshold fit needs at least three p values')

    crossings = sorted(c.p for c in crossing_scan(samples))
    if not crossings:
        raise _no_crossing(samples)
    center = float(np.median(crossings))
    inside = _window(samples, center, window)
    if len(inside) <= order + 3:
        raise DegenerateFitError(f'{len(inside)} points cannot determine {order + 3} parameters')

    seeds = sorted(set(crossings), key=lambda p: abs(p - center))[:MAX_STARTS]
    starts = [(p / center, nu) for p in seeds for nu in nu_starts]
    objective, best = _best_fit(inside, order, center, starts)
    residual, coefficients, rank = objective.solve(best.x)
    p_th, nu = float(best.x[0] * center), float(best.x[1])
    if coefficients is None or rank < order + 1:
        raise DegenerateFitError('the scaling design matrix is rank deficient')
    if not 0 < p_th < 1:
        raise DegenerateFitError(f'fitted threshold {p_th} lies outside (0, 1)')
    converged = _simplex_diameter(best.final_simplex[0]) < SIMPLEX_DIAMETER
    print(f'threshold fit: p_th={p_th:.5f} nu={nu:.3f} over {len(starts)} starts, converged={converged}')

    rng = np.random.default_rng(seed)
    estimates = []
    for _ in range(resamples):
        _, refit = _best_fit(_resample(inside, rng), order, center, [tuple(best.x)])
        if math.isfinite(refit.fun) and 0 < refit.x[0] * center < 1:
            estimates.append(refit.x[0] * center)
    stderr = float(np.std(estimates, ddof=1)) if len(estimates) >= 2 else None

    return FitResult(
        p_th=p_th,
        nu=nu,
        coefficients=tuple(float(c) for c in coefficients),
        stderr_p_th=stderr,
        residual=residual,
        n_points=len(inside),
        converged=converged,
        window=(center * (1 - window), center * (1 + window)),
        order=order,
        crossings=tuple(crossings),
    )
