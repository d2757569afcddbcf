"""Smooth bandpass filter and the localized trigonometric kernels built on it.

The filter ``h`` is an even C-infinity function equal to 1 on [-1/2, 1/2] and
0 outside [-1, 1]; the transition uses the canonical bump smooth step, so
every derivative vanishes at both joints.  A degree-``n`` kernel carries the
coefficient taper ``w_k = h(k/n)`` and evaluates

* the circle kernel  ``phi(t) = w_0 + 2 * sum_{k<n} w_k cos(k t)``, a real,
  even, 2*pi-periodic trigonometric polynomial concentrated near 0, and
* the metric-space kernel ``psi(d) = phi(d)^2 >= 0`` for distances in [0, pi].

``phi`` peaks at ``phi(0) = sum_{|k|<n} w_k`` (3n/2 for the default filter)
and decays like ``(n|t|)^-S`` away from 0 for every decay order ``S``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import accel

DEFAULT_SMOOTHNESS = 9


def _bump_ratio(t: np.ndarray) -> np.ndarray:
    # a(t)/(a(t)+a(1-t)) with a(t)=exp(-1/t) on t>0; smooth step from 0 to 1
    t = np.asarray(t, dtype=np.float64)
    num = np.zeros_like(t)
    den = np.zeros_like(t)
    pos = t > 0.0
    num[pos] = np.exp(-1.0 / t[pos])
    opp = (1.0 - t) > 0.0
    den[opp] = np.exp(-1.0 / (1.0 - t[opp]))
    return num / (num + den)


@dataclass(frozen=True)
class BandpassFilter:
    """Even smooth step: 1 on [-1/2, 1/2], 0 outside [-1, 1].

    ``smoothness`` is the decay exponent the localization tests exercise; the
    transition itself is C-infinity, so any positive order is admissible.
    """

    smoothness: int = DEFAULT_SMOOTHNESS

    def __post_init__(self):
        if self.smoothness < 1:
            raise ValueError("smoothness order must be a positive integer")

    def __call__(self, u):
        arr = np.asarray(u, dtype=np.float64)
        scalar = arr.ndim == 0
        au = np.abs(np.atleast_1d(arr))
        out = np.zeros_like(au)
        out[au <= 0.5] = 1.0
        mid = (au > 0.5) & (au < 1.0)
        if np.any(mid):
            out[mid] = _bump_ratio(2.0 * (1.0 - au[mid]))
        return float(out[0]) if scalar else out.reshape(arr.shape)


@dataclass(frozen=True)
class LocalizedKernel:
    """Degree-``n`` localized kernel with precomputed taper weights."""

    n: int
    filter: BandpassFilter = field(default_factory=BandpassFilter)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("kernel degree must be >= 1")
        weights = self.filter(np.arange(self.n, dtype=np.float64) / self.n)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_table_cache", {})

    @property
    def peak(self) -> float:
        """phi(0) = w_0 + 2 * sum of the remaining weights."""
        return float(self.weights[0] + 2.0 * self.weights[1:].sum())

    def phi_grid(self, ts) -> np.ndarray:
        ts = np.ascontiguousarray(np.asarray(ts, dtype=np.float64).ravel())
        if ts.size == 0:
            return np.empty(0, dtype=np.float64)
        return accel.cosine_sum(self.weights, ts)

    def phi(self, t: float) -> float:
        return float(self.phi_grid(np.array([t]))[0])

    def psi(self, d: float) -> float:
        if d < 0:
            raise ValueError("distance must be non-negative")
        v = self.phi(d)
        return v * v

    def psi_grid(self, ds) -> np.ndarray:
        v = self.phi_grid(ds)
        return v * v

    def table(self, points_per_degree: int = 64):
        """Uniform lookup table of phi on [0, pi] for the pairwise workload.

        Linear interpolation on the default 64n-point grid stays within
        1e-4 * phi(0) of direct evaluation (validated in the test suite).
        Returns ``(values, step)``.
        """
        key = points_per_degree
        cache = self._table_cache
        if key not in cache:
            m = points_per_degree * self.n
            xs = np.linspace(0.0, np.pi, m + 1)
            cache[key] = (self.phi_grid(xs), np.pi / m)
        return cache[key]
