"""Power-sum latency functions on the unit flow interval.

A latency is ``l(x) = sum_i c_i * x**q_i`` with ``c_i >= 0`` and every
exponent either 0 or at least 1, which keeps ``l`` nondecreasing, convex and
continuously differentiable on ``[0, 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

GAMMA_GRID_POINTS = 10_001


class DomainError(ValueError):
    """Raised when a flow value lies outside ``[0, 1]``."""


def _check_flow(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"flow must lie in [0, 1], got {x!r}")
    return arr


def _scalar_or_array(value: np.ndarray, like) -> float | np.ndarray:
    return float(value) if np.ndim(like) == 0 else value


@dataclass(frozen=True)
class Latency:
    """Immutable sum of power terms ``(coefficient, exponent)``."""

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        terms = tuple((float(c), float(q)) for c, q in self.terms)
        if not terms:
            raise ValueError("a latency needs at least one term")
        for c, q in terms:
            if not (np.isfinite(c) and np.isfinite(q)):
                raise ValueError(f"non-finite term ({c}, {q})")
            if c < 0.0:
                raise ValueError(f"coefficients must be nonnegative, got {c}")
            if q != 0.0 and q < 1.0:
                raise ValueError(
                    f"exponent {q} would make the latency non-convex; use 0 or >= 1"
                )
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_terms(cls, terms: Iterable[Sequence[float]]) -> Latency:
        return cls(tuple((c, q) for c, q in terms))

    @classmethod
    def constant(cls, value: float) -> Latency:
        return cls(((value, 0.0),))

    @classmethod
    def monomial(cls, coef: float, exponent: float) -> Latency:
        return cls(((coef, exponent),))

    @classmethod
    def affine(cls, intercept: float, slope: float) -> Latency:
        return cls(((intercept, 0.0), (slope, 1.0)))

    @property
    def coefs(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms])

    @property
    def exps(self) -> np.ndarray:
        return np.array([q for _, q in self.terms])

    @property
    def max_exponent(self) -> float:
        return max(q for c, q in self.terms if c > 0.0) if self.is_positive() else 0.0

    def is_positive(self) -> bool:
        return any(c > 0.0 for c, _ in self.terms)

    def is_constant(self) -> bool:
        return all(c == 0.0 or q == 0.0 for c, q in self.terms)

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self) -> str:
        parts = []
        for c, q in self.terms:
            if q == 0.0:
                parts.append(f"{c:g}")
            elif q == 1.0:
                parts.append(f"{c:g}x")
            else:
                parts.append(f"{c:g}x^{q:g}")
        return " + ".join(parts)


def _powers(lat: Latency, x: np.ndarray) -> np.ndarray:
    # numpy gives 0.0 ** 0.0 == 1.0, which is the convention we want
    return np.power.outer(x, lat.exps)


def evaluate(lat: Latency, x):
    """Latency value ``l(x)``."""
    arr = _check_flow(x)
    return _scalar_or_array(_powers(lat, arr) @ lat.coefs, x)


def derivative(lat: Latency, x):
    """Flow derivative ``l'(x)``; constant terms contribute nothing."""
    arr = _check_flow(x)
    q = lat.exps
    shifted = np.where(q > 0.0, q - 1.0, 0.0)
    vals = np.power.outer(arr, shifted) @ (lat.coefs * q)
    return _scalar_or_array(vals, x)


def marginal_cost(lat: Latency, x):
    """``l(x) + x l'(x) = sum_i c_i (1 + q_i) x**q_i``."""
    arr = _check_flow(x)
    return _scalar_or_array(_powers(lat, arr) @ (lat.coefs * (1.0 + lat.exps)), x)


def toll(lat: Latency, x):
    """Marginal-cost toll ``x l'(x)``."""
    arr = _check_flow(x)
    return _scalar_or_array(_powers(lat, arr) @ (lat.coefs * lat.exps), x)


def potential(lat: Latency, x):
    """Integral of the latency from 0 to ``x``."""
    arr = _check_flow(x)
    q = lat.exps
    return _scalar_or_array(np.power.outer(arr, q + 1.0) @ (lat.coefs / (q + 1.0)), x)


def gamma_bound(lat: Latency, grid_points: int = GAMMA_GRID_POINTS) -> float:
    """Supremum of ``l_mc(x) / l(x)`` over ``[0, 1]``.

    The value is the smaller of the analytic cap ``1 + max exponent`` and the
    maximum over a uniform grid. Where ``l(x) = 0`` the ratio is replaced by its
    limit ``1 + q_min`` (smallest exponent with a positive coefficient).

    For power sums the elasticity ``x l'(x) / l(x)`` is a weighted mean of the
    exponents whose weights shift towards larger exponents as ``x`` grows, so
    the grid maximum is attained at ``x = 1`` and is exact.
    """
    if not lat.is_positive():
        raise ValueError("gamma is undefined for a latency that is identically zero")
    active = [q for c, q in lat.terms if c > 0.0]
    cap = 1.0 + max(active)
    x = np.linspace(0.0, 1.0, grid_points)
    num = marginal_cost(lat, x)
    den = evaluate(lat, x)
    limit = 1.0 + min(active)
    ratio = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), limit)
    return float(min(cap, ratio.max()))


class LatencyTable:
    """Vectorised evaluation of many latencies at once.

    Terms are padded into ``(n_edges, n_terms)`` arrays; padding uses zero
    coefficients. Inputs are clipped to ``[0, 1]`` so that solver iterates that
    wander slightly outside the domain stay evaluable.
    """

    def __init__(self, latencies: Sequence[Latency]):
        width = max(len(lat.terms) for lat in latencies)
        self.coefs = np.zeros((len(latencies), width))
        self.exps = np.zeros((len(latencies), width))
        for i, lat in enumerate(latencies):
            for j, (c, q) in enumerate(lat.terms):
                self.coefs[i, j] = c
                self.exps[i, j] = q
        self._dexp = np.where(self.exps > 0.0, self.exps - 1.0, 0.0)
        self._slope_coefs = self.coefs * self.exps
        self.mc_coefs = self.coefs * (1.0 + self.exps)
        self._mc_slope_coefs = self.coefs * self.exps * (1.0 + self.exps)

    def _pow(self, x: np.ndarray, exps: np.ndarray) -> np.ndarray:
        return np.clip(x, 0.0, 1.0)[:, None] ** exps

    def value(self, x: np.ndarray) -> np.ndarray:
        return (self.coefs * self._pow(x, self.exps)).sum(axis=1)

    def slope(self, x: np.ndarray) -> np.ndarray:
        return (self.coefs * self.exps * self._pow(x, self._dexp)).sum(axis=1)

    def marginal(self, x: np.ndarray) -> np.ndarray:
        return (self.coefs * (1.0 + self.exps) * self._pow(x, self.exps)).sum(axis=1)

    def marginal_slope(self, x: np.ndarray) -> np.ndarray:
        return (self.coefs * self.exps * (1.0 + self.exps) * self._pow(x, self._dexp)).sum(
            axis=1
        )

    def extended(self, x: np.ndarray, marginal: bool) -> tuple[np.ndarray, np.ndarray]:
        """Cost and slope with a first-order extension below zero.

        Returns ``(l, l')`` or ``(l_mc, l_mc')``. For ``x < 0`` the function is
        continued by its tangent at 0, which keeps Newton iterates that cross
        into negative flows well defined and the map C1.
        """
        neg = x < 0.0
        xc = np.where(neg, 0.0, x)[:, None]
        p = xc**self.exps
        pd = xc**self._dexp
        if marginal:
            cost = (self.mc_coefs * p).sum(axis=1)
            slope = (self._mc_slope_coefs * pd).sum(axis=1)
        else:
            cost = (self.coefs * p).sum(axis=1)
            slope = (self._slope_coefs * pd).sum(axis=1)
        cost = np.where(neg, cost + slope * x, cost)
        return cost, slope

    def integral(self, x: np.ndarray) -> np.ndarray:
        return (self.coefs / (1.0 + self.exps) * self._pow(x, self.exps + 1.0)).sum(axis=1)
