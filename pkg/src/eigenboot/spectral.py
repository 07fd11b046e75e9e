"""Deterministic linear-algebra kernel: covariance matrices and their spectra.

Eigenvalues are obtained from the Gram matrix of the (optionally centered,
optionally weighted) data on its smaller side, which is mathematically the
squared-singular-value route.  The full ``p x p`` symmetric decomposition of
the assembled covariance matrix is kept as an independent cross-check in the
test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

Array = NDArray[np.float64]

# Eigenvalues of a covariance matrix within PSD_RTOL * trace below zero are
# rounding noise and get clamped to zero; anything further below is an error.
PSD_RTOL = 1e-10


class Divisor(Enum):
    """Normalisation of the covariance sum: 1/(n-1) or 1/n."""

    N_MINUS_1 = "n_minus_1"
    N = "n"

    def value_for(self, n: int) -> int:
        return n - 1 if self is Divisor.N_MINUS_1 else n


@dataclass(frozen=True)
class CovarianceOptions:
    """How raw data is turned into a covariance matrix."""

    center: bool = True
    divisor: Divisor = Divisor.N_MINUS_1


@dataclass(frozen=True)
class DataMatrix:
    """An ``n x p`` real matrix of observations, one observation per row."""

    values: Array

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {values.shape}")
        n, p = values.shape
        if n < 2 or p < 1:
            raise ValueError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
        if not np.all(np.isfinite(values)):
            raise ValueError("data matrix contains non-finite entries")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SpectralSummary:
    """Leading eigenvalues of a covariance matrix, sorted descending.

    ``dim`` is the dimension of the underlying matrix (the total eigenvalue
    count), ``k`` how many were requested, ``trace`` the full trace.
    """

    eigenvalues: Array
    k: int
    trace: float
    dim: int

    def __post_init__(self) -> None:
        eig = np.asarray(self.eigenvalues, dtype=np.float64)
        object.__setattr__(self, "eigenvalues", eig)

    @property
    def is_complete(self) -> bool:
        return len(self.eigenvalues) == self.dim

    @classmethod
    def from_eigenvalues(cls, values, trace: float | None = None) -> "SpectralSummary":
        """Build a complete summary directly from an eigenvalue list."""
        eig = np.sort(np.asarray(values, dtype=np.float64))[::-1]
        t = float(np.sum(eig)) if trace is None else float(trace)
        return cls(eigenvalues=eig, k=len(eig), trace=t, dim=len(eig))


def sample_covariance(data: DataMatrix, opts: CovarianceOptions) -> Array:
    """Covariance matrix of the rows, symmetrized."""
    x = data.values
    if opts.center:
        x = x - x.mean(axis=0)
    cov = x.T @ x / opts.divisor.value_for(data.n)
    return 0.5 * (cov + cov.T)


def _check_weights(w, n: int) -> Array:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (n,):
        raise ValueError(f"weights must have shape ({n},), got {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights contain non-finite entries")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    return w


def weighted_covariance(data: DataMatrix, weights) -> Array:
    """(1/n) * sum_i w_i x_i x_i', without centering."""
    w = _check_weights(weights, data.n)
    x = data.values
    # Scaling the weights first makes w = n * e_j reproduce x_j x_j' exactly.
    cov = (x * (w / data.n)[:, None]).T @ x
    return 0.5 * (cov + cov.T)


def _squared_singular_values(y: Array) -> Array:
    """Squared singular values of ``y``, descending, via the smaller Gram side."""
    n, p = y.shape
    gram = y.T @ y if p <= n else y @ y.T
    gram = 0.5 * (gram + gram.T)
    return np.linalg.eigvalsh(gram)[::-1]


def _clamp_spectrum(values: Array, trace: float) -> Array:
    eps = PSD_RTOL * max(trace, 0.0)
    low = values.min(initial=0.0)
    if low < -eps and low < -1e-12:
        raise ArithmeticError(
            f"covariance spectrum has eigenvalue {low} below the PSD tolerance {-eps}"
        )
    return np.maximum(values, 0.0)


def _prepared_rows(data: DataMatrix, opts: CovarianceOptions, weights=None) -> Array:
    """Rows whose Gram matrix (over the divisor) is the requested covariance."""
    x = data.values
    if weights is None:
        return x - x.mean(axis=0) if opts.center else x
    w = _check_weights(weights, data.n)
    sw = np.sqrt(w)
    if opts.center:
        total = w.sum()
        mean = (w @ x) / total if total > 0 else np.zeros(data.p)
        return sw[:, None] * (x - mean)
    return sw[:, None] * x


def _spectrum_of_rows(y: Array, divisor: int, k: int, dim: int) -> SpectralSummary:
    trace = float(np.einsum("ij,ij->", y, y)) / divisor
    values = _squared_singular_values(y) / divisor
    values = _clamp_spectrum(values, trace)
    if k > len(values):
        values = np.concatenate([values, np.zeros(k - len(values))])
    return SpectralSummary(eigenvalues=values[:k], k=k, trace=trace, dim=dim)


def top_eigenvalues(data: DataMatrix, k: int, opts: CovarianceOptions) -> SpectralSummary:
    """The ``k`` largest covariance eigenvalues, descending."""
    limit = min(data.n, data.p)
    if not 1 <= k <= limit:
        raise ValueError(f"k must satisfy 1 <= k <= min(n, p) = {limit}, got {k}")
    y = _prepared_rows(data, opts)
    return _spectrum_of_rows(y, opts.divisor.value_for(data.n), k, data.p)


def full_spectrum(data: DataMatrix, opts: CovarianceOptions) -> SpectralSummary:
    """All ``p`` covariance eigenvalues, zero-padded past the data rank."""
    y = _prepared_rows(data, opts)
    return _spectrum_of_rows(y, opts.divisor.value_for(data.n), data.p, data.p)


def weighted_spectrum(
    data: DataMatrix, weights, k: int, opts: CovarianceOptions
) -> SpectralSummary:
    """Leading eigenvalues of the row-reweighted covariance.

    The divisor always refers to the original row count ``n`` (a multinomial
    resample has exactly ``n`` rows), and centering, when requested, is at the
    weighted mean of the rows, so integer weights reproduce explicit
    row-resampling exactly.
    """
    if not 1 <= k <= data.p:
        raise ValueError(f"k must satisfy 1 <= k <= p = {data.p}, got {k}")
    y = _prepared_rows(data, opts, weights=weights)
    return _spectrum_of_rows(y, opts.divisor.value_for(data.n), k, data.p)


def empirical_stieltjes(spectrum: SpectralSummary, z: complex) -> complex:
    """(1/p) * sum_i 1 / (lambda_i - z) for z in the upper half-plane."""
    if z.imag <= 0:
        raise ValueError(f"z must have positive imaginary part, got {z}")
    if not spectrum.is_complete:
        raise ValueError(
            f"need the complete spectrum (k = dim = {spectrum.dim}), got k = {len(spectrum.eigenvalues)}"
        )
    return complex(np.mean(1.0 / (spectrum.eigenvalues - z)))
