"""Spiked covariance models and Gaussian / elliptical data generation.

Randomness is organised around counter-based splittable streams: a stream is
a (master seed, path) pair, children extend the path, and distinct paths give
statistically independent generators.  The same (seed, path) always replays
the identical sequence, so replicates can be generated in any order or on any
worker without coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .spectral import Array, DataMatrix


class Basis(Enum):
    IDENTITY = "identity"
    RANDOM_ORTHOGONAL = "random_orthogonal"


class EllipticalLaw(Enum):
    """Distribution of the per-row scale factor.

    Every elliptical scale has unit second moment, so the population
    covariance of a row is exactly the model covariance.
    """

    GAUSSIAN = "gaussian"
    ELLIP_NORMAL = "ellip_normal"
    ELLIP_UNIFORM = "ellip_uniform"
    ELLIP_EXP = "ellip_exp"


# Uniform scale interval (1/2, (3*sqrt(5) - 1)/4); its raw second moment is
# (a^2 + a*b + b^2)/3 = 1 already, the rescale below only guards rounding.
_UNIF_LO = 0.5
_UNIF_HI = (3.0 * math.sqrt(5.0) - 1.0) / 4.0
_UNIF_SECOND_MOMENT = (_UNIF_LO**2 + _UNIF_LO * _UNIF_HI + _UNIF_HI**2) / 3.0

# Exponential rate sqrt(2): second moment 2 / rate^2 = 1.
_EXP_SCALE = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class RngStream:
    """A reproducible, splittable source of randomness."""

    master_seed: int
    path: tuple[int, ...] = ()

    def child(self, *indices: int) -> "RngStream":
        return RngStream(self.master_seed, self.path + tuple(int(i) for i in indices))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class CovarianceModel:
    """Population covariance: one spike ``lambda1`` over a flat bulk."""

    p: int
    lambda1: float
    bulk: float = 1.0
    basis: Basis = Basis.IDENTITY

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not self.bulk > 0:
            raise ValueError(f"bulk eigenvalue must be positive, got {self.bulk}")
        if self.lambda1 < self.bulk:
            raise ValueError(
                f"lambda1 ({self.lambda1}) must be >= bulk ({self.bulk})"
            )

    def spectrum(self) -> Array:
        values = np.full(self.p, self.bulk)
        values[0] = self.lambda1
        return values


def build_sigma_factor(model: CovarianceModel, rng: RngStream) -> Array:
    """Symmetric square root A of the model covariance (A A' = Sigma).

    For the random-orthogonal basis the eigenbasis is the right singular
    basis of a square standard-normal draw, which is Haar-distributed.
    """
    root = np.sqrt(model.spectrum())
    if model.basis is Basis.IDENTITY or model.lambda1 == model.bulk:
        return np.diag(root)
    gauss = rng.generator().standard_normal((model.p, model.p))
    v = np.linalg.svd(gauss)[2].T
    return (v * root) @ v.T


def draw_scales(law: EllipticalLaw, n: int, gen: np.random.Generator) -> Array:
    """n i.i.d. per-row scale factors with unit second moment."""
    if law is EllipticalLaw.GAUSSIAN:
        return np.ones(n)
    if law is EllipticalLaw.ELLIP_NORMAL:
        return np.abs(gen.standard_normal(n))
    if law is EllipticalLaw.ELLIP_UNIFORM:
        return gen.uniform(_UNIF_LO, _UNIF_HI, n) / math.sqrt(_UNIF_SECOND_MOMENT)
    if law is EllipticalLaw.ELLIP_EXP:
        return gen.exponential(_EXP_SCALE, n)
    raise ValueError(f"unknown law {law!r}")


def generate_dataset(
    model: CovarianceModel,
    law: EllipticalLaw,
    n: int,
    rng: RngStream,
    factor: Array | None = None,
) -> DataMatrix:
    """Draw an n x p dataset with rows scale_i * (z_i A).

    ``factor`` overrides the covariance square root, letting callers hold the
    eigenbasis fixed across many datasets; otherwise it is derived from
    ``rng.child(0)``.  The Gaussian core is always drawn before the scales,
    so datasets under different laws share the same core for a given stream.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if factor is None:
        factor = build_sigma_factor(model, rng.child(0))
    gen = rng.child(1).generator()
    core = gen.standard_normal((n, model.p))
    scales = draw_scales(law, n, gen)
    diag = np.diagonal(factor)
    if np.count_nonzero(factor - np.diag(diag)) == 0:
        x = core * diag
    else:
        x = core @ factor
    x *= scales[:, None]
    return DataMatrix(x)
