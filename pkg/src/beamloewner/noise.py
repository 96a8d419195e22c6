"""Seeded multiplicative Gaussian perturbation of frequency samples."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import FrequencyDataSet


@dataclass(frozen=True)
class NoiseSpec:
    """Noise level nu with power epsilon = 10^-nu and a PRNG seed.

    epsilon may be overridden explicitly (e.g. 0.0 for a no-op spec in
    diagnostics); by default it is derived from nu.
    """

    nu: int
    seed: int
    epsilon: Optional[float] = None

    def __post_init__(self):
        if int(self.nu) != self.nu or self.nu < 1:
            raise ValueError(f"nu must be an integer >= 1, got {self.nu}")
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", 10.0 ** (-self.nu))
        elif self.epsilon < 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")


def perturb(data: FrequencyDataSet, spec: NoiseSpec) -> FrequencyDataSet:
    """Multiply each sample by 1 + epsilon * (alpha + i beta).

    alpha, beta are independent standard-normal draws from numpy's
    default generator (PCG64 bit stream, ziggurat normals) seeded with
    spec.seed and consumed in node order, alpha before beta.  The same
    seed therefore reproduces the same perturbation bit for bit, and
    different levels nu with one seed share the same draws, only scaled.

    Samples at real nodes are self-conjugate, so they receive only the
    real part of the perturbation (their beta draw is consumed but
    unused); complex noise there would make conjugate closure, and with
    it realification, impossible.  Apply noise before conjugate closure.
    """
    rng = np.random.default_rng(spec.seed)
    draws = rng.standard_normal((len(data), 2))
    noise = draws[:, 0] + 1j * draws[:, 1]
    real_nodes = data.nodes.imag == 0.0
    noise[real_nodes] = draws[real_nodes, 0]
    return FrequencyDataSet(
        nodes=data.nodes.copy(),
        values=data.values * (1.0 + spec.epsilon * noise),
    )
