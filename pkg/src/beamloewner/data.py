"""Frequency-domain sample container shared by the beam and Loewner
modules."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FrequencyDataSet:
    """Ordered pairs (s_l, H(s_l)) of complex nodes and samples.

    Nodes must be pairwise distinct and everything finite; order is
    meaningful (partitioning is index-based).
    """

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=complex))
        values = np.atleast_1d(np.asarray(self.values, dtype=complex))
        if nodes.shape != values.shape or nodes.ndim != 1:
            raise ValueError(
                f"nodes and values must be equal-length 1-D arrays, got "
                f"{nodes.shape} and {values.shape}"
            )
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(values))):
            raise ValueError("nodes and values must be finite")
        if len(set(nodes.tolist())) != nodes.size:
            raise ValueError("nodes must be pairwise distinct")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.nodes.size

    @property
    def freq_hz(self):
        """Frequencies in Hz for purely imaginary nodes s = 2*pi*i*f."""
        return self.nodes.imag / (2.0 * np.pi)
