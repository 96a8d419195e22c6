"""Shared fixtures: reference beam parameters and synthetic rational systems."""

import numpy as np
import pytest

from beamloewner import BeamParams


def reference_beam(d):
    """The aluminum test beam used throughout: 1.905 m hinged beam with a
    0.1 kg / 7000 N/m shaker at 1.4 m and the curvature sensor at 0.7325 m."""
    return BeamParams(
        l=1.905,
        l0=1.4,
        l1=0.7325,
        rho0=2700.0,
        S=2.25e-4,
        E=6.9e10,
        I=1.6875e-10,
        m_shaker=0.1,
        kappa=7000.0,
        d=d,
    )


@pytest.fixture(scope="session")
def beam_large_damping():
    return reference_beam(0.0249)


@pytest.fixture(scope="session")
def beam_small_damping():
    return reference_beam(0.001)


class RationalSystem:
    """SISO rational transfer function in pole/residue form, real
    coefficients (poles and residues closed under conjugation)."""

    def __init__(self, poles, residues):
        self.poles = np.asarray(poles, dtype=complex)
        self.residues = np.asarray(residues, dtype=complex)
        self.order = self.poles.size

    def __call__(self, s):
        return complex(np.sum(self.residues / (s - self.poles)))

    def eval_many(self, nodes):
        nodes = np.asarray(nodes, dtype=complex)
        return np.sum(self.residues[None, :] / (nodes[:, None] - self.poles[None, :]), axis=1)


def order6_system():
    """Fixed stable order-6 system with three conjugate pole pairs."""
    poles = [-0.5 + 3j, -0.5 - 3j, -1.0 + 7j, -1.0 - 7j, -0.2 + 12j, -0.2 - 12j]
    residues = [1 + 2j, 1 - 2j, -3 + 1j, -3 - 1j, 0.5 - 4j, 0.5 + 4j]
    return RationalSystem(poles, residues)


def random_stable_system(rng, order):
    """Random stable real-coefficient system of the given order.

    Complex conjugate pole pairs plus one real pole when the order is
    odd; residues bounded away from zero so the realization is minimal.
    """
    poles, residues = [], []
    n_pairs, n_real = divmod(order, 2)
    for _ in range(n_pairs):
        re = -rng.uniform(0.1, 2.0)
        im = rng.uniform(0.5, 20.0)
        r = (rng.uniform(0.5, 3.0) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        poles.extend([re + 1j * im, re - 1j * im])
        residues.extend([r, np.conj(r)])
    for _ in range(n_real):
        poles.append(-rng.uniform(0.1, 2.0))
        residues.append(rng.uniform(0.5, 3.0) * rng.choice([-1.0, 1.0]))
    return RationalSystem(poles, residues)


@pytest.fixture(scope="session")
def synth6():
    return order6_system()


def assert_multiset_close(got, want, tol):
    """Greedy nearest-neighbor matching of two complex multisets."""
    got = list(np.asarray(got, dtype=complex))
    want = list(np.asarray(want, dtype=complex))
    assert len(got) == len(want)
    for g in got:
        dist = [abs(g - w) for w in want]
        k = int(np.argmin(dist))
        assert dist[k] <= tol, f"{g} has no partner within {tol} (closest {want[k]})"
        want.pop(k)
