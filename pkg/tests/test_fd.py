"""Finite-difference oracle: convergence and agreement with the analytic H."""

import numpy as np
import pytest

from beamloewner import oracle_fd, snap_to_grid, transfer_function

from conftest import reference_beam
from test_beam import static_curvature_oracle


def test_rejects_coarse_grids(beam_small_damping):
    with pytest.raises(ValueError):
        oracle_fd(1j, beam_small_damping, 50)


def test_snap_to_grid_moves_to_nodes(beam_small_damping):
    snapped = snap_to_grid(beam_small_damping, 500)
    h = snapped.l / 500
    assert snapped.l0 / h == pytest.approx(round(snapped.l0 / h), abs=1e-9)
    assert snapped.l1 / h == pytest.approx(round(snapped.l1 / h), abs=1e-9)
    assert abs(snapped.l0 - beam_small_damping.l0) <= h / 2
    assert abs(snapped.l1 - beam_small_damping.l1) <= h / 2


def test_second_order_self_convergence(beam_small_damping):
    # fix the geometry on the coarse grid (also exact on the fine one),
    # then halving the cell size must cut the error by about four
    s = 2j * np.pi * 30.0
    n = 500
    snapped = snap_to_grid(beam_small_damping, n)
    h_exact = transfer_function(s, snapped)
    err_coarse = abs(oracle_fd(s, snapped, n) - h_exact)
    err_fine = abs(oracle_fd(s, snapped, 2 * n) - h_exact)
    ratio = err_fine / err_coarse
    assert 0.15 <= ratio <= 0.40


def test_static_case(beam_large_damping):
    snapped = snap_to_grid(beam_large_damping, 2000)
    fd0 = oracle_fd(0.0, beam_large_damping, 2000)
    assert fd0.imag == 0.0
    assert fd0.real == pytest.approx(static_curvature_oracle(snapped), rel=1e-3)


def test_conjugate_symmetry(beam_small_damping):
    s = 2j * np.pi * 73.0 + 0.5
    a = oracle_fd(s, beam_small_damping, 800)
    b = oracle_fd(np.conj(s), beam_small_damping, 800)
    assert b == np.conj(a)


@pytest.mark.parametrize("d", [0.0249, 0.001])
def test_agreement_with_analytic(d):
    # mid-resolution sweep; the acceptance suite repeats this at n = 4000
    p = reference_beam(d)
    n = 1524
    snapped = snap_to_grid(p, n)
    for f in np.logspace(0.0, np.log10(250.0), 10):
        s = 2j * np.pi * f
        h = transfer_function(s, snapped)
        h_fd = oracle_fd(s, p, n)
        assert abs(h_fd - h) <= 1e-3 * abs(h), f"f = {f} Hz"
