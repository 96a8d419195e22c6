"""Finite-difference reference solver for the beam-shaker response.

Independent verification path for the analytic transfer function: the
Laplace-domain beam equation

    (EI + rho d s) W'''' + rho s^2 W = 0

is discretized on a uniform grid with the classic five-point central
difference for W'''' and ghost points enforcing the hinged conditions
w = w'' = 0 at both ends.  The shaker enters as a point force at the
attachment node: the force balance prescribes the jump of EI W''' across
l0, so the delta carried by the (EI + rho d s) W'''' term is scaled by
(EI + rho d s)/EI and lumped over one cell.  Shaker and sensor positions
are snapped to the nearest grid nodes; on a fixed snapped geometry the
scheme converges to the analytic value at second order in the cell size.
"""

from dataclasses import replace

import numpy as np
import scipy.linalg as sla

from .beam import BeamParams
from .exceptions import SingularMatrix

MIN_CELLS = 100


def snap_to_grid(p: BeamParams, n_cells: int) -> BeamParams:
    """Beam parameters with l0, l1 moved to the nearest FD grid nodes.

    Comparisons of the analytic transfer function against
    :func:`oracle_fd` should use the snapped geometry on both sides;
    otherwise the node shift (up to half a cell) perturbs the resonances
    and dominates the discretization error.
    """
    h = p.l / n_cells
    j0 = round(p.l0 / h)
    j1 = round(p.l1 / h)
    return replace(p, l0=j0 * h, l1=j1 * h)


def oracle_fd(s, p: BeamParams, n_cells: int) -> complex:
    """Second-order finite-difference value of the transfer function.

    Solves the complex pentadiagonal system for the deflection under a
    unit shaker force and returns the discrete curvature at the sensor
    node.  l0 and l1 are snapped to the nearest grid nodes.
    """
    if n_cells < MIN_CELLS:
        raise ValueError(f"n_cells must be >= {MIN_CELLS}, got {n_cells}")
    s = complex(s)
    h = p.l / n_cells
    j0 = round(p.l0 / h)
    j1 = round(p.l1 / h)
    if not (2 <= j0 <= n_cells - 2 and 1 <= j1 <= n_cells - 1):
        raise ValueError("shaker/sensor nodes too close to the hinges for this grid")

    coef = p.EI + p.rho * p.d * s
    c = coef / h**4
    n_int = n_cells - 1  # interior unknowns W_1 .. W_{n-1}

    # banded storage for scipy.linalg.solve_banded with (2, 2) bands
    ab = np.zeros((5, n_int), dtype=complex)
    ab[2, :] = 6.0 * c + p.rho * s * s
    ab[1, 1:] = -4.0 * c
    ab[3, :-1] = -4.0 * c
    ab[0, 2:] = c
    ab[4, :-2] = c
    # ghost points of the hinged ends: W_{-1} = -W_1, W_{n+1} = -W_{n-1}
    ab[2, 0] -= c
    ab[2, -1] -= c
    # shaker coupling, lumped over one cell; the jump condition lives in
    # EI W''' while the operator carries (EI + rho d s), hence the scale
    scale = coef / p.EI
    ab[2, j0 - 1] += scale * (p.m_shaker * s * s + p.kappa) / h

    rhs = np.zeros(n_int, dtype=complex)
    rhs[j0 - 1] = scale / h

    try:
        w_int = sla.solve_banded((2, 2), ab, rhs, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"FD system singular at s = {s}") from exc
    if not np.all(np.isfinite(w_int)):
        raise SingularMatrix(f"FD solution non-finite at s = {s}")

    w = np.concatenate(([0.0], w_int, [0.0]))
    return complex((w[j1 - 1] - 2.0 * w[j1] + w[j1 + 1]) / h**2)
