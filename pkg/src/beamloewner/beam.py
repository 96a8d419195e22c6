"""Analytic transfer function of a hinged beam with an attached shaker.

The structure is a damped flexible beam, hinged at both ends, with a
lumped spring-mass unit (the shaker) attached at ``l0``.  The input is
the transverse force driving the shaker; the output is the curvature
w''(l1) measured by a sensor at ``l1 <= l0``.  In the Laplace domain the
deflection solves a fourth-order two-point boundary value problem on
each side of the attachment, coupled through continuity of w, w', w''
and a shear jump that balances the shaker force.  Writing the spatial
problem as a first-order system, its state transition matrix is built
from the four Krylov-Duncan functions z1..z4, and eliminating the
boundary unknowns leaves one 4x4 complex solve per frequency.

All formulas are entire in the spatial spectral parameter gamma, so the
branch picked for the complex fourth/square roots never affects results
(each z_i depends on gamma only through gamma^4).
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .data import FrequencyDataSet
from .exceptions import DegenerateParameter, SingularMatrix
from .linalg import _pow2_scale, solve_linear

# Below this |gamma*x| the closed forms of z2..z4 lose digits to
# cancellation (z4 is a difference of nearly equal terms over gamma^3);
# the 4-term power series is exact to ~1e-16 there.
SERIES_THRESHOLD = 0.25
_SERIES_TERMS = 4

_FACT = [math.factorial(k) for k in range(4 * _SERIES_TERMS)]


@dataclass(frozen=True)
class BeamParams:
    """Physical constants of the beam-shaker assembly, SI units.

    rho (mass per unit length) may be omitted, in which case it is
    derived as rho0 * S; when given it must satisfy rho = rho0 * S.
    """

    l: float           # beam length [m]
    l0: float          # shaker attachment position [m]
    l1: float          # curvature sensor position [m], l1 <= l0
    rho0: float        # material density [kg/m^3]
    S: float           # cross-section area [m^2]
    E: float           # Young's modulus [Pa]
    I: float           # area moment of inertia [m^4]
    m_shaker: float    # attached lumped mass [kg]
    kappa: float       # spring stiffness [N/m]
    d: float           # structural damping coefficient, >= 0
    rho: float = None  # linear density [kg/m], defaults to rho0 * S

    def __post_init__(self):
        if self.rho is None:
            object.__setattr__(self, "rho", self.rho0 * self.S)
        positive = ("l", "rho0", "S", "E", "I", "m_shaker", "kappa", "rho")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 < self.l0 < self.l:
            raise ValueError(f"l0 must lie strictly inside (0, l), got {self.l0}")
        if not 0 < self.l1 <= self.l0:
            raise ValueError(f"l1 must satisfy 0 < l1 <= l0, got {self.l1}")
        if self.d < 0:
            raise ValueError(f"d must be nonnegative, got {self.d}")
        if abs(self.rho - self.rho0 * self.S) > 1e-12 * self.rho:
            raise ValueError(
                f"rho = {self.rho} inconsistent with rho0 * S = {self.rho0 * self.S}"
            )

    @property
    def EI(self):
        return self.E * self.I


@dataclass(frozen=True)
class SpectralParams:
    """Frequency-dependent coefficients of the spatial problem at one s."""

    s: complex
    alpha4: complex       # rho / (EI + rho d s)
    gamma: complex        # alpha * sqrt(2 s) / 2, principal branches
    beta: complex         # (s^2 m + kappa) / EI
    four_gamma4: complex  # rho s^2 / (EI + rho d s) = 4 gamma^4


class KrylovQuad(NamedTuple):
    """Values of the four Krylov-Duncan generating functions at one x."""

    z1: complex
    z2: complex
    z3: complex
    z4: complex


@dataclass(frozen=True)
class BoundaryConstants:
    """Boundary unknowns (w', w''' at each hinge) for a unit shaker force."""

    W0_2: complex
    W0_4: complex
    Wl_2: complex
    Wl_4: complex


def spectral_params(s, p: BeamParams) -> SpectralParams:
    """Spectral coefficients (alpha^4, gamma, beta, 4 gamma^4) at s."""
    s = complex(s)
    denom = p.EI + p.rho * p.d * s
    if abs(denom) < 1e-30:
        raise DegenerateParameter(f"EI + rho*d*s vanishes at s = {s}")
    alpha4 = p.rho / denom
    gamma = alpha4 ** 0.25 * np.sqrt(complex(2.0 * s)) / 2.0
    return SpectralParams(
        s=s,
        alpha4=alpha4,
        gamma=complex(gamma),
        beta=(s * s * p.m_shaker + p.kappa) / p.EI,
        four_gamma4=p.rho * s * s / denom,
    )


def krylov_z(gamma, x) -> KrylovQuad:
    """Evaluate z1..z4 at position x for spectral parameter gamma.

    z1 = cosh(g x) cos(g x), z2, z3, z4 are its successive integrals in
    x; each solves z'''' = -4 g^4 z.  Near g*x = 0 the closed forms are
    replaced by the power series

        z_j(x) = sum_k (-4 g^4)^k x^(4k+j-1) / (4k+j-1)!

    which also provides the analytic limit (1, x, x^2/2, x^3/6) at
    g = 0.  Accepts scalars or broadcastable arrays.
    """
    g = np.asarray(gamma, dtype=complex)
    xr = np.asarray(x, dtype=float)
    scalar = g.ndim == 0 and xr.ndim == 0
    g, xr = np.broadcast_arrays(np.atleast_1d(g), np.atleast_1d(xr))
    u = g * xr

    zs = [np.empty(u.shape, dtype=complex) for _ in range(4)]
    near = np.abs(u) < SERIES_THRESHOLD
    if np.any(near):
        g4 = g[near] ** 4
        xn = xr[near]
        for j in range(1, 5):
            acc = np.zeros(xn.shape, dtype=complex)
            for k in range(_SERIES_TERMS):
                p = 4 * k + j - 1
                acc += (-4.0 * g4) ** k * xn**p / _FACT[p]
            zs[j - 1][near] = acc
    far = ~near
    if np.any(far):
        uf = u[far]
        gf = g[far]
        ch, sh = np.cosh(uf), np.sinh(uf)
        c, s = np.cos(uf), np.sin(uf)
        zs[0][far] = ch * c
        zs[1][far] = (ch * s + sh * c) / (2.0 * gf)
        zs[2][far] = sh * s / (2.0 * gf * gf)
        zs[3][far] = (ch * s - sh * c) / (4.0 * gf**3)
    if scalar:
        return KrylovQuad(*(complex(z[0]) for z in zs))
    return KrylovQuad(*zs)


def state_transition(gamma, x):
    """The 4x4 matrix exponential e^{xA} of the spatial first-order system.

    A is the companion matrix with -4 gamma^4 in the lower-left corner;
    its exponential is the circulant-like arrangement of z1..z4.  Used
    mostly for verification (det = 1, semigroup property).
    """
    z1, z2, z3, z4 = krylov_z(gamma, x)
    fg4 = 4.0 * complex(gamma) ** 4
    return np.array(
        [
            [z1, z2, z3, z4],
            [-fg4 * z4, z1, z2, z3],
            [-fg4 * z3, -fg4 * z4, z1, z2],
            [-fg4 * z2, -fg4 * z3, -fg4 * z4, z1],
        ],
        dtype=complex,
    )


def _assemble_interface(zl0, zxi, four_gamma4, beta):
    """Stack the 4x4 continuity/jump system from z-values at l0 and l0-l.

    All inputs broadcast; returns shape (..., 4, 4).
    """
    z1a, z2a, z3a, z4a = zl0
    z1b, z2b, z3b, z4b = zxi
    fg4 = four_gamma4
    rows = [
        [-z2a, -z4a, z2b, z4b],
        [-z1a, -z3a, z1b, z3b],
        [fg4 * z4a, -z2a, -fg4 * z4b, z2b],
        [beta * z2a + fg4 * z3a, beta * z4a - z1a, -fg4 * z3b, z1b],
    ]
    return np.stack([np.stack(np.broadcast_arrays(*r), axis=-1) for r in rows], axis=-2)


def interface_matrix(sp: SpectralParams, p: BeamParams):
    """The 4x4 system M coupling the hinge unknowns at one frequency.

    Row order: continuity of w, w', w'' at l0, then the shaker force
    balance; columns order the unknowns (W0_2, W0_4, Wl_2, Wl_4).
    """
    zl0 = krylov_z(sp.gamma, p.l0)
    zxi = krylov_z(sp.gamma, p.l0 - p.l)
    return _assemble_interface(
        tuple(np.asarray(z) for z in zl0),
        tuple(np.asarray(z) for z in zxi),
        sp.four_gamma4,
        sp.beta,
    ).reshape(4, 4)


def boundary_constants(s, p: BeamParams) -> BoundaryConstants:
    """Hinge unknowns for a unit force through the shaker at frequency s."""
    sp = spectral_params(s, p)
    M = interface_matrix(sp, p)
    rhs = np.array([0.0, 0.0, 0.0, 1.0 / p.EI], dtype=complex)
    try:
        w = solve_linear(M, rhs)
    except SingularMatrix as exc:
        raise SingularMatrix(
            f"interface system singular at s = {s} (resonance of the "
            f"undamped structure or degenerate parameters)"
        ) from exc
    return BoundaryConstants(*map(complex, w))


def transfer_function(s, p: BeamParams) -> complex:
    """Shaker force -> sensor curvature transfer function H(s).

    One 4x4 solve for the boundary constants, then the curvature at the
    sensor: H = -4 gamma^4 z4(l1) W0_2 + z2(l1) W0_4.
    """
    sp = spectral_params(s, p)
    bc = boundary_constants(s, p)
    _, z2, _, z4 = krylov_z(sp.gamma, p.l1)
    return -sp.four_gamma4 * z4 * bc.W0_2 + z2 * bc.W0_4


def _transfer_batch(s, p: BeamParams):
    """Vectorized H over an array of s values.

    Assembles all 4x4 systems at once and falls back to the scalar path
    (with its pivot checks and error reporting) for any node whose
    batched solve looks unreliable.
    """
    s = np.asarray(s, dtype=complex)
    denom = p.EI + p.rho * p.d * s
    bad = np.abs(denom) < 1e-30
    if np.any(bad):
        raise DegenerateParameter(
            f"EI + rho*d*s vanishes at s = {s[bad][0]}"
        )
    gamma = (p.rho / denom) ** 0.25 * np.sqrt(2.0 * s) / 2.0
    four_g4 = p.rho * s * s / denom
    beta = (s * s * p.m_shaker + p.kappa) / p.EI

    zl0 = krylov_z(gamma, p.l0)
    zxi = krylov_z(gamma, p.l0 - p.l)
    zl1 = krylov_z(gamma, p.l1)
    M = _assemble_interface(zl0, zxi, four_g4, beta)
    rhs = np.zeros(s.shape + (4,), dtype=complex)
    rhs[..., 3] = 1.0 / p.EI
    # same power-of-two equilibration as linalg.solve_linear, vectorized,
    # so batched and scalar evaluations agree bit for bit
    absM = np.abs(M)
    row = _pow2_scale(absM.max(axis=-1))
    col = _pow2_scale((absM * row[..., :, None]).max(axis=-2))
    Ms = M * row[..., :, None] * col[..., None, :]
    try:
        w = np.linalg.solve(Ms, (rhs * row)[..., None])[..., 0] * col
        resid = np.linalg.norm(np.einsum("...ij,...j->...i", M, w) - rhs, axis=-1)
        scale = np.linalg.norm(M, axis=(-2, -1)) * np.linalg.norm(w, axis=-1) + 1.0 / p.EI
        suspect = ~np.isfinite(resid) | (resid > 1e-8 * scale)
    except np.linalg.LinAlgError:
        w = np.empty(s.shape + (4,), dtype=complex)
        suspect = np.ones(s.shape, dtype=bool)
    for idx in np.argwhere(suspect):
        bc = boundary_constants(complex(s[tuple(idx)]), p)
        w[tuple(idx)] = (bc.W0_2, bc.W0_4, bc.Wl_2, bc.Wl_4)
    return -four_g4 * zl1.z4 * w[..., 0] + zl1.z2 * w[..., 1]


def sample_grid(p: BeamParams, f_min, f_max, count) -> FrequencyDataSet:
    """Sample H on a uniform frequency grid, nodes s = 2*pi*i*f.

    The grid is linearly spaced in Hz, inclusive of both endpoints, and
    the returned data preserves ascending frequency order.  f = 0 is
    allowed (static case, evaluated through the gamma -> 0 series).
    """
    if count < 2:
        raise ValueError(f"count must be >= 2, got {count}")
    if f_min < 0 or f_max <= f_min:
        raise ValueError(f"need 0 <= f_min < f_max, got [{f_min}, {f_max}]")
    f = np.linspace(f_min, f_max, count)
    nodes = 2j * np.pi * f
    try:
        values = _transfer_batch(nodes, p)
    except SingularMatrix as exc:
        raise _with_freq(exc, nodes, p) from exc
    return FrequencyDataSet(nodes=nodes, values=values)


def _with_freq(exc, nodes, p):
    """Attach the offending frequency to a per-node sampling failure."""
    for node in nodes:
        try:
            transfer_function(complex(node), p)
        except SingularMatrix:
            f_hz = node.imag / (2.0 * np.pi)
            err = SingularMatrix(f"sampling failed at f = {f_hz} Hz: {exc}")
            err.freq_hz = f_hz
            return err
    return exc
