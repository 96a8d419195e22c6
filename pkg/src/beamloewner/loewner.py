"""Loewner pencil construction and reduction from frequency samples.

Pipeline order: conjugate-close the data so models come out real, split
it into left/right interpolation sets, assemble the (shifted) Loewner
matrices as divided differences, transform conjugate pairs to real 2x2
blocks, then truncate an SVD of the augmented matrices and project down
to a real descriptor model (E, A, B, C).

Conventions: rows of the pencil are indexed by the left nodes mu_i (with
values v_i), columns by the right nodes lambda_j (values w_j):

    L_(i,j)  = (v_i - w_j) / (mu_i - lambda_j)
    Ls_(i,j) = (mu_i v_i - lambda_j w_j) / (mu_i - lambda_j)

and the raw (untruncated) model is E = -L, A = -Ls, B = V, C = W.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import FrequencyDataSet
from .exceptions import (
    ImaginaryResidue,
    InconsistentConjugate,
    NodeCollision,
    OverTruncation,
)
from .linalg import svd_thin
from .rom import ReducedModel

_SQ2 = np.sqrt(2.0)

# residue tolerances fixed by the module contracts
CONJUGATE_RTOL = 1e-8
IMAG_RTOL = 1e-10
IDENTITY_RTOL = 1e-10
COND_LIMIT_REDUCED = 1e12


@dataclass(frozen=True)
class PartitionedData:
    """Left (mu, v) and right (lambda, w) interpolation data."""

    mu: np.ndarray
    v: np.ndarray
    lam: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=complex)
        v = np.asarray(self.v, dtype=complex)
        lam = np.asarray(self.lam, dtype=complex)
        w = np.asarray(self.w, dtype=complex)
        if mu.shape != v.shape or lam.shape != w.shape:
            raise ValueError("node and value arrays must match in length")
        if mu.size == 0 or lam.size == 0:
            raise ValueError("both partitions must be nonempty")
        mset, lset = set(mu.tolist()), set(lam.tolist())
        if len(mset) != mu.size or len(lset) != lam.size:
            raise ValueError("nodes within a partition must be distinct")
        if mset & lset:
            raise NodeCollision(f"left/right nodes collide: {sorted(mset & lset)[:3]}")
        for name, a in (("mu", mu), ("v", v), ("lam", lam), ("w", w)):
            object.__setattr__(self, name, a)


@dataclass(frozen=True)
class LoewnerPencil:
    """Loewner matrices with their node matrices and data vectors.

    flavor "complex": M and Lam are diagonal with the raw nodes (also
    kept in left_nodes/right_nodes).  flavor "realified": all entries
    real, M and Lam carry 2x2 rotation blocks per conjugate pair, and
    ones_left/ones_right are the transformed all-ones vectors that enter
    the Sylvester identities.
    """

    L: np.ndarray
    Ls: np.ndarray
    V: np.ndarray          # left values, length q
    W: np.ndarray          # right values, length k
    M: np.ndarray          # q x q left node matrix
    Lam: np.ndarray        # k x k right node matrix
    ones_left: np.ndarray
    ones_right: np.ndarray
    flavor: str
    left_nodes: Optional[np.ndarray] = None
    right_nodes: Optional[np.ndarray] = None

    @property
    def shape(self):
        return self.L.shape


@dataclass(frozen=True)
class PencilDiagnostics:
    """Relative Frobenius residuals of the defining identities."""

    sylvester_L: float
    sylvester_Ls: float
    shift_right: float   # Ls = L Lam + V 1^T
    shift_left: float    # Ls = M L + 1 W

    def max_residual(self):
        return max(self.sylvester_L, self.sylvester_Ls, self.shift_right, self.shift_left)


@dataclass(frozen=True)
class SvdReport:
    """Singular values/vectors of the augmented Loewner matrices."""

    sigma_row: np.ndarray  # of [L, Ls]
    sigma_col: np.ndarray  # of [L; Ls]
    Y: np.ndarray          # left singular vectors of [L, Ls], q x min(q, 2k)
    X: np.ndarray          # right singular vectors of [L; Ls], k x min(2q, k)

    @property
    def sigma_row_norm(self):
        return self.sigma_row / self.sigma_row[0]

    @property
    def sigma_col_norm(self):
        return self.sigma_col / self.sigma_col[0]


def conjugate_close(data: FrequencyDataSet) -> FrequencyDataSet:
    """Append the complex conjugate of every non-real sample.

    Pairs (s, h), (conj(s), conj(h)) end up adjacent; real nodes appear
    once and must carry (numerically) real values.  If the input already
    contains both s and conj(s), their values must be consistent to
    CONJUGATE_RTOL and the existing samples are kept.
    """
    lookup = dict(zip(data.nodes.tolist(), data.values.tolist()))
    nodes_out, values_out = [], []
    emitted = set()
    for s, h in zip(data.nodes.tolist(), data.values.tolist()):
        if s in emitted:
            continue
        emitted.add(s)
        if s.imag == 0.0:
            if abs(h.imag) > CONJUGATE_RTOL * abs(h):
                raise InconsistentConjugate(
                    f"real node {s} carries non-real value {h}"
                )
            nodes_out.append(s)
            values_out.append(h)
            continue
        sc = s.conjugate()
        if sc in lookup:
            hc = lookup[sc]
            if abs(hc - h.conjugate()) > CONJUGATE_RTOL * max(abs(h), abs(hc)):
                raise InconsistentConjugate(
                    f"values at {s} and {sc} are not conjugates: {h} vs {hc}"
                )
            emitted.add(sc)
            nodes_out.extend([s, sc])
            values_out.extend([h, hc])
        else:
            nodes_out.extend([s, sc])
            values_out.extend([h, h.conjugate()])
    return FrequencyDataSet(np.array(nodes_out), np.array(values_out))


def _units(nodes):
    """Indices grouped so adjacent conjugate pairs stay together."""
    units = []
    i = 0
    n = len(nodes)
    while i < n:
        if (
            nodes[i].imag != 0.0
            and i + 1 < n
            and nodes[i + 1] == nodes[i].conjugate()
        ):
            units.append((i, i + 1))
            i += 2
        else:
            units.append((i,))
            i += 1
    return units


def partition(data: FrequencyDataSet, scheme: str) -> PartitionedData:
    """Split samples into left/right interpolation sets.

    "alternate" interlaces (1st, 3rd, ... left; 2nd, 4th, ... right),
    "half_half" takes the first half left and the rest right.  Adjacent
    conjugate pairs are treated as single units so both members land on
    the same side, which realification requires.
    """
    if len(data) < 2:
        raise ValueError("need at least two samples to partition")
    units = _units(data.nodes)
    if len(units) < 2:
        raise ValueError("need at least two node units (pairs count as one)")
    if scheme == "alternate":
        left_units = units[0::2]
        right_units = units[1::2]
    elif scheme == "half_half":
        nh = (len(units) + 1) // 2
        left_units = units[:nh]
        right_units = units[nh:]
    else:
        raise ValueError(f"unknown partition scheme {scheme!r}")
    li = [i for u in left_units for i in u]
    ri = [i for u in right_units for i in u]
    return PartitionedData(
        mu=data.nodes[li], v=data.values[li], lam=data.nodes[ri], w=data.values[ri]
    )


def build_pencil(pd: PartitionedData) -> LoewnerPencil:
    """Assemble the complex-flavor Loewner pencil from partitioned data."""
    den = pd.mu[:, None] - pd.lam[None, :]
    if np.any(den == 0):
        raise NodeCollision("zero denominator: a left node equals a right node")
    L = (pd.v[:, None] - pd.w[None, :]) / den
    Ls = (pd.mu[:, None] * pd.v[:, None] - pd.lam[None, :] * pd.w[None, :]) / den
    pencil = LoewnerPencil(
        L=L,
        Ls=Ls,
        V=pd.v.copy(),
        W=pd.w.copy(),
        M=np.diag(pd.mu),
        Lam=np.diag(pd.lam),
        ones_left=np.ones(pd.mu.size, dtype=complex),
        ones_right=np.ones(pd.lam.size, dtype=complex),
        flavor="complex",
        left_nodes=pd.mu.copy(),
        right_nodes=pd.lam.copy(),
    )
    diag = verify_pencil(pencil)
    if not diag.max_residual() <= IDENTITY_RTOL:
        raise NodeCollision(
            f"shift identities violated after assembly "
            f"(max residual {diag.max_residual():.3e}); nodes too close?"
        )
    return pencil


def verify_pencil(p: LoewnerPencil) -> PencilDiagnostics:
    """Relative residuals of the Sylvester equations and shift identities."""

    def rel(resid, *refs):
        scale = max(float(np.linalg.norm(r)) for r in refs)
        return float(np.linalg.norm(resid)) / scale if scale > 0 else 0.0

    if p.left_nodes is not None:
        ML = p.left_nodes[:, None] * p.L
        MLs = p.left_nodes[:, None] * p.Ls
        LLam = p.L * p.right_nodes[None, :]
        LsLam = p.Ls * p.right_nodes[None, :]
        MV = p.left_nodes * p.V
        WLam = p.W * p.right_nodes
    else:
        ML = p.M @ p.L
        MLs = p.M @ p.Ls
        LLam = p.L @ p.Lam
        LsLam = p.Ls @ p.Lam
        MV = p.M @ p.V
        WLam = p.W @ p.Lam

    V1 = np.outer(p.V, p.ones_right)
    oneW = np.outer(p.ones_left, p.W)
    sylv_L = rel(ML - LLam - (V1 - oneW), ML, LLam, V1 - oneW)
    sylv_Ls = rel(
        MLs - LsLam - (np.outer(MV, p.ones_right) - np.outer(p.ones_left, WLam)),
        MLs,
        LsLam,
    )
    shift_right = rel(p.Ls - (LLam + V1), p.Ls)
    shift_left = rel(p.Ls - (ML + oneW), p.Ls)
    return PencilDiagnostics(sylv_L, sylv_Ls, shift_right, shift_left)


def _pair_starts(nodes):
    """First indices of adjacent conjugate pairs; validates pairing."""
    starts = []
    i = 0
    n = len(nodes)
    while i < n:
        if nodes[i].imag == 0.0:
            i += 1
        elif i + 1 < n and nodes[i + 1] == nodes[i].conjugate():
            starts.append(i)
            i += 2
        else:
            raise ImaginaryResidue(
                f"node {nodes[i]} has no adjacent conjugate partner; "
                f"conjugate-close the data before realifying"
            )
    return np.array(starts, dtype=int)


def _j_left(nodes, A):
    """Apply the block-unitary J from the left: rows of pairs combine."""
    A = np.atleast_2d(A)
    fi = _pair_starts(nodes)
    B = A.astype(complex).copy()
    if fi.size:
        si = fi + 1
        B[fi] = (A[fi] + A[si]) / _SQ2
        B[si] = 1j * (A[fi] - A[si]) / _SQ2
    return B


def _j_right_star(nodes, A):
    """Apply J^* from the right: columns of pairs combine."""
    A = np.atleast_2d(A)
    fi = _pair_starts(nodes)
    B = A.astype(complex).copy()
    if fi.size:
        si = fi + 1
        B[:, fi] = (A[:, fi] + A[:, si]) / _SQ2
        B[:, si] = -1j * (A[:, fi] - A[:, si]) / _SQ2
    return B


def _drop_imag(name, A):
    scale = np.linalg.norm(A)
    resid = np.linalg.norm(A.imag) / scale if scale > 0 else 0.0
    if resid > IMAG_RTOL:
        raise ImaginaryResidue(
            f"{name} keeps imaginary residue {resid:.3e} after realification; "
            f"data is mis-paired"
        )
    return np.ascontiguousarray(A.real)


def realify(p: LoewnerPencil) -> LoewnerPencil:
    """Unitary block transform of a conjugate-closed pencil to real form.

    Each adjacent conjugate pair is rotated by J2 = [[1, 1], [i, -i]] /
    sqrt(2) (rows on the left side, adjoint on columns of the right
    side); real nodes pass through.  Node matrices become 2x2 rotation
    blocks [[Re s, Im s], [-Im s, Re s]] and the Sylvester/shift
    identities keep holding with the transformed ones-vectors.
    """
    if p.flavor != "complex":
        raise ValueError("pencil is already realified")
    mu, lam = p.left_nodes, p.right_nodes
    Lr = _j_right_star(lam, _j_left(mu, p.L))
    Lsr = _j_right_star(lam, _j_left(mu, p.Ls))
    Vr = _j_left(mu, p.V[:, None])[:, 0]
    Wr = _j_right_star(lam, p.W[None, :])[0]
    Mr = _j_right_star(mu, _j_left(mu, p.M))
    Lamr = _j_right_star(lam, _j_left(lam, p.Lam))
    ones_l = _j_left(mu, p.ones_left[:, None])[:, 0]
    ones_r = _j_right_star(lam, p.ones_right[None, :])[0]
    return LoewnerPencil(
        L=_drop_imag("L", Lr),
        Ls=_drop_imag("Ls", Lsr),
        V=_drop_imag("V", Vr),
        W=_drop_imag("W", Wr),
        M=_drop_imag("M", Mr),
        Lam=_drop_imag("Lam", Lamr),
        ones_left=_drop_imag("ones_left", ones_l),
        ones_right=_drop_imag("ones_right", ones_r),
        flavor="realified",
    )


def svd_augmented(p: LoewnerPencil) -> SvdReport:
    """SVDs of the horizontal [L, Ls] and vertical [L; Ls] augmentations."""
    Y, sigma_row, _ = svd_thin(np.hstack([p.L, p.Ls]))
    _, sigma_col, X = svd_thin(np.vstack([p.L, p.Ls]))
    return SvdReport(sigma_row=sigma_row, sigma_col=sigma_col, Y=Y, X=X)


def select_order(report: SvdReport, tol: float) -> int:
    """Smallest order whose trailing normalized sigma_col falls below tol."""
    below = report.sigma_col_norm < tol
    if not np.any(below):
        return int(report.sigma_col.size)
    return int(np.argmax(below))


def reduce(p: LoewnerPencil, r: int = None, tol: float = None,
           report: SvdReport = None) -> ReducedModel:
    """Project the pencil to a descriptor model of order r.

    Exactly one of r and tol must be given; tol selects the order via
    :func:`select_order`.  Projection uses the leading left singular
    vectors Y of [L, Ls] on the row side and the leading right singular
    vectors X of [L; Ls] on the column side:

        E = -Y_r^* L X_r,  A = -Y_r^* Ls X_r,  B = Y_r^* V,  C = W X_r.

    A precomputed SvdReport can be passed to avoid repeating the SVDs.
    Raises OverTruncation when the projected E is numerically singular.
    """
    if (r is None) == (tol is None):
        raise ValueError("give exactly one of r and tol")
    if report is None:
        report = svd_augmented(p)
    if tol is not None:
        r = select_order(report, tol)
    max_r = min(report.Y.shape[1], report.X.shape[1])
    if not 1 <= r <= max_r:
        raise ValueError(f"order r = {r} outside [1, {max_r}]")
    Yr = report.Y[:, :r]
    Xr = report.X[:, :r]
    E = -(Yr.conj().T @ p.L @ Xr)
    A = -(Yr.conj().T @ p.Ls @ Xr)
    B = Yr.conj().T @ p.V
    C = p.W @ Xr
    cond = np.linalg.cond(E)
    if not np.isfinite(cond) or cond >= COND_LIMIT_REDUCED:
        raise OverTruncation(
            f"projected E numerically singular at order {r} "
            f"(cond estimate {cond:.3e}); reduce the order"
        )
    return ReducedModel(E=E, A=A, B=B, C=C)


def stagnation_index(sigma, ratio: float = 0.9, run_length: int = 10) -> int:
    """1-based index where a singular value decay first stagnates.

    Detects the earliest position from which ``run_length`` consecutive
    ratios sigma[i+1]/sigma[i] all exceed ``ratio`` (the plateau of a
    noisy Loewner spectrum).  Returns len(sigma) when no such run
    exists.
    """
    sigma = np.asarray(sigma, dtype=float)
    ratios = sigma[1:] / sigma[:-1]
    run = 0
    for j, rv in enumerate(ratios):
        run = run + 1 if rv > ratio else 0
        if run >= run_length:
            return j - run_length + 2
    return int(sigma.size)
