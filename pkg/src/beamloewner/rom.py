"""Reduced descriptor models: evaluation, poles, error reports."""

from dataclasses import dataclass

import numpy as np

from .data import FrequencyDataSet
from .exceptions import SingularMatrix
from .linalg import generalized_eigenvalues, solve_linear

# below this magnitude a reference value gets no relative-error entry
REL_DENOM_FLOOR = 1e-30


@dataclass(frozen=True)
class ReducedModel:
    """Descriptor system (E, A, B, C): H(s) = C (s E - A)^{-1} B.

    E, A are r x r, B is the input column (length r), C the output row
    (length r).  Realified pipelines produce real matrices; complex
    models are accepted for the complex Loewner flavor.
    """

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        E = np.atleast_2d(np.asarray(self.E))
        A = np.atleast_2d(np.asarray(self.A))
        B = np.asarray(self.B).reshape(-1)
        C = np.asarray(self.C).reshape(-1)
        r = E.shape[0]
        if E.shape != (r, r) or A.shape != (r, r) or B.size != r or C.size != r:
            raise ValueError(
                f"inconsistent dimensions: E {E.shape}, A {A.shape}, "
                f"B {B.shape}, C {C.shape}"
            )
        for name, a in (("E", E), ("A", A), ("B", B), ("C", C)):
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} contains non-finite entries")
            object.__setattr__(self, name, a)

    @property
    def order(self) -> int:
        return self.E.shape[0]

    def to_dict(self):
        """JSON-ready dict with row-major nested arrays (B as r x 1, C as 1 x r)."""
        def nested(a):
            return np.asarray(a, dtype=float).tolist()

        if np.iscomplexobj(self.E) or np.iscomplexobj(self.A):
            raise ValueError("only real models are serialized")
        return {
            "order": self.order,
            "E": nested(self.E),
            "A": nested(self.A),
            "B": nested(self.B[:, None]),
            "C": nested(self.C[None, :]),
        }

    @classmethod
    def from_dict(cls, d):
        model = cls(
            E=np.array(d["E"], dtype=float),
            A=np.array(d["A"], dtype=float),
            B=np.array(d["B"], dtype=float),
            C=np.array(d["C"], dtype=float),
        )
        if "order" in d and int(d["order"]) != model.order:
            raise ValueError(
                f"declared order {d['order']} does not match matrices ({model.order})"
            )
        return model


@dataclass(frozen=True)
class PoleReport:
    """Model poles (eigenvalues of the pencil (A, E)) and stability."""

    poles: np.ndarray
    max_real_part: float
    stable: bool


@dataclass(frozen=True)
class ErrorReport:
    """Pointwise deviation of a model from reference samples.

    rel_err entries are NaN where the reference magnitude is below
    REL_DENOM_FLOOR (a zero of the response); max_rel skips those.
    """

    nodes: np.ndarray
    abs_err: np.ndarray
    rel_err: np.ndarray
    max_abs: float
    max_rel: float


def eval_tf(m: ReducedModel, s) -> complex:
    """Evaluate H(s) = C (s E - A)^{-1} B via one linear solve."""
    try:
        x = solve_linear(s * m.E - m.A, m.B.astype(complex))
    except SingularMatrix as exc:
        raise SingularMatrix(f"s = {s} coincides with a model pole") from exc
    return complex(m.C @ x)


def eval_tf_grid(m: ReducedModel, nodes) -> np.ndarray:
    """Vectorized H over an array of s values (batched solves)."""
    nodes = np.asarray(nodes, dtype=complex)
    sys = nodes[:, None, None] * m.E[None] - m.A[None]
    rhs = np.broadcast_to(m.B.astype(complex), (nodes.size, m.order))
    try:
        x = np.linalg.solve(sys, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("a grid node coincides with a model pole") from exc
    values = x @ m.C.astype(complex)
    if not np.all(np.isfinite(values)):
        bad = nodes[~np.isfinite(values)][0]
        raise SingularMatrix(f"s = {bad} coincides with a model pole")
    return values


def poles(m: ReducedModel) -> PoleReport:
    """Poles as generalized eigenvalues of (A, E), sorted by real part."""
    vals = generalized_eigenvalues(m.A, m.E)
    order = np.lexsort((vals.imag, -vals.real))
    vals = vals[order]
    max_re = float(vals.real.max())
    return PoleReport(poles=vals, max_real_part=max_re, stable=max_re < 0.0)


def error_report(m: ReducedModel, reference: FrequencyDataSet) -> ErrorReport:
    """Pointwise |H_ref - H_model| and relative deviation over a grid."""
    if len(reference) == 0:
        raise ValueError("reference data is empty")
    h_model = eval_tf_grid(m, reference.nodes)
    abs_err = np.abs(reference.values - h_model)
    denom = np.abs(reference.values)
    rel_err = np.full_like(abs_err, np.nan)
    ok = denom >= REL_DENOM_FLOOR
    rel_err[ok] = abs_err[ok] / denom[ok]
    max_rel = float(np.nanmax(rel_err)) if np.any(ok) else float("nan")
    return ErrorReport(
        nodes=reference.nodes.copy(),
        abs_err=abs_err,
        rel_err=rel_err,
        max_abs=float(abs_err.max()),
        max_rel=max_rel,
    )
