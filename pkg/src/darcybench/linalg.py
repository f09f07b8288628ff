"""Linear-algebra kernels behind the flow solvers.

Direct solves delegate to LAPACK (via scipy); the SPD iterative path is a
conjugate-gradient iteration preconditioned by incomplete Cholesky IC(0),
falling back to diagonal Jacobi when the factorization breaks down.  The
strict default tolerance (1e-10 relative residual) keeps discretization
error dominant wherever the systems are tractable at all; the exponential-
correlation benchmark cases are ill-conditioned enough that solver error
would otherwise pollute the error tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ._ic0 import ic0_factor, lower_solve, lower_transpose_solve
from .exceptions import ConvergenceError, SingularMatrixError

_PIVOT_FLOOR = 1e-30


@dataclass
class TriDiag:
    """Tridiagonal matrix: sub/sup of length n-1 around a diagonal of length n."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        self.sub = np.asarray(self.sub, dtype=np.float64)
        self.diag = np.asarray(self.diag, dtype=np.float64)
        self.sup = np.asarray(self.sup, dtype=np.float64)
        n = self.diag.size
        if self.sub.size != max(n - 1, 0) or self.sup.size != max(n - 1, 0):
            raise ValueError("inconsistent tridiagonal band lengths")

    @property
    def n(self) -> int:
        return self.diag.size

    def to_csr(self) -> sp.csr_matrix:
        return sp.diags([self.sub, self.diag, self.sup], [-1, 0, 1], format="csr")

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[1:] += self.sub * x[:-1]
        y[:-1] += self.sup * x[1:]
        return y


@dataclass(eq=False)
class SparseSym:
    """Structurally symmetric sparse matrix in CSR arrays."""

    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    n: int

    @classmethod
    def from_triplets(cls, rows, cols, vals, n: int) -> "SparseSym":
        m = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        m.sum_duplicates()
        m.sort_indices()
        return cls(m.indptr, m.indices, m.data, n)

    @classmethod
    def from_csr(cls, m: sp.csr_matrix) -> "SparseSym":
        m = m.tocsr()
        m.sort_indices()
        return cls(m.indptr, m.indices, m.data, m.shape[0])

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))

    def is_symmetric(self, tol: float = 0.0) -> bool:
        d = self.matrix - self.matrix.T
        return d.nnz == 0 or np.max(np.abs(d.data)) <= tol


@dataclass
class SpdResult:
    x: np.ndarray
    iterations: int
    relative_residual: float
    preconditioner: str
    residual_history: list = field(default_factory=list, repr=False)


def solve_tridiag(a: TriDiag, b) -> np.ndarray:
    """Direct tridiagonal solve (LAPACK gtsv)."""
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (a.n,):
        raise ValueError(f"rhs length {b.shape} does not match n={a.n}")
    if a.n == 1:
        if abs(a.diag[0]) < _PIVOT_FLOOR:
            raise SingularMatrixError("zero pivot in 1x1 system")
        return b / a.diag
    ab = np.zeros((3, a.n))
    ab[0, 1:] = a.sup
    ab[1, :] = a.diag
    ab[2, :-1] = a.sub
    try:
        x = scipy.linalg.solve_banded((1, 1), ab, b)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularMatrixError("non-finite solution from banded factorization")
    return x


def _ic0_preconditioner(a_csr: sp.csr_matrix):
    lower = sp.tril(a_csr, format="csr")
    lower.sort_indices()
    data = lower.data.copy()
    bad_row = ic0_factor(lower.shape[0], lower.indptr, lower.indices, data)
    if bad_row != 0:
        return None
    indptr, indices = lower.indptr, lower.indices
    n = lower.shape[0]

    def apply(r: np.ndarray) -> np.ndarray:
        y = np.empty_like(r)
        lower_solve(n, indptr, indices, data, r, y)
        lower_transpose_solve(n, indptr, indices, data, y)
        return y

    return apply


def solve_spd(a: SparseSym, b, tol: float = 1e-10, max_iter: int | None = None) -> SpdResult:
    """Preconditioned conjugate gradients for SPD systems.

    Raises ConvergenceError (with the residual history attached) if the
    relative residual does not reach ``tol`` within ``max_iter`` iterations,
    and rejects matrices that reveal themselves as not positive definite.
    """
    mat = a.matrix
    b = np.asarray(b, dtype=np.float64)
    n = a.n
    if b.shape != (n,):
        raise ValueError(f"rhs length {b.shape} does not match n={n}")
    if max_iter is None:
        max_iter = max(1000, 10 * n)

    norm_b = np.linalg.norm(b)
    if norm_b == 0.0:
        return SpdResult(np.zeros(n), 0, 0.0, "none")

    apply_m = _ic0_preconditioner(mat)
    precond = "ic0"
    if apply_m is None:
        diag = mat.diagonal()
        if np.any(diag <= 0.0):
            raise ConvergenceError("matrix has nonpositive diagonal; not SPD")
        inv_diag = 1.0 / diag
        apply_m = lambda r: r * inv_diag  # noqa: E731
        precond = "jacobi"

    x = np.zeros(n)
    r = b.copy()
    z = apply_m(r)
    p = z.copy()
    rz = float(r @ z)
    history = []
    for it in range(1, max_iter + 1):
        ap = mat @ p
        pap = float(p @ ap)
        if pap <= 0.0:
            raise ConvergenceError(
                f"nonpositive curvature p'Ap={pap:.3e}; matrix is not positive definite",
                residual_history=history,
            )
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        rel = float(np.linalg.norm(r) / norm_b)
        history.append(rel)
        if rel <= tol:
            return SpdResult(x, it, rel, precond, history)
        z = apply_m(r)
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new

    raise ConvergenceError(
        f"CG did not reach tol={tol:g} in {max_iter} iterations "
        f"(last relative residual {history[-1]:.3e})",
        residual_history=history,
    )


def solve_dense_lu(a, b) -> np.ndarray:
    """Dense partial-pivoting LU solve; pivots below 1e-30 are singular."""
    import warnings

    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    with warnings.catch_warnings():
        # the pivot check below raises on singularity; scipy's warning is noise
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    if np.min(np.abs(np.diag(lu))) < _PIVOT_FLOOR:
        raise SingularMatrixError("pivot below 1e-30 in dense LU")
    return scipy.linalg.lu_solve((lu, piv), b)


def condition_estimate(a) -> float:
    """1-norm condition estimate (within a factor ~10 of the true value).

    Accepts TriDiag, SparseSym, or dense arrays.  Sparse inputs use a full
    sparse factorization plus Hager-style 1-norm estimation on the inverse.
    """
    if isinstance(a, TriDiag):
        a = SparseSym.from_csr(a.to_csr())
    if isinstance(a, SparseSym):
        mat = a.matrix.tocsc()
        norm_a = spla.norm(mat, 1)
        try:
            factor = spla.splu(mat)
        except RuntimeError as exc:
            raise SingularMatrixError(str(exc)) from exc
        inv_op = spla.LinearOperator(mat.shape, matvec=factor.solve,
                                     rmatvec=lambda v: factor.solve(v, trans="T"))
        return float(norm_a * spla.onenormest(inv_op))
    a = np.asarray(a, dtype=np.float64)
    return float(np.linalg.cond(a, 1))
