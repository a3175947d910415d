"""Dense complex linear algebra for small bipartite operators.

Partial transposition, a cyclic Jacobi eigensolver for Hermitian matrices,
negativity of partial transpose (NPT) and purity utilities.  Everything here
is a pure function of its inputs; :class:`BipartiteMatrix` instances are
immutable after construction and safe to share across parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BipartiteMatrix",
    "DegenerateStateError",
    "HermiticityError",
    "InvalidShapeError",
    "NumericInputError",
    "hermitian_eigensystem",
    "max_abs_deviation",
    "min_eigenpair",
    "min_eigenvalue",
    "npt",
    "partial_transpose",
    "purity",
]

# Hermiticity defects below this are treated as float noise and symmetrized
# away; anything larger is a construction bug and is rejected.
HERMITICITY_TOL = 1e-10

# Jacobi stops once the off-diagonal Frobenius norm drops below this fraction
# of the input's Frobenius norm.
JACOBI_TOL = 1e-14


class InvalidShapeError(ValueError):
    """Matrix shape inconsistent with the declared factor dimensions."""


class NumericInputError(ValueError):
    """Non-finite entries where finite numbers are required."""


class HermiticityError(ValueError):
    """Hermiticity defect too large to be float noise."""


class DegenerateStateError(ValueError):
    """Operation needs a positive trace but the matrix has (near) zero trace."""


@dataclass(frozen=True, eq=False)
class BipartiteMatrix:
    """Square complex matrix on a tensor product H_A (x) H_B.

    Row-major logical indexing: the product basis vector ``(a, b)`` maps to
    row ``a * dim_b + b``.  Projected states stored in this container are
    Hermitian but generally have trace < 1 (local projections are not
    unitary), so nothing here assumes unit trace.
    """

    dim_a: int
    dim_b: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.dim_a < 1 or self.dim_b < 1:
            raise InvalidShapeError("factor dimensions must be positive")
        size = self.dim_a * self.dim_b
        arr = np.array(self.entries, dtype=np.complex128, order="C")
        if arr.shape != (size, size):
            raise InvalidShapeError(
                f"expected a {size}x{size} matrix for factors "
                f"({self.dim_a}, {self.dim_b}), got shape {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def size(self) -> int:
        return self.dim_a * self.dim_b

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermiticity_defect(self) -> float:
        """Largest entrywise deviation from m == m^dagger."""
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def scaled(self, factor: float) -> "BipartiteMatrix":
        return BipartiteMatrix(self.dim_a, self.dim_b, self.entries * factor)


def partial_transpose(m: BipartiteMatrix, which: str = "B") -> BipartiteMatrix:
    """Transpose one tensor factor of a bipartite matrix.

    For ``which="B"``: out[(a,b),(a',b')] = m[(a,b'),(a',b)].  The operation
    is a pure reindexing, so applying it twice returns the input bit-exactly;
    trace and Hermiticity are preserved.
    """
    da, db = m.dim_a, m.dim_b
    blocks = m.entries.reshape(da, db, da, db)
    if which == "B":
        out = blocks.transpose(0, 3, 2, 1)
    elif which == "A":
        out = blocks.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"factor selector must be 'A' or 'B', got {which!r}")
    return BipartiteMatrix(da, db, out.reshape(da * db, da * db))


def _frobenius(a: np.ndarray) -> float:
    return float(np.sqrt((np.abs(a) ** 2).sum()))


def hermitian_eigensystem(
    matrix: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = 60
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each complex off-diagonal entry a[p,q] = |g| e^{i phi} is eliminated by
    the unitary U = diag(1, e^{-i phi}) R(theta), where R is the classic real
    Jacobi rotation for the phase-stripped 2x2 block.  Convergence: the
    off-diagonal Frobenius norm falls below ``tol`` times the input norm.

    Returns eigenvalues in ascending order and the matching eigenvectors as
    columns of a unitary matrix.
    """
    a = np.array(matrix, dtype=np.complex128)
    n = a.shape[0]
    if a.ndim != 2 or a.shape != (n, n):
        raise InvalidShapeError(f"expected a square matrix, got shape {a.shape}")
    v = np.eye(n, dtype=np.complex128)
    scale = _frobenius(a)
    if scale == 0.0 or n == 1:
        w = np.diag(a).real.copy()
        return w, v

    threshold = tol * scale
    for _ in range(max_sweeps):
        absq = np.abs(a) ** 2
        np.fill_diagonal(absq, 0.0)
        off = float(np.sqrt(absq.sum()))
        if off <= threshold:
            w = np.diag(a).real.copy()
            order = np.argsort(w, kind="stable")
            return w[order], v[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                h = abs(g)
                if h == 0.0:
                    continue
                phase = g / h
                theta = (a[p, p].real - a[q, q].real) / (2.0 * h)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = -np.sign(theta) / (abs(theta) + np.hypot(1.0, theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # column block of U at (p, q)
                upp, upq = c, s
                uqp, uqq = -s * np.conj(phase), c * np.conj(phase)
                col_p = a[:, p] * upp + a[:, q] * uqp
                col_q = a[:, p] * upq + a[:, q] * uqq
                a[:, p], a[:, q] = col_p, col_q
                row_p = np.conj(upp) * a[p, :] + np.conj(uqp) * a[q, :]
                row_q = np.conj(upq) * a[p, :] + np.conj(uqq) * a[q, :]
                a[p, :], a[q, :] = row_p, row_q
                # the rotation zeroes (p, q) analytically; kill the roundoff
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                col_p = v[:, p] * upp + v[:, q] * uqp
                col_q = v[:, p] * upq + v[:, q] * uqq
                v[:, p], v[:, q] = col_p, col_q
    raise ArithmeticError("Jacobi eigensolver did not converge")


def _symmetrized_entries(m: BipartiteMatrix) -> np.ndarray:
    a = m.entries
    if not np.isfinite(a).all():
        raise NumericInputError("matrix has non-finite entries")
    defect = m.hermiticity_defect()
    if defect >= HERMITICITY_TOL:
        raise HermiticityError(
            f"hermiticity defect {defect:.3e} exceeds tolerance {HERMITICITY_TOL:.0e}"
        )
    return (a + a.conj().T) / 2.0


def min_eigenpair(m: BipartiteMatrix) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and its eigenvector, after silent symmetrization."""
    sym = _symmetrized_entries(m)
    w, v = hermitian_eigensystem(sym)
    return float(w[0]), v[:, 0]


def min_eigenvalue(m: BipartiteMatrix) -> float:
    return min_eigenpair(m)[0]


def npt(m: BipartiteMatrix, normalize: bool = True) -> float:
    """Negativity of partial transpose, -2 min(0, eps).

    ``eps`` is the smallest eigenvalue of the partial transpose on factor B.
    By default the matrix is first normalized by its trace, which is the
    convention used for every projected state in this package (the absolute
    scale carries no information); pass ``normalize=False`` to skip it.
    """
    pt = partial_transpose(m, "B")
    if normalize:
        tr = pt.trace().real
        # the floor keeps 1/tr finite; anything smaller is not a usable state
        if not tr > 1e-300:
            raise DegenerateStateError(f"cannot normalize matrix with trace {tr}")
        pt = pt.scaled(1.0 / tr)
    eps = min_eigenvalue(pt)
    return -2.0 * eps if eps < 0.0 else 0.0


def purity(m: BipartiteMatrix) -> float:
    """Tr[(m / Tr m)^2] of a Hermitian matrix with positive trace."""
    a = _symmetrized_entries(m)
    tr = float(np.trace(a).real)
    if not tr > 1e-300:
        raise DegenerateStateError(f"purity needs a positive trace, got {tr}")
    rho = a / tr
    return float(np.trace(rho @ rho).real)


def max_abs_deviation(a: BipartiteMatrix, b: BipartiteMatrix) -> float:
    """Largest entrywise |a - b|, the metric used by every oracle check."""
    if (a.dim_a, a.dim_b) != (b.dim_a, b.dim_b):
        raise InvalidShapeError("cannot compare matrices with different factors")
    return float(np.max(np.abs(a.entries - b.entries)))
