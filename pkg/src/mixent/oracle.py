"""Independent brute-force validators for the closed-form projected states.

Two routes, deliberately different from the constructors in
:mod:`mixent.schemes`:

* :func:`jc_fock_projected` evolves the full atom (x) truncated-Fock product
  state with the exact blockwise propagator and extracts the projected 4x4
  submatrix, never touching the closed-form entries.
* :func:`quadrature_projected` evaluates every matrix element of the four
  cross-Kerr schemes by two-dimensional Gauss-Hermite quadrature over the
  thermal coherent-state weight, using nothing but coherent-overlap values at
  the nodes.  Two-mode schemes tensor two 2D quadratures.

Node placement: the integrands are products of a wide thermal Gaussian
(precision u = 2/(V-1) per axis) and coherent overlaps that decay like
exp(-|alpha|^2).  Nodes are therefore centered at u d/(u+1) and scaled by
1/sqrt(u+1) -- the precision of the *product* -- which keeps every factor of
the integrand resolved for any V; scaling by the thermal width alone misses
the overlap peaks entirely once V >> 1.  In these coordinates each integrand
term reduces to exp(2 zeta x) with |zeta| <= 2 gamma, for which the default
order 80 is accurate to far below the validation tolerances.

Every quadrature result is re-evaluated at twice the order; a disagreement
above the grid tolerance raises :class:`OracleUnstableError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qlinalg import BipartiteMatrix
from .states import AtomFieldParams, CatBasis, MicroState, ThermalParams

__all__ = [
    "FockSpace",
    "OracleUnstableError",
    "ProjectionRangeError",
    "QuadratureGrid",
    "TruncationTailError",
    "fock_space_for",
    "jc_fock_projected",
    "jc_propagator",
    "quadrature_projected",
    "thermal_fock_matrix",
]

KERR_SCHEMES = ("kerr_micro_thermal", "bs", "tt", "direct_kerr")


class TruncationTailError(ValueError):
    """Thermal weight beyond the Fock truncation exceeds the allowed tail."""


class ProjectionRangeError(ValueError):
    """Projection indices do not fit inside the truncated space."""


class OracleUnstableError(RuntimeError):
    """Doubling the quadrature order moved a validated entry too much."""


@dataclass(frozen=True)
class FockSpace:
    """Truncated number basis {|0>, ..., |n_max>} with a tail budget.

    ``tail_tolerance`` bounds the thermal probability weight allowed above
    ``n_max``; consumers check it against the lambda they are given.
    """

    n_max: int
    tail_tolerance: float = 1e-12

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if not 0.0 < self.tail_tolerance < 1.0:
            raise ValueError("tail_tolerance must lie in (0, 1)")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def thermal_tail(self, lam: float) -> float:
        """Probability weight of the thermal state above n_max: lam^(n_max+1)."""
        return lam ** (self.n_max + 1)


def fock_space_for(
    lam: float, n: int = 0, tail_tolerance: float = 1e-12, n_cap: int = 2000
) -> FockSpace:
    """Smallest truncation meeting the tail budget, capped at ``n_cap``."""
    n_need = n + 2
    if lam > 0.0:
        n_tail = math.ceil(math.log(tail_tolerance) / math.log(lam)) - 1
        n_need = max(n_need, n_tail)
    if n_need > n_cap:
        raise TruncationTailError(
            f"lam={lam} needs n_max={n_need} > cap {n_cap} for tail {tail_tolerance}"
        )
    return FockSpace(n_max=max(n_need, 1), tail_tolerance=tail_tolerance)


def _thermal_weights(lam: float, n_max: int) -> np.ndarray:
    return (1.0 - lam) * lam ** np.arange(n_max + 1, dtype=float)


def thermal_fock_matrix(lam: float, space: FockSpace) -> BipartiteMatrix:
    """Truncated thermal state diag((1-lam) lam^k) as a (1, dim) bipartite matrix."""
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lam must lie in [0, 1), got {lam}")
    if space.thermal_tail(lam) > space.tail_tolerance:
        raise TruncationTailError(
            f"tail {space.thermal_tail(lam):.3e} exceeds budget {space.tail_tolerance:.0e}"
        )
    return BipartiteMatrix(1, space.dim, np.diag(_thermal_weights(lam, space.n_max)))


def jc_propagator(params: AtomFieldParams, space: FockSpace) -> np.ndarray:
    """Dense exchange-interaction propagator on atom (x) truncated Fock space.

    Index layout: row = atom * dim + k with atom 0 = ground, 1 = excited.
    The propagator is block diagonal over the doublets {|e,k>, |g,k+1>},
    rotating each by the angle gt sqrt(k+1); |g,0> is stationary and the top
    excited level is frozen so the construction stays exactly unitary.
    """
    dim = space.dim
    gt = params.gt
    u = np.eye(2 * dim, dtype=np.complex128)
    for k in range(space.n_max):
        theta = gt * math.sqrt(k + 1.0)
        c, s = math.cos(theta), math.sin(theta)
        ie = dim + k  # |e, k>
        ig = k + 1  # |g, k+1>
        u[ie, ie] = c
        u[ig, ig] = c
        u[ie, ig] = -1j * s
        u[ig, ie] = -1j * s
    return u


def jc_fock_projected(params: AtomFieldParams, space: FockSpace) -> BipartiteMatrix:
    """Evolve the atom-thermal product state exactly, project the field.

    The initial state is diagonal and the propagator block diagonal, so the
    evolved state decomposes into independent 2x2 doublet blocks; they are
    rotated exactly and the submatrix on field levels {n, n+1} is returned in
    the basis {|g,n>, |e,n>, |g,n+1>, |e,n+1>}.  Truncation never touches the
    returned block (only doublets n-1, n, n+1 contribute), but the thermal
    tail is still checked against the space's budget.
    """
    lam, p, n = params.lam, params.p, params.n
    q = 1.0 - p
    if space.thermal_tail(lam) > space.tail_tolerance:
        raise TruncationTailError(
            f"tail {space.thermal_tail(lam):.3e} exceeds budget {space.tail_tolerance:.0e}"
        )
    if n + 2 > space.n_max:
        raise ProjectionRangeError(
            f"projection onto {{{n}, {n + 1}}} needs n_max >= {n + 2}, got {space.n_max}"
        )
    pk = _thermal_weights(lam, space.n_max)
    thetas = params.gt * np.sqrt(np.arange(1, space.n_max + 1, dtype=float))
    c, s = np.cos(thetas), np.sin(thetas)
    w_e = p * pk[:-1]  # weight of |e,k> entering doublet k
    w_g = q * pk[1:]  # weight of |g,k+1> entering doublet k
    pop_e = np.concatenate([c * c * w_e + s * s * w_g, [p * pk[-1]]])
    pop_g = np.concatenate([[q * pk[0]], s * s * w_e + c * c * w_g])
    coh = 1j * c * s * (w_e - w_g)  # coefficient of |e,k><g,k+1|

    out = np.zeros((4, 4), dtype=np.complex128)
    out[0, 0] = pop_g[n]
    out[1, 1] = pop_e[n]
    out[2, 2] = pop_g[n + 1]
    out[3, 3] = pop_e[n + 1]
    out[1, 2] = coh[n]
    out[2, 1] = np.conj(coh[n])
    return BipartiteMatrix(2, 2, out)


@dataclass(frozen=True)
class QuadratureGrid:
    """Gauss-Hermite points per real axis plus the order-doubling budget."""

    order: int = 80
    doubling_tolerance: float = 1e-10

    def __post_init__(self) -> None:
        if not 1 <= self.order <= 320:
            raise ValueError(f"order must lie in [1, 320], got {self.order}")
        if self.doubling_tolerance <= 0.0:
            raise ValueError("doubling_tolerance must be positive")


@lru_cache(maxsize=32)
def _gh_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.hermite.hermgauss(order)
    # log(w) + x^2 stays O(1); exponentiating w and exp(x^2) separately would
    # overflow near order 320.  Edge weights may underflow to 0 at very high
    # orders; their -inf log just drops the node.
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    return x, logw + x * x


@lru_cache(maxsize=256)
def _thermal_nodes(variance: float, displacement: float, order: int):
    """Quadrature nodes and positive weights for integral[P_th(V,d) f] d^2 alpha.

    The weight of every node folds the Gauss-Hermite weight, the Jacobian and
    the thermal Gaussian into a single exponential; f is evaluated as is.  At
    V = 1 the thermal weight is a point mass at d.
    """
    if variance == 1.0:
        return np.array([displacement + 0.0j]), np.array([1.0])
    u = 2.0 / (variance - 1.0)
    scale = 1.0 / math.sqrt(u + 1.0)
    center = u * displacement / (u + 1.0)
    x, logw = _gh_rule(order)
    alpha = center + scale * (x[:, None] + 1j * x[None, :])
    log_pth = math.log(2.0 / (math.pi * (variance - 1.0))) - u * np.abs(
        alpha - displacement
    ) ** 2
    logw2 = logw[:, None] + logw[None, :] + 2.0 * math.log(scale) + log_pth
    return alpha.ravel(), np.exp(logw2.ravel())


@lru_cache(maxsize=512)
def _sandwich_block(
    variance: float, displacement: float, gamma: float, order: int, w: int, wp: int
) -> np.ndarray:
    """Quadrature value of the 2x2 cat block <s| integral[P |w a><w' a|] |s'>."""
    alpha, weight = _thermal_nodes(variance, displacement, order)
    basis = CatBasis(gamma)
    left = np.vstack(basis.coherent_projection(w * alpha))  # rows: <+|, <-|
    right = np.vstack(basis.coherent_projection(wp * alpha))
    return (left * weight) @ right.conj().T


@lru_cache(maxsize=256)
def _bs_term_matrices(
    variance: float, displacement: float, gamma: float, order: int
) -> tuple[np.ndarray, ...]:
    """The four 4x4 term integrals of the beam-splitter state, weights applied later.

    Term order: direct (delta, -delta), direct mirrored, coherence, coherence
    mirrored.  Each entry sums <s1|x><y|s1'><s2|v><w|s2'> over the nodes with
    (x, y, v, w) the term's coherent arguments at delta = alpha/sqrt(2).
    """
    alpha, weight = _thermal_nodes(variance, displacement, order)
    basis = CatBasis(gamma)
    delta = alpha / math.sqrt(2.0)
    op = np.vstack(basis.coherent_projection(delta))
    om = np.vstack(basis.coherent_projection(-delta))
    combos = ((op, op, om, om), (om, om, op, op), (op, om, om, op), (om, op, op, om))
    out = []
    for a_ket, a_bra, b_ket, b_bra in combos:
        t = np.einsum(
            "n,an,bn,cn,dn->abcd", weight, a_ket, b_ket, a_bra.conj(), b_bra.conj()
        )
        out.append(t.reshape(4, 4))
    return tuple(out)


def _quad_kerr_micro_thermal(micro, thermal, basis, order):
    r = micro.r
    v, d, g = thermal.variance, thermal.displacement, basis.gamma
    out = np.zeros((4, 4), dtype=np.complex128)
    out[:2, :2] = _sandwich_block(v, d, g, order, 1, 1)
    out[2:, 2:] = _sandwich_block(v, d, g, order, -1, -1)
    out[:2, 2:] = r * _sandwich_block(v, d, g, order, 1, -1)
    out[2:, :2] = r * _sandwich_block(v, d, g, order, -1, 1)
    return 0.5 * out


def _quad_bs(micro, thermal, basis, sign, order):
    terms = _bs_term_matrices(thermal.variance, thermal.displacement, basis.gamma, order)
    weights = (1.0, 1.0, sign * micro.r, sign * micro.r)
    return sum(w * t for w, t in zip(weights, terms))


def _quad_tt(micro, thermal, basis, sign, order):
    v, d, g = thermal.variance, thermal.displacement, basis.gamma
    b_th = _sandwich_block(v, d, g, order, 1, 1)
    b_th_m = _sandwich_block(v, d, g, order, -1, -1)
    b_sig = _sandwich_block(v, d, g, order, 1, -1)
    b_sig_m = _sandwich_block(v, d, g, order, -1, 1)
    return (
        np.kron(b_th, b_th)
        + np.kron(b_th_m, b_th_m)
        + sign * micro.r * (np.kron(b_sig, b_sig) + np.kron(b_sig_m, b_sig_m))
    )


def _quad_direct_kerr(thermal, basis, order):
    # U|a>|b> spreads into the four parity combinations (+,+), (-,+), (+,-)
    # with weight 1/2 and (-,-) with weight -1/2; the projected state is the
    # signed sum of tensor products of single-mode sandwich blocks.
    v, d, g = thermal.variance, thermal.displacement, basis.gamma
    signs = {(1, 1): 0.5, (-1, 1): 0.5, (1, -1): 0.5, (-1, -1): -0.5}
    out = np.zeros((4, 4), dtype=np.complex128)
    for (w1, w2), s_ket in signs.items():
        for (w1p, w2p), s_bra in signs.items():
            block1 = _sandwich_block(v, d, g, order, w1, w1p)
            block2 = _sandwich_block(v, d, g, order, w2, w2p)
            out += s_ket * s_bra * np.kron(block1, block2)
    return out


def _quad_once(scheme, micro, thermal, basis, sign, order):
    if scheme == "kerr_micro_thermal":
        return _quad_kerr_micro_thermal(micro, thermal, basis, order)
    if scheme == "bs":
        return _quad_bs(micro, thermal, basis, sign, order)
    if scheme == "tt":
        return _quad_tt(micro, thermal, basis, sign, order)
    if scheme == "direct_kerr":
        return _quad_direct_kerr(thermal, basis, order)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {KERR_SCHEMES}")


def quadrature_projected(
    scheme: str,
    *,
    thermal: ThermalParams,
    basis: CatBasis,
    micro: MicroState | None = None,
    sign: int | None = None,
    grid: QuadratureGrid | None = None,
    check: bool = True,
) -> BipartiteMatrix:
    """Projected 4x4 matrix of a cross-Kerr scheme by brute-force quadrature.

    Scale conventions match the closed forms they validate: the
    micro-thermal scheme carries the 1/2 of its trace-one pre-projection
    state, ``bs``/``tt`` return the unnormalized conditional kernel (term
    weights 1, 1, +-r, +-r) and ``direct_kerr`` the projection of the
    trace-one evolved state.

    With ``check`` on (the default), the integral is evaluated at the grid
    order and at twice the order; entries must agree within the grid's
    doubling tolerance or :class:`OracleUnstableError` is raised.
    """
    grid = grid or QuadratureGrid()
    if scheme in ("kerr_micro_thermal", "bs", "tt") and micro is None:
        raise ValueError(f"scheme {scheme!r} needs the micro-state parameters")
    if scheme in ("bs", "tt"):
        if sign not in (1, -1):
            raise ValueError(f"scheme {scheme!r} needs sign=+1 or -1, got {sign!r}")
    fine = _quad_once(scheme, micro, thermal, basis, sign, 2 * grid.order)
    if check:
        coarse = _quad_once(scheme, micro, thermal, basis, sign, grid.order)
        dev = np.abs(coarse - fine)
        worst = float(dev.max())
        if worst > grid.doubling_tolerance:
            i, j = np.unravel_index(int(dev.argmax()), dev.shape)
            raise OracleUnstableError(
                f"{scheme}: quadrature self-convergence failed at entry ({i},{j}): "
                f"|order {grid.order} - order {2 * grid.order}| = {worst:.3e} "
                f"> {grid.doubling_tolerance:.0e} "
                f"(V={thermal.variance}, d={thermal.displacement}, gamma={basis.gamma})"
            )
    return BipartiteMatrix(2, 2, fine)
