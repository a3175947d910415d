"""Physical parameter sets and overlap kernels.

Displaced thermal fields, even/odd cat-state projection bases, the
vacuum/single-photon mixture, thermal atom-field parameters, and the
closed-form purities of all of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qlinalg import BipartiteMatrix

__all__ = [
    "AtomFieldParams",
    "CatBasis",
    "CatKernels",
    "MicroState",
    "ThermalParams",
    "atom_purity",
    "coherent_overlap",
    "field_purity",
    "micro_state_matrix",
    "scaled_cat_kernels",
    "thermal_cat_kernels",
]


def coherent_overlap(a, b):
    """Overlap <a|b> = exp[-(|a|^2 + |b|^2)/2 + conj(a) b] of coherent states.

    Accepts scalars or numpy arrays (broadcasting); |result| <= 1 always.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    out = np.exp(-(np.abs(a) ** 2 + np.abs(b) ** 2) / 2.0 + np.conj(a) * b)
    if out.ndim == 0:
        return complex(out)
    return out


def _real_scalar(value, name: str) -> float:
    x = complex(value)
    if x.imag != 0.0:
        raise ValueError(f"{name} must be real, got {value!r}")
    if not math.isfinite(x.real):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return x.real


@dataclass(frozen=True)
class ThermalParams:
    """Displaced thermal field with quadrature variance V >= 1.

    The coherent-state weight function is a Gaussian of variance (V-1)/4 per
    quadrature centered at the real displacement d; V = 1 is the pure
    coherent (or vacuum) limit.  Mean photon number: (V-1)/2 + d^2.
    """

    variance: float
    displacement: float = 0.0

    def __post_init__(self) -> None:
        v = _real_scalar(self.variance, "variance")
        d = _real_scalar(self.displacement, "displacement")
        if v < 1.0:
            raise ValueError(f"variance must be >= 1, got {v}")
        object.__setattr__(self, "variance", v)
        object.__setattr__(self, "displacement", d)

    @property
    def mean_photon_number(self) -> float:
        return (self.variance - 1.0) / 2.0 + self.displacement**2

    @property
    def purity(self) -> float:
        """1/V, independent of the displacement (displacing is unitary)."""
        return 1.0 / self.variance

    @property
    def boltzmann_ratio(self) -> float:
        """The lambda of the undisplaced thermal state with the same V."""
        return (self.variance - 1.0) / (self.variance + 1.0)


@dataclass(frozen=True)
class CatBasis:
    """Orthonormal even/odd superpositions of |gamma> and |-gamma>.

    |+-> = N_pm (|gamma> +- |-gamma>), N_pm = 1/sqrt(2(1 +- exp(-2 gamma^2))).
    gamma is restricted to real positive values.
    """

    gamma: float

    def __post_init__(self) -> None:
        g = _real_scalar(self.gamma, "gamma")
        if g <= 0.0:
            raise ValueError(f"gamma must be > 0, got {g}")
        object.__setattr__(self, "gamma", g)

    @property
    def n_plus(self) -> float:
        return 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-2.0 * self.gamma**2)))

    @property
    def n_minus(self) -> float:
        # 1 - exp(-2 g^2) via expm1 to keep precision at small gamma
        return 1.0 / math.sqrt(2.0 * (-math.expm1(-2.0 * self.gamma**2)))

    def coherent_projection(self, alpha):
        """(<+|alpha>, <-|alpha>) for a scalar or array of amplitudes."""
        up = coherent_overlap(self.gamma, alpha)
        dn = coherent_overlap(-self.gamma, alpha)
        return self.n_plus * (up + dn), self.n_minus * (up - dn)


@dataclass(frozen=True)
class MicroState:
    """Vacuum/single-photon mixture with coherence r in [0, 1].

    As a 2x2 matrix: [[1, r], [r, 1]] / 2, with purity (1 + r^2)/2.
    """

    r: float

    def __post_init__(self) -> None:
        r = _real_scalar(self.r, "r")
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"r must lie in [0, 1], got {r}")
        object.__setattr__(self, "r", r)

    @property
    def purity(self) -> float:
        return (1.0 + self.r**2) / 2.0


def micro_state_matrix(m: MicroState) -> BipartiteMatrix:
    """The 2x2 density matrix of the vacuum/single-photon mixture."""
    r = m.r
    entries = np.array([[0.5, 0.5 * r], [0.5 * r, 0.5]], dtype=np.complex128)
    return BipartiteMatrix(2, 1, entries)


@dataclass(frozen=True)
class AtomFieldParams:
    """Two-level atom mixed with weight p on |e>, thermal field ratio lam.

    ``lam`` in [0, 1) is the Boltzmann weight ratio of the field (photon
    number k carries weight (1 - lam) lam^k); the infinite-temperature limit
    is probed with lam close to 1, never stored exactly.  ``gt`` is the
    coupling-time product in radians and ``n`` the field projection index.
    """

    p: float
    lam: float
    gt: float
    n: int = 0

    def __post_init__(self) -> None:
        p = _real_scalar(self.p, "p")
        lam = _real_scalar(self.lam, "lam")
        gt = _real_scalar(self.gt, "gt")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {p}")
        if not 0.0 <= lam < 1.0:
            raise ValueError(f"lam must lie in [0, 1), got {lam}")
        if gt < 0.0:
            raise ValueError(f"gt must be >= 0, got {gt}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise ValueError(f"n must be a nonnegative integer, got {self.n!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "gt", gt)
        object.__setattr__(self, "n", int(self.n))

    @property
    def atom_purity(self) -> float:
        return atom_purity(self.p)

    @property
    def field_purity(self) -> float:
        return field_purity(self.lam)

    def photon_weight(self, k: int) -> float:
        """(1 - lam) lam^k for k >= 0, zero for negative k."""
        if k < 0:
            return 0.0
        return (1.0 - self.lam) * self.lam**k


def atom_purity(p: float) -> float:
    """2 (p - 1/2)^2 + 1/2: 1 for a pure atom, 1/2 when maximally mixed."""
    return 2.0 * (p - 0.5) ** 2 + 0.5


def field_purity(lam: float) -> float:
    """(1 - lam)/(1 + lam): 1 at zero temperature, -> 0 as lam -> 1."""
    return (1.0 - lam) / (1.0 + lam)


class CatKernels(NamedTuple):
    """Gaussian sandwich kernels of a displaced thermal state in a cat basis.

    With V the variance, d the displacement and g the cat amplitude:

      c = (4/(V+1)) exp[-2(g^2 + d^2)/(V+1)] cosh[4 g d/(V+1)]
      s = (4/(V+1)) exp[-2(g^2 + d^2)/(V+1)] sinh[4 g d/(V+1)]
      r = (4/(V+1)) exp[-2(V g^2 + d^2)/(V+1)]

    c and r are even in d, s is odd; c >= |s| always; s = 0 exactly at d = 0.
    """

    c: float
    s: float
    r: float


def _log_cosh(y: float) -> float:
    y = abs(y)
    if y > 20.0:
        return y - math.log(2.0) + math.log1p(math.exp(-2.0 * y))
    return math.log(math.cosh(y))


def scaled_cat_kernels(t: ThermalParams, basis: CatBasis) -> tuple[CatKernels, float]:
    """Kernels normalized to c = 1, plus log(c) carried separately.

    s/c = tanh(y) and r/c = exp(-2 g^2 (V-1)/(V+1))/cosh(y) are representable
    for any parameters, while c itself underflows once 2 d^2/(V+1) passes the
    exponent range.  Quantities that are invariant under a common positive
    rescaling (NPT of the trace-normalized state, most prominently) should be
    computed from the normalized kernels; absolute scales are recovered from
    the returned log.
    """
    v = t.variance
    d = t.displacement
    g = basis.gamma
    x = -2.0 * (g * g + d * d) / (v + 1.0)
    y = 4.0 * g * d / (v + 1.0)
    log_c = math.log(4.0 / (v + 1.0)) + x + _log_cosh(y)
    s_hat = math.tanh(y)
    log_r_hat = -2.0 * g * g * (v - 1.0) / (v + 1.0) - _log_cosh(y)
    r_hat = math.exp(log_r_hat) if log_r_hat > -745.0 else 0.0
    return CatKernels(c=1.0, s=s_hat, r=r_hat), log_c


def thermal_cat_kernels(t: ThermalParams, basis: CatBasis) -> CatKernels:
    """Closed-form kernels at their true scale.

    Safe far outside the naive exp * cosh range: the scale is assembled in
    log space, so displacements of order 10^3 neither overflow nor produce
    inf * 0 (the values simply underflow to zero once they pass the double
    range; use :func:`scaled_cat_kernels` for scale-invariant work).
    """
    hat, log_c = scaled_cat_kernels(t, basis)
    c = math.exp(log_c) if log_c > -745.0 else 0.0
    return CatKernels(c=c, s=hat.s * c, r=hat.r * c)
