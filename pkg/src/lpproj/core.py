"""Finite l_p vectors, the normalized duality mapping, mask splitting, the
Lyapunov functional and the norm's directional derivative.

Every value is immutable after construction and every operation is a pure
function, so the whole module is safe to use from concurrent threads.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .backend import duality, lp_norm, lyapunov_value, pairing, psi_value
from .errors import InvalidInput, InvalidMask, ZeroVector

# Relative tolerance for region/boundary comparisons (ties resolve toward the
# closed set), feasibility slack, and certificate slack.
TOL_REGION = 1e-12
TOL_FEAS = 1e-10
TOL_CERT = 1e-9


@dataclass(frozen=True)
class LpParams:
    """Conjugate exponent pair (p, q) with 1/p + 1/q = 1 and p > 1."""

    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 1.0 and np.isfinite(self.p)):
            raise InvalidInput(f"exponent p must satisfy 1 < p < inf, got {self.p}")
        if abs(1.0 / self.p + 1.0 / self.q - 1.0) > 1e-14:
            raise InvalidInput(f"q={self.q} is not conjugate to p={self.p}")

    @classmethod
    def from_p(cls, p: float) -> "LpParams":
        p = float(p)
        if not (p > 1.0 and np.isfinite(p)):
            raise InvalidInput(f"exponent p must satisfy 1 < p < inf, got {p}")
        return cls(p, p / (p - 1.0))

    @property
    def conjugate(self) -> "LpParams":
        return LpParams(self.q, self.p)


@dataclass(frozen=True)
class LpVector:
    """Coordinates of a truncated l_p sequence together with its exponent."""

    coords: np.ndarray
    params: LpParams

    def __post_init__(self):
        arr = np.asarray(self.coords, dtype=float).copy()
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidInput("coords must be a 1-d array of length >= 1")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("coords must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @classmethod
    def of(cls, coords, p: float) -> "LpVector":
        return cls(np.asarray(coords, dtype=float), LpParams.from_p(p))

    def with_coords(self, coords) -> "LpVector":
        """New vector with the same exponent pair."""
        return LpVector(np.asarray(coords, dtype=float), self.params)

    @property
    def dim(self) -> int:
        return self.coords.size

    @property
    def p(self) -> float:
        return self.params.p

    @cached_property
    def norm(self) -> float:
        return lp_norm(self.coords, self.params.p)

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.coords == 0.0))

    def zero_like(self) -> "LpVector":
        return self.with_coords(np.zeros(self.dim))

    def allclose(self, other: "LpVector", tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coords - other.coords) <= tol))


@dataclass(frozen=True)
class IndexMask:
    """Nonempty set of coordinate indices defining the subspace l_p^M."""

    indices: frozenset

    def __post_init__(self):
        idx = frozenset(int(i) for i in self.indices)
        if not idx:
            raise InvalidMask("mask must be nonempty")
        if any(i < 0 for i in idx):
            raise InvalidMask("mask indices must be nonnegative")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, indices) -> "IndexMask":
        return cls(frozenset(indices))

    def validate_for_dim(self, n: int) -> None:
        bad = [i for i in self.indices if i >= n]
        if bad:
            raise InvalidMask(f"mask indices {sorted(bad)} out of range for dimension {n}")

    def bool_array(self, n: int) -> np.ndarray:
        self.validate_for_dim(n)
        out = np.zeros(n, dtype=bool)
        out[sorted(self.indices)] = True
        return out

    def covers(self, n: int) -> bool:
        """True when the mask is all of {0, ..., n-1}."""
        return len(self.indices) == n


def full_mask(n: int) -> IndexMask:
    return IndexMask.of(range(n))


def norm(x: LpVector) -> float:
    """The l_p norm (sum |x_i|^p)^(1/p)."""
    return x.norm


def duality_map(x: LpVector) -> LpVector:
    """Normalized duality mapping J.

    The image lives in the dual space l_q, so the returned vector carries the
    conjugate exponent pair: its ``norm`` is the dual norm, which equals
    ``norm(x)``.  The zero vector maps to the zero vector.
    """
    jx = duality(x.coords, x.params.p)
    return LpVector(jx, x.params.conjugate)


def pair(f: LpVector, x: LpVector) -> float:
    """Evaluation pairing <f, x> between a dual vector and a vector."""
    return pairing(f.coords, x.coords)


def split(x: LpVector, mask: IndexMask) -> tuple[LpVector, LpVector]:
    """Decompose x = x^M + x^{N\\M} into mask and off-mask parts."""
    sel = mask.bool_array(x.dim)
    xm = np.where(sel, x.coords, 0.0)
    xo = np.where(sel, 0.0, x.coords)
    return x.with_coords(xm), x.with_coords(xo)


def decompose_duality(x: LpVector, mask: IndexMask) -> tuple[float, float]:
    """Scalar weights (w_M, w_off) with Jx = w_M J(x^M) + w_off J(x^{N\\M}).

    A vanishing part contributes J(0) = 0, so its weight is reported as 0
    (as 1 for p = 2, where both weights are identically 1).
    """
    if x.is_zero:
        raise ZeroVector("decompose_duality requires x != 0")
    p = x.params.p
    nx = x.norm
    xm, xo = split(x, mask)

    def weight(part_norm: float) -> float:
        if part_norm == 0.0 and p != 2.0:
            return 0.0
        return (part_norm / nx) ** (p - 2.0)

    return weight(xm.norm), weight(xo.norm)


def lyapunov(x: LpVector, y: LpVector) -> float:
    """Lyapunov functional V(x, y) = ||x||^2 - 2 <Jx, y> + ||y||^2."""
    if x.params.p != y.params.p:
        raise InvalidInput("x and y must share the exponent")
    return lyapunov_value(x.coords, y.coords, x.params.p)


def psi(x: LpVector, v: LpVector) -> float:
    """Directional derivative of the norm: lim_{t->0+} (||x+tv|| - ||x||)/t.

    Closed form <Jx, v>/||x|| for x != 0; equals ||v|| at x = 0.  Extended by
    continuity to Psi(x, 0) = 0.
    """
    if x.params.p != v.params.p:
        raise InvalidInput("x and v must share the exponent")
    return psi_value(x.coords, v.coords, x.params.p)
