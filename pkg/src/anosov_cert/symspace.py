"""Geometry of the symmetric space of SL(d, R).

Points are determinant-one symmetric positive-definite matrices and a group
element ``g`` acts by ``p -> g p g^T``.  The metric is the one induced by the
Killing form, so at the identity a tangent vector ``X`` (symmetric, trace
zero) has squared length ``2d * tr(X^2)`` and the geodesic it generates is
``t -> exp(2tX)``.  With this convention the vector-valued distance is half
the sorted log-eigenvalues of ``p^{-1/2} q p^{-1/2}``.

Simple roots are indexed 1..d-1 with ``alpha_i(X) = x_i - x_{i+1}`` for a
diagonal ``X`` with non-increasing entries.  A face type ``tau_mod`` is a set
of such indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import linalg

from anosov_cert.numeric import tolerances


class GeometryError(ValueError):
    """Invalid input to a symmetric-space operation."""


class WallProximityError(GeometryError):
    """A direction is too close to a Weyl chamber wall for its type to be defined."""

    def __init__(self, root: int, gap: float, tol: float):
        super().__init__(
            f"relative gap of simple root alpha_{root} is {gap:.3e} <= {tol:.1e}; "
            "direction is too close to a wall"
        )
        self.root = root
        self.gap = gap


def killing_norm(lam: np.ndarray) -> float:
    """Killing norm of the diagonal matrix with entries ``lam``."""
    lam = np.asarray(lam, dtype=float)
    return math.sqrt(2 * lam.size * float(np.dot(lam, lam)))


def _spd_power(eigvals: np.ndarray, eigvecs: np.ndarray, power: float) -> np.ndarray:
    return (eigvecs * eigvals**power) @ eigvecs.T


# -- domain types -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpdPoint:
    """A point of the symmetric space: SPD matrix with determinant 1."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise GeometryError(f"expected a square matrix of size >= 2, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise GeometryError("matrix has non-finite entries")
        tol = tolerances()
        scale = max(np.max(np.abs(a)), 1.0)
        if np.max(np.abs(a - a.T)) > tol.symmetry_rel * scale:
            raise GeometryError("matrix is not symmetric")
        a = 0.5 * (a + a.T)
        w = np.linalg.eigvalsh(a)
        if w[0] <= 0:
            raise GeometryError(f"matrix is not positive definite (smallest eigenvalue {w[0]:.3e})")
        logdet = float(np.sum(np.log(w)))
        if abs(math.expm1(logdet)) > tol.det_rel:
            raise GeometryError(f"determinant {math.exp(logdet)!r} is not 1")
        a = a * math.exp(-logdet / a.shape[0])
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def identity(cls, d: int) -> "SpdPoint":
        return cls(np.eye(d))

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def _eigh(self):
        return np.linalg.eigh(self.entries)

    @cached_property
    def sqrt(self) -> np.ndarray:
        return _spd_power(*self._eigh, 0.5)

    @cached_property
    def inv_sqrt(self) -> np.ndarray:
        return _spd_power(*self._eigh, -0.5)

    def act(self, g) -> "SpdPoint":
        g = as_group_element(g).entries
        return SpdPoint(g @ self.entries @ g.T)


@dataclass(frozen=True, eq=False)
class GroupElement:
    """An element of SL(d, R)."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise GeometryError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise GeometryError("matrix has non-finite entries")
        det = np.linalg.det(a)
        if abs(det - 1.0) > tolerances().det_rel:
            raise GeometryError(f"determinant {det!r} is not 1")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.entries @ as_group_element(other).entries)

    def inverse(self) -> "GroupElement":
        return GroupElement(np.linalg.inv(self.entries))

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.entries))


def as_group_element(g) -> GroupElement:
    return g if isinstance(g, GroupElement) else GroupElement(g)


@dataclass(frozen=True, eq=False)
class CartanVector:
    """Sorted trace-zero vector in the closed positive Weyl chamber."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float)
        if lam.ndim != 1 or lam.size < 2:
            raise GeometryError("Cartan vector must be a 1-d array of length >= 2")
        tol = tolerances().log_abs
        if np.any(np.diff(lam) > tol):
            raise GeometryError("Cartan vector entries must be non-increasing")
        if abs(float(np.sum(lam))) > tol:
            raise GeometryError("Cartan vector entries must sum to 0")
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @property
    def d(self) -> int:
        return self.lam.size

    def norm(self) -> float:
        return killing_norm(self.lam)

    def root(self, i: int) -> float:
        """Value of the simple root alpha_i (1-based)."""
        return float(self.lam[i - 1] - self.lam[i])

    def iota(self) -> "CartanVector":
        """The opposition involution: reverse and negate."""
        return CartanVector(-self.lam[::-1])


@dataclass(frozen=True, eq=False)
class TangentSym:
    """Tangent vector at ``base``.

    ``entries`` is the symmetric trace-zero matrix X in the frame moved to
    the identity by ``base^{-1/2}``: the geodesic it generates is
    ``base^{1/2} exp(2tX) base^{1/2}``.
    """

    base: SpdPoint
    entries: np.ndarray

    def __post_init__(self):
        x = np.array(self.entries, dtype=float)
        if x.shape != self.base.entries.shape:
            raise GeometryError("tangent vector and base point differ in size")
        tol = tolerances().log_abs
        if np.max(np.abs(x - x.T)) > tol * max(1.0, np.max(np.abs(x))):
            raise GeometryError("tangent vector is not symmetric")
        if abs(np.trace(x)) > tol * max(1.0, np.max(np.abs(x))):
            raise GeometryError("tangent vector is not trace-free")
        x = 0.5 * (x + x.T)
        x.setflags(write=False)
        object.__setattr__(self, "entries", x)

    def inner(self, other: "TangentSym") -> float:
        if other.base is not self.base and not np.array_equal(other.base.entries, self.base.entries):
            raise GeometryError("tangent vectors live at different base points")
        return 2 * self.base.d * float(np.sum(self.entries * other.entries))

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self), 0.0))

    def ambient(self) -> np.ndarray:
        """Velocity of the generated geodesic as a symmetric matrix."""
        s = self.base.sqrt
        return s @ (2.0 * self.entries) @ s


@dataclass(frozen=True)
class ModelConstants:
    d: int
    tau_mod: tuple[int, ...]
    kappa0: float
    zeta0: float
    c0: int
    antipodal_threshold: float
    zeta: tuple[float, ...] = field(repr=False)

    @property
    def zeta_profile(self) -> np.ndarray:
        return np.array(self.zeta)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "tau_mod": list(self.tau_mod),
            "kappa0": self.kappa0,
            "zeta0": self.zeta0,
            "c0": self.c0,
            "antipodal_threshold": self.antipodal_threshold,
            "zeta": list(self.zeta),
        }


# -- operations ---------------------------------------------------------------


def _normalize_tau(d: int, tau_mod: Optional[Iterable[int]]) -> tuple[int, ...]:
    if d < 2:
        raise GeometryError(f"d must be at least 2, got {d}")
    if tau_mod is None:
        return tuple(range(1, d))
    tau = tuple(sorted(set(int(i) for i in tau_mod)))
    if not tau:
        raise GeometryError("tau_mod must be nonempty")
    if tau[0] < 1 or tau[-1] > d - 1:
        raise GeometryError(f"tau_mod indices must lie in 1..{d - 1}")
    missing = [i for i in tau if d - i not in tau]
    if missing:
        raise GeometryError(
            f"tau_mod {list(tau)} is not iota-invariant: {missing[0]} is present but {d - missing[0]} is not"
        )
    return tau


def _face_projection(profile: np.ndarray, tau: Sequence[int]) -> np.ndarray:
    """Average ``profile`` over the blocks cut out by the roots in ``tau``."""
    out = np.empty_like(profile)
    cuts = [0, *tau, profile.size]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        out[lo:hi] = profile[lo:hi].mean()
    return out


def model_constants(
    d: int,
    tau_mod: Optional[Iterable[int]] = None,
    zeta: Optional[Sequence[float]] = None,
) -> ModelConstants:
    """Constants of the model chamber of SL(d, R) for the face type ``tau_mod``.

    ``tau_mod`` defaults to the full chamber {1, ..., d-1}.  The type ``zeta``
    defaults to the staircase ``(d+1-2i)_i`` averaged onto the face and
    normalised to Killing norm 1; a custom ``zeta`` (sorted, trace zero,
    iota-invariant, constant on the face blocks) may be supplied instead.
    """
    tau = _normalize_tau(d, tau_mod)
    if zeta is None:
        staircase = np.array([d + 1 - 2 * i for i in range(1, d + 1)], dtype=float)
        z = _face_projection(staircase, tau)
    else:
        z = np.array(zeta, dtype=float)
        if z.shape != (d,):
            raise GeometryError(f"zeta must have length {d}")
        if np.any(np.diff(z) > 0) or abs(z.sum()) > 1e-12 * max(1.0, np.abs(z).max()):
            raise GeometryError("zeta must be non-increasing with zero sum")
        if not np.allclose(z, -z[::-1], atol=1e-12):
            raise GeometryError("zeta must be iota-invariant")
        if not np.allclose(z, _face_projection(z, tau), atol=1e-12):
            raise GeometryError("zeta must lie on the tau_mod face")
    z = z / killing_norm(z)
    zeta0 = min(float(z[i - 1] - z[i]) for i in tau)
    if zeta0 <= 0:
        raise GeometryError("zeta must lie in the interior of the tau_mod face")
    kappa0 = 1.0 / math.sqrt(d)
    c0 = sum(1 for i in range(1, d + 1) for j in range(i + 1, d + 1) if any(i <= m < j for m in tau))
    return ModelConstants(
        d=d,
        tau_mod=tau,
        kappa0=kappa0,
        zeta0=zeta0,
        c0=c0,
        antipodal_threshold=zeta0**2 / kappa0**2,
        zeta=tuple(float(v) for v in z),
    )


def cartan_vector(g) -> CartanVector:
    """Cartan projection of ``g``: sorted logs of its singular values."""
    g = as_group_element(g)
    sv = linalg.svdvals(g.entries)
    lam = np.log(sv)
    return CartanVector(lam - lam.mean())


def _check_pair(p: SpdPoint, q: SpdPoint):
    if not isinstance(p, SpdPoint) or not isinstance(q, SpdPoint):
        raise GeometryError("expected SpdPoint arguments")
    if p.d != q.d:
        raise GeometryError("points have different dimensions")


def vector_distance(p: SpdPoint, q: SpdPoint) -> CartanVector:
    _check_pair(p, q)
    # eigenvalues of p^{-1} q, symmetric-definite generalized problem
    mu = linalg.eigh(q.entries, p.entries, eigvals_only=True)
    lam = 0.5 * np.log(mu[::-1])
    return CartanVector(lam - lam.mean())


def riem_distance(p: SpdPoint, q: SpdPoint) -> float:
    return vector_distance(p, q).norm()


def regularity_margin(p: SpdPoint, q: SpdPoint, mc: ModelConstants) -> float:
    """Smallest ratio alpha(d(p,q)) / d(p,q) over the roots of ``mc.tau_mod``."""
    vd = vector_distance(p, q)
    dist = vd.norm()
    if dist <= tolerances().log_abs:
        raise GeometryError("regularity margin is undefined for coincident points")
    return min(vd.root(i) for i in mc.tau_mod) / dist


def log_map(p: SpdPoint, q: SpdPoint) -> TangentSym:
    """Initial velocity of the unit-time geodesic from p to q (norm = distance)."""
    _check_pair(p, q)
    h = p.inv_sqrt
    w, u = np.linalg.eigh(h @ q.entries @ h)
    x = (u * (0.5 * np.log(w))) @ u.T
    return TangentSym(p, x - np.trace(x) / p.d * np.eye(p.d))


def riemannian_angle(p: SpdPoint, q: SpdPoint, r: SpdPoint) -> float:
    """Riemannian angle at p between the geodesics to q and to r."""
    x, y = log_map(p, q), log_map(p, r)
    nx, ny = x.norm(), y.norm()
    if nx == 0 or ny == 0:
        raise GeometryError("angle is undefined at a coincident point")
    return math.acos(min(1.0, max(-1.0, x.inner(y) / (nx * ny))))


def zeta_direction(p: SpdPoint, q: SpdPoint, mc: ModelConstants) -> TangentSym:
    """Unit tangent at p of type zeta in a common Weyl chamber with pq."""
    _check_pair(p, q)
    if p.d != mc.d:
        raise GeometryError("model constants are for a different dimension")
    h = p.inv_sqrt
    w, u = np.linalg.eigh(h @ q.entries @ h)
    lam = 0.5 * np.log(w[::-1])
    u = u[:, ::-1]
    lam = lam - lam.mean()
    norm = killing_norm(lam)
    tol = tolerances().eigen_gap_rel
    for i in mc.tau_mod:
        gap = (lam[i - 1] - lam[i]) / norm if norm > 0 else 0.0
        if gap <= tol:
            raise WallProximityError(i, gap, tol)
    z = (u * mc.zeta_profile) @ u.T
    return TangentSym(p, z)


def zeta_angle(p: SpdPoint, x: SpdPoint, y: SpdPoint, mc: ModelConstants) -> float:
    """The zeta-angle at p between the directions to x and to y, in [0, pi]."""
    z1 = zeta_direction(p, x, mc)
    z2 = zeta_direction(p, y, mc)
    return math.acos(min(1.0, max(-1.0, z1.inner(z2))))


def midpoint(p: SpdPoint, q: SpdPoint) -> SpdPoint:
    _check_pair(p, q)
    h = p.inv_sqrt
    w, u = np.linalg.eigh(h @ q.entries @ h)
    s = p.sqrt
    return SpdPoint(s @ _spd_power(w, u, 0.5) @ s)


def point_from_direction(lam: Sequence[float]) -> SpdPoint:
    """The point exp(2 diag(lam)) = exp(diag(lam)) . I on the standard flat."""
    lam = np.asarray(lam, dtype=float)
    return SpdPoint(np.diag(np.exp(2 * (lam - lam.mean()))))
