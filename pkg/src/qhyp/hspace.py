"""The right module H^{n,1}, its Hermitian form and the Bergman distance.

Vectors are float arrays of shape ``(n+1, 4)``; scalars act on the right.
The form is

    <z, w> = w* J z = sum_{i<n} conj(w_i) z_i - (conj(w_n) z_{n+1} + conj(w_{n+1}) z_n)

so the last two coordinates carry the hyperbolic plane, ``o`` has lift
``e_{n+1}`` and ``infinity`` has lift ``e_n``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryPoint, DimensionMismatch, PositiveVector, ZeroVector
from .quaternion import Quaternion, qarray, qconj, qmul, qnorm2, split

__all__ = [
    "PointKind",
    "ProjPoint",
    "signature",
    "herm",
    "herm_array",
    "null_tol",
    "classify_point",
    "bergman_distance",
    "cosh_distance",
    "origin",
    "infinity",
    "same_point",
    "rescale",
]

NULL_RTOL = 1e-9


class PointKind(enum.Enum):
    Interior = "Interior"
    Boundary = "Boundary"


def signature(n: int) -> np.ndarray:
    """Real (n+1)x(n+1) matrix J of the form."""
    J = np.eye(n + 1)
    J[n - 1:, n - 1:] = [[0.0, -1.0], [-1.0, 0.0]]
    return J


def _as_vector(z) -> np.ndarray:
    z = qarray(z)
    if z.ndim < 2:
        raise ValueError("a vector needs shape (n+1, 4)")
    if z.shape[-2] < 2:
        raise DimensionMismatch("H^{n,1} needs n >= 1, i.e. at least two coordinates")
    return z


def herm_array(z, w) -> np.ndarray:
    """<z, w> as a raw 4-array; broadcasts over leading axes."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    if z.shape[-2] != w.shape[-2]:
        raise DimensionMismatch(f"dimension mismatch: {z.shape[-2]} vs {w.shape[-2]}")
    wc = qconj(w)
    pos = qmul(wc[..., :-2, :], z[..., :-2, :]).sum(axis=-2)
    neg = qmul(wc[..., -2, :], z[..., -1, :]) + qmul(wc[..., -1, :], z[..., -2, :])
    return pos - neg


def herm(z, w) -> Quaternion:
    return Quaternion.from_array(herm_array(_as_vector(z), _as_vector(w)))


def norm_form(z) -> float:
    """The real number <z, z>."""
    z = np.asarray(z, dtype=float)
    return float(herm_array(z, z)[0])


def null_tol(z) -> float:
    """Scale-free tolerance for the null test: 1e-9 * (max row norm)^2."""
    z = np.asarray(z, dtype=float)
    return NULL_RTOL * float(np.max(qnorm2(z)))


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of the closed ball, stored as one of its lifts."""

    lift: np.ndarray
    kind: PointKind

    @property
    def dim(self) -> int:
        return self.lift.shape[0] - 1

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return same_point(self, other)

    def __hash__(self):
        return id(self)

    def to_json(self):
        return {"lift": self.lift.tolist()}

    @classmethod
    def from_json(cls, data) -> "ProjPoint":
        return classify_point(data["lift"])


def classify_point(z) -> ProjPoint:
    """Decide whether the lift ``z`` is an interior or a boundary point."""
    z = _as_vector(z)
    if not np.any(z):
        raise ZeroVector("zero vector has no projective class")
    q = norm_form(z)
    tol = null_tol(z)
    if q > tol:
        raise PositiveVector(f"<z,z> = {q:.3e} > 0: not in the closed domain")
    kind = PointKind.Boundary if abs(q) <= tol else PointKind.Interior
    z = z.copy()
    z.flags.writeable = False
    return ProjPoint(z, kind)


def origin(n: int) -> ProjPoint:
    z = np.zeros((n + 1, 4))
    z[n, 0] = 1.0
    return classify_point(z)


def infinity(n: int) -> ProjPoint:
    z = np.zeros((n + 1, 4))
    z[n - 1, 0] = 1.0
    return classify_point(z)


def _lift(p):
    return p.lift if isinstance(p, ProjPoint) else _as_vector(p)


def cosh_distance(p, q) -> float:
    """cosh of the Bergman distance, from cosh^2(rho/2) = |<p,q>|^2 / (<p,p><q,q>)."""
    z, w = _lift(p), _lift(q)
    zz = norm_form(z)
    ww = norm_form(w)
    if zz >= -null_tol(z) or ww >= -null_tol(w):
        raise BoundaryPoint("distance needs two interior points")
    c2 = float(qnorm2(herm_array(z, w))) / (zz * ww)
    return max(2.0 * c2 - 1.0, 1.0)


def bergman_distance(p, q) -> float:
    z, w = _lift(p), _lift(q)
    zz = norm_form(z)
    ww = norm_form(w)
    if zz >= -null_tol(z) or ww >= -null_tol(w):
        raise BoundaryPoint("distance needs two interior points")
    zh = z / math.sqrt(-zz)
    wh = w / math.sqrt(-ww)
    pq = herm_array(zh, wh)
    c = math.sqrt(float(qnorm2(pq)))
    if c > 2.0:
        return 2.0 * math.log(c + math.sqrt(c * c - 1.0))
    # close points: align the phase of wh so that <zh, wh u> = -c, then the
    # short vector d = zh - wh u has <d, d> = 4 sinh^2(rho / 4) exactly
    u = -pq / c
    d = zh - qmul(wh, u)
    s = math.sqrt(max(norm_form(d), 0.0)) / 2
    return 4.0 * math.asinh(s)


def rescale(p: ProjPoint, lam) -> ProjPoint:
    """Same point, lift multiplied on the right by ``lam``."""
    lam = qarray(lam)
    return ProjPoint(qmul(p.lift, lam), p.kind)


def same_point(p, q, tol: float = 1e-8) -> bool:
    """Projective equality: the two lifts span a quaternionic line.

    Tested through the complex embedding, where ``z`` and ``z j`` span the
    same two complex dimensions as ``w`` and ``w j`` iff the 4-column matrix
    has rank 2.
    """
    z, w = _lift(p), _lift(q)
    if z.shape != w.shape:
        return False
    cols = []
    for v in (z, w):
        v = v / math.sqrt(float(np.sum(qnorm2(v))))
        x, y = split(v)
        a = np.concatenate([x, -np.conj(y)])
        b = np.concatenate([y, np.conj(x)])  # embedding of v * j
        cols.extend([a, b])
    s = np.linalg.svd(np.stack(cols, axis=1), compute_uv=False)
    return bool(s[2] <= tol)


def scalar_ratio(z, w):
    """Quaternion ``lam`` minimising |z lam - w| (exact when w = z lam)."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    num = qmul(qconj(z), w).sum(axis=0)
    den = float(np.sum(qnorm2(z)))
    return num / den
