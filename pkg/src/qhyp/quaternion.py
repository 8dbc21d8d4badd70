"""Quaternion arithmetic.

Two layers live here.  :class:`Quaternion` is a small immutable scalar type
for the public API.  The ``q*`` functions work on float arrays whose last
axis holds ``(w, x, y, z)`` and are what the matrix code uses.  Arrays are
multiplied through the splitting ``q = (w + x i) + (y + z i) j`` so that a
quaternion matrix becomes a pair of complex matrices ``(A, B)`` with

    (A1 + B1 j)(A2 + B2 j) = (A1 A2 - B1 conj(B2)) + (A1 B2 + B1 conj(A2)) j
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroQuaternion

__all__ = [
    "Quaternion",
    "ComplexRep",
    "mul",
    "similarity_class",
    "qarray",
    "qmul",
    "qconj",
    "qabs",
    "qnorm2",
    "qinv",
    "qmatmul",
    "qH",
    "split",
    "join",
    "embed",
    "unembed_vector",
    "embed_vector",
]

ZERO_MODULUS = 1e-300


# ---------------------------------------------------------------------------
# array layer


def qarray(obj) -> np.ndarray:
    """Coerce nested lists of 4-arrays (or Quaternions) to a float array."""
    if isinstance(obj, Quaternion):
        return obj.to_array()
    if isinstance(obj, (list, tuple)) and obj and _has_quaternions(obj):
        return np.stack([qarray(o) for o in obj])
    a = np.asarray(obj, dtype=float)
    if a.shape[-1:] != (4,):
        raise ValueError(f"last axis must have length 4, got shape {a.shape}")
    return a


def _has_quaternions(obj):
    while isinstance(obj, (list, tuple)) and obj:
        if isinstance(obj[0], Quaternion):
            return True
        obj = obj[0]
    return False


def split(q):
    """Return the complex pair ``(w + x i, y + z i)``."""
    c = np.ascontiguousarray(q, dtype=float).view(np.complex128)
    return c[..., 0], c[..., 1]


def join(a, b) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    shape = a.shape if a.shape == b.shape else np.broadcast_shapes(a.shape, b.shape)
    out = np.empty(shape + (2,), dtype=np.complex128)
    out[..., 0] = a
    out[..., 1] = b
    return out.view(float)


def qmul(p, q) -> np.ndarray:
    """Elementwise Hamilton product with numpy broadcasting."""
    a1, b1 = split(p)
    a2, b2 = split(q)
    return join(a1 * a2 - b1 * np.conj(b2), a1 * b2 + b1 * np.conj(a2))


def qconj(q) -> np.ndarray:
    q = np.array(q, dtype=float)
    q[..., 1:] *= -1
    return q


def qnorm2(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.sum(q * q, axis=-1)


def qabs(q) -> np.ndarray:
    return np.sqrt(qnorm2(q))


def qinv(q) -> np.ndarray:
    n2 = qnorm2(q)
    if np.any(n2 == 0):
        raise ZeroQuaternion("inverse of zero quaternion")
    return qconj(q) / n2[..., None]


def qmatmul(X, Y) -> np.ndarray:
    """Matrix product of quaternion matrices of shapes (m, k, 4) and (k, p, 4)."""
    a1, b1 = split(X)
    a2, b2 = split(Y)
    return join(a1 @ a2 - b1 @ np.conj(b2), a1 @ b2 + b1 @ np.conj(a2))


def qH(X) -> np.ndarray:
    """Quaternionic conjugate transpose of a (m, p, 4) matrix."""
    return np.swapaxes(qconj(X), 0, 1)


def embed(X) -> np.ndarray:
    """Complex adjoint embedding ``A + B j -> [[A, B], [-conj(B), conj(A)]]``.

    This is a ring homomorphism, so products and inverses commute with it.
    """
    a, b = split(X)
    return np.block([[a, b], [-np.conj(b), np.conj(a)]])


def embed_vector(z) -> np.ndarray:
    """Map ``z = x + y j`` to ``(x, -conj(y))`` so that embed(M) @ v(z) = v(M z)."""
    x, y = split(z)
    return np.concatenate([x, -np.conj(y)])


def unembed_vector(v) -> np.ndarray:
    """Inverse of :func:`embed_vector`; right multiplication by a complex
    scalar commutes with it, so complex eigenvectors map to quaternionic ones."""
    v = np.asarray(v)
    m = v.shape[0] // 2
    return join(v[:m], -np.conj(v[m:]))


def unembed(M) -> np.ndarray:
    m = M.shape[0] // 2
    return join(M[:m, :m], M[:m, m:])


# ---------------------------------------------------------------------------
# scalar layer


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"non-finite quaternion component {name}={v}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float).reshape(4)
        return cls(*a)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def to_json(self):
        return [self.w, self.x, self.y, self.z]

    @classmethod
    def from_json(cls, data) -> "Quaternion":
        if len(data) != 4:
            raise ValueError("quaternion must be a 4-array [w, x, y, z]")
        return cls(*data)

    def __iter__(self):
        return iter((self.w, self.x, self.y, self.z))

    def __add__(self, other):
        other = _coerce(other)
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self * (1.0 / other)
        return self * _coerce(other).inverse()

    def __abs__(self):
        return math.sqrt(self.norm2())

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inverse(self) -> "Quaternion":
        n2 = self.norm2()
        if n2 == 0.0:
            raise ZeroQuaternion("inverse of zero quaternion")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    @property
    def real(self) -> float:
        return self.w

    def isclose(self, other, tol=1e-12) -> bool:
        return abs(self - _coerce(other)) <= tol


def _coerce(v) -> Quaternion:
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, (int, float)):
        return Quaternion(float(v))
    if isinstance(v, complex):
        return Quaternion(v.real, v.imag)
    return Quaternion.from_array(v)


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product ``p q``."""
    return Quaternion(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )


@dataclass(frozen=True)
class ComplexRep:
    """The complex number ``modulus * exp(i angle)`` with angle in [0, pi]."""

    modulus: float
    angle: float

    def to_complex(self) -> complex:
        return self.modulus * complex(math.cos(self.angle), math.sin(self.angle))


def similarity_class(q) -> ComplexRep:
    """Unique complex representative of ``{u q u^-1}`` with non-negative
    imaginary part.

    >>> similarity_class(Quaternion(-5.0))
    ComplexRep(modulus=5.0, angle=3.141592653589793)
    """
    q = _coerce(q)
    m = abs(q)
    if m < ZERO_MODULUS:
        raise ZeroQuaternion("similarity class of the zero quaternion")
    return ComplexRep(m, math.atan2(math.hypot(q.x, q.y, q.z), q.w))
