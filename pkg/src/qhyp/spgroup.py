"""Matrices in Sp(n,1).

An :class:`SpMatrix` is an (n+1)x(n+1) quaternion matrix with ``g* J g = J``.
Its blocks are named as in

        | A      alpha  beta |
    g = | eta    a      b    |        A: (n-1)x(n-1), alpha/beta columns,
        | theta  c      d    |        eta/theta rows, a..d scalars

and the inverse is ``J g* J``.  Eigen-data comes from the complex adjoint
embedding (see :func:`qhyp.quaternion.embed`), whose spectrum is the union of
the right-eigenvalue classes ``m e^{+-i beta}``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NearIdentity, NotLoxodromic, NotSymplectic, InternalError
from .hspace import PointKind, ProjPoint, norm_form, signature
from .quaternion import (
    ComplexRep,
    Quaternion,
    embed,
    join,
    qarray,
    qH,
    qinv,
    qmatmul,
    qmul,
    qnorm2,
    unembed_vector,
)

__all__ = [
    "SpMatrix",
    "IsometryClass",
    "LoxodromicData",
    "ClassificationWarning",
    "validate",
    "inverse",
    "identity_residuals",
    "IDENTITY_NAMES",
    "classify",
    "loxodromic_data",
    "power",
    "identity",
    "diagonal",
    "loxodromic_diagonal",
    "swap",
    "translation",
    "unitary_block",
    "random_unitary",
    "random_sp",
    "random_loxodromic",
]

VALIDATE_RTOL = 1e-9
TOL_EIG = 1e-7
NEAR_IDENTITY = 1e-12


class ClassificationWarning(UserWarning):
    """Raised for numerically borderline parabolic/elliptic decisions."""


class IsometryClass(enum.Enum):
    Elliptic = "Elliptic"
    Parabolic = "Parabolic"
    Loxodromic = "Loxodromic"


def _frob(X) -> float:
    return math.sqrt(float(np.sum(np.asarray(X) ** 2)))


class SpMatrix:
    """A validated element of Sp(n,1).  Instances are immutable."""

    __slots__ = ("entries", "n")

    def __init__(self, entries, _trusted=False):
        entries = np.array(entries, dtype=float)
        if not _trusted:
            raise TypeError("use validate() to build an SpMatrix")
        entries.flags.writeable = False
        self.entries = entries
        self.n = entries.shape[0] - 1

    # -- blocks -----------------------------------------------------------
    @property
    def A(self):
        return self.entries[: self.n - 1, : self.n - 1]

    @property
    def alpha(self):
        return self.entries[: self.n - 1, self.n - 1 : self.n]

    @property
    def beta(self):
        return self.entries[: self.n - 1, self.n :]

    @property
    def eta(self):
        return self.entries[self.n - 1 : self.n, : self.n - 1]

    @property
    def theta(self):
        return self.entries[self.n :, : self.n - 1]

    def scalar_blocks(self):
        """The raw 4-arrays ``(a, b, c, d)``."""
        n = self.n
        E = self.entries
        return E[n - 1, n - 1], E[n - 1, n], E[n, n - 1], E[n, n]

    @property
    def a(self) -> Quaternion:
        return Quaternion.from_array(self.scalar_blocks()[0])

    @property
    def b(self) -> Quaternion:
        return Quaternion.from_array(self.scalar_blocks()[1])

    @property
    def c(self) -> Quaternion:
        return Quaternion.from_array(self.scalar_blocks()[2])

    @property
    def d(self) -> Quaternion:
        return Quaternion.from_array(self.scalar_blocks()[3])

    # -- algebra ----------------------------------------------------------
    def __matmul__(self, other):
        if isinstance(other, SpMatrix):
            return SpMatrix(qmatmul(self.entries, other.entries), _trusted=True)
        if isinstance(other, ProjPoint):
            return self.act(other)
        v = qarray(other)
        if v.ndim == 2:
            return qmatmul(self.entries, v[:, None, :])[:, 0, :]
        return NotImplemented

    def __neg__(self):
        return SpMatrix(-self.entries, _trusted=True)

    def inverse(self) -> "SpMatrix":
        return inverse(self)

    def act(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(self @ p.lift, p.kind)

    def norm(self) -> float:
        return _frob(self.entries)

    def embed(self) -> np.ndarray:
        return embed(self.entries)

    def to_json(self):
        return {"n": self.n, "entries": self.entries.tolist()}

    @classmethod
    def from_json(cls, data) -> "SpMatrix":
        g = validate(data["entries"])
        if "n" in data and int(data["n"]) != g.n:
            raise ValueError(f"declared n={data['n']} but matrix has n={g.n}")
        return g

    def __repr__(self):
        return f"SpMatrix(n={self.n}, norm={self.norm():.4g})"


def validate(raw, tol: float = VALIDATE_RTOL) -> SpMatrix:
    """Accept ``raw`` iff ||g* J g - J|| <= tol * ||g||^2."""
    if isinstance(raw, SpMatrix):
        raw = raw.entries
    g = qarray(raw)
    if g.ndim != 3 or g.shape[0] != g.shape[1]:
        raise ValueError(f"expected a square quaternion matrix, got shape {g.shape}")
    if g.shape[0] < 2:
        raise ValueError("Sp(n,1) needs n >= 1")
    n = g.shape[0] - 1
    Jq = join(signature(n), np.zeros((n + 1, n + 1)))
    residual = _frob(qmatmul(qmatmul(qH(g), Jq), g) - Jq)
    if residual > tol * _frob(g) ** 2:
        raise NotSymplectic(residual)
    return SpMatrix(g, _trusted=True)


def inverse(g: SpMatrix) -> SpMatrix:
    """``J g* J`` assembled block by block."""
    n = g.n
    gs = qH(g.entries)
    # J g* J: permute/negate the last two rows and columns
    P = np.arange(n + 1)
    P[n - 1], P[n] = n, n - 1
    sign = np.ones(n + 1)
    sign[n - 1:] = -1.0
    out = gs[P][:, P] * sign[:, None, None] * sign[None, :, None]
    return SpMatrix(out, _trusted=True)


IDENTITY_NAMES = (
    "AA* - alpha beta* - beta alpha* = I",
    "-A theta* + alpha d' + beta c' = 0",
    "-A eta* + alpha b' + beta a' = 0",
    "-eta theta* + a d' + b c' = 1",
    "-eta eta* + a b' + b a' = 0",
    "-theta theta* + c d' + d c' = 0",
    "A*A - theta* eta - eta* theta = I",
    "A* alpha - theta* a - eta* c = 0",
    "A* beta - theta* b - eta* d = 0",
    "-beta* alpha + d' a + b' c = 1",
    "-beta* beta + d' b + b' d = 0",
    "-alpha* alpha + c' a + a' c = 0",
)


def identity_residuals(g: SpMatrix) -> list:
    """Frobenius residuals of the twelve block identities from g g^-1 = g^-1 g = I."""
    n = g.n
    m = n - 1
    A, al, be, et, th = g.A, g.alpha, g.beta, g.eta, g.theta
    a, b, c, d = (x.reshape(1, 1, 4) for x in g.scalar_blocks())
    H, M = qH, qmatmul
    Im = join(np.eye(m), np.zeros((m, m)))
    one = np.array([[[1.0, 0, 0, 0]]])
    res = [
        M(A, H(A)) - M(al, H(be)) - M(be, H(al)) - Im,
        -M(A, H(th)) + M(al, H(d)) + M(be, H(c)),
        -M(A, H(et)) + M(al, H(b)) + M(be, H(a)),
        -M(et, H(th)) + M(a, H(d)) + M(b, H(c)) - one,
        -M(et, H(et)) + M(a, H(b)) + M(b, H(a)),
        -M(th, H(th)) + M(c, H(d)) + M(d, H(c)),
        M(H(A), A) - M(H(th), et) - M(H(et), th) - Im,
        M(H(A), al) - M(H(th), a) - M(H(et), c),
        M(H(A), be) - M(H(th), b) - M(H(et), d),
        -M(H(be), al) + M(H(d), a) + M(H(b), c) - one,
        -M(H(be), be) + M(H(d), b) + M(H(b), d),
        -M(H(al), al) + M(H(c), a) + M(H(a), c),
    ]
    return [_frob(r) for r in res]


# ---------------------------------------------------------------------------
# spectra


def _eigenspace(Mc, lam, scale):
    s_tol = 1e-6 * scale
    _, s, Vh = np.linalg.svd(Mc - lam * np.eye(Mc.shape[0]))
    return Vh[s <= s_tol].conj().T


def _clusters(values, tol=1e-6):
    out = []
    for v in values:
        for cl in out:
            if abs(cl[0] - v) <= tol:
                cl.append(v)
                break
        else:
            out.append([v])
    return [np.mean(cl) for cl in out]


def classify(g: SpMatrix) -> IsometryClass:
    """Elliptic / parabolic / loxodromic by the fixed-point trichotomy."""
    n = g.n
    I = np.zeros_like(g.entries)
    I[np.arange(n + 1), np.arange(n + 1), 0] = 1.0
    if _frob(g.entries - I) < NEAR_IDENTITY or _frob(g.entries + I) < NEAR_IDENTITY:
        raise NearIdentity("classification is undefined for +-I")
    Mc = g.embed()
    ev = np.linalg.eigvals(Mc)
    mods = np.abs(ev)
    if mods.max() > 1.0 + TOL_EIG:
        return IsometryClass.Loxodromic
    if np.any(np.abs(mods - 1.0) > 1e-10):
        warnings.warn(
            f"unit-modulus decision is borderline (max |ev|-1 = {mods.max() - 1:.2e})",
            ClassificationWarning,
            stacklevel=2,
        )
    J2 = np.kron(np.eye(2), signature(n))
    scale = max(1.0, float(np.linalg.norm(Mc, 2)))
    found_null = False
    for lam in _clusters(ev):
        V = _eigenspace(Mc, lam, scale)
        if V.shape[1] == 0:
            continue
        G = V.conj().T @ J2 @ V
        w = np.linalg.eigvalsh((G + G.conj().T) / 2)
        if w.min() < -1e-9:
            return IsometryClass.Elliptic
        found_null = found_null or bool(np.any(np.abs(w) <= 1e-9))
    if not found_null:
        warnings.warn("no null eigenvector found; reporting Parabolic", ClassificationWarning, stacklevel=2)
    return IsometryClass.Parabolic


@dataclass(frozen=True)
class LoxodromicData:
    angles: tuple
    beta_n: float
    length: float
    delta: float
    mg: float
    fixed_attract: ProjPoint = field(repr=False)
    fixed_repel: ProjPoint = field(repr=False)
    lambda_n: ComplexRep = None
    lambda_n_bar_inv: ComplexRep = None

    def to_json(self):
        return {
            "angles": list(self.angles),
            "beta_n": self.beta_n,
            "length": self.length,
            "delta": self.delta,
            "Mg": self.mg,
            "fixed_attract": self.fixed_attract.to_json(),
            "fixed_repel": self.fixed_repel.to_json(),
        }


def _complex_rep(z: complex) -> ComplexRep:
    return ComplexRep(abs(z), abs(math.atan2(z.imag, z.real)))


def _fixed_point(g: SpMatrix, Mc, lam):
    w, V = np.linalg.eig(Mc)
    idx = int(np.argmin(np.abs(w - lam)))
    z = unembed_vector(V[:, idx])
    lam_q = np.array([lam.real, lam.imag, 0.0, 0.0])
    resid = _frob(g @ z - qmul(z, lam_q))
    if resid > 1e-8 * max(1.0, g.norm()) * _frob(z):
        raise InternalError(f"eigenvector reconstruction failed (residual {resid:.2e})")
    # normalise so the largest entry is 1
    k = int(np.argmax(qnorm2(z)))
    z = qmul(z, qinv(z[k]))
    q = norm_form(z) / float(np.max(qnorm2(z)))
    if abs(q) > 1e-6:
        raise InternalError(f"fixed point is not null (<z,z> = {q:.2e})")
    z.flags.writeable = False
    return ProjPoint(z, PointKind.Boundary)


def loxodromic_data(g: SpMatrix) -> LoxodromicData:
    """Rotation angles, translation length, delta(g), M_g and fixed points."""
    if classify(g) is not IsometryClass.Loxodromic:
        raise NotLoxodromic("element is not loxodromic")
    n = g.n
    Mc = g.embed()
    ev = np.linalg.eigvals(Mc)
    order = np.argsort(np.abs(ev))
    ev = ev[order]
    top, bottom, middle = ev[-2:], ev[:2], ev[2:-2]

    def rep(pair):
        return ComplexRep(float(np.mean(np.abs(pair))), float(np.mean(np.abs(np.angle(pair)))))

    lam_n = rep(top)
    lam_bar_inv = rep(bottom)
    mids = np.sort(np.abs(np.angle(middle)))
    angles = tuple(float(x) for x in (mids[0::2] + mids[1::2]) / 2) if n > 1 else ()
    delta = max((2.0 * math.sin(b / 2.0) for b in angles), default=0.0)
    mg = 2.0 * delta + abs(lam_n.to_complex() - 1.0) + abs(lam_bar_inv.to_complex() - 1.0)
    length = 2.0 * math.log(lam_n.modulus)
    attract = _fixed_point(g, Mc, top[np.argmax(top.imag)])
    repel = _fixed_point(g, Mc, bottom[np.argmax(bottom.imag)])
    return LoxodromicData(
        angles=angles,
        beta_n=lam_n.angle,
        length=length,
        delta=delta,
        mg=mg,
        fixed_attract=attract,
        fixed_repel=repel,
        lambda_n=lam_n,
        lambda_n_bar_inv=lam_bar_inv,
    )


def power(g: SpMatrix, k: int) -> SpMatrix:
    """g^k by repeated squaring; negative k goes through the inverse."""
    k = int(k)
    if k < 0:
        return power(inverse(g), -k)
    result = identity(g.n).entries
    base = g.entries
    while k:
        if k & 1:
            result = qmatmul(result, base)
        k >>= 1
        if k:
            base = qmatmul(base, base)
    return SpMatrix(result, _trusted=True)


# ---------------------------------------------------------------------------
# constructors


def _quat(v):
    if isinstance(v, Quaternion):
        return v.to_array()
    if isinstance(v, complex):
        return np.array([v.real, v.imag, 0.0, 0.0])
    if np.isscalar(v):
        return np.array([float(v), 0.0, 0.0, 0.0])
    return qarray(v)


def identity(n: int) -> SpMatrix:
    E = np.zeros((n + 1, n + 1, 4))
    E[np.arange(n + 1), np.arange(n + 1), 0] = 1.0
    return SpMatrix(E, _trusted=True)


def diagonal(entries) -> SpMatrix:
    entries = [_quat(v) for v in entries]
    m = len(entries)
    E = np.zeros((m, m, 4))
    for i, v in enumerate(entries):
        E[i, i] = v
    return validate(E)


def loxodromic_diagonal(n: int, length: float, beta_n: float = 0.0, angles=()) -> SpMatrix:
    """diag(e^{i b_1}, ..., e^{l/2 + i b_n}, e^{-l/2 + i b_n})."""
    angles = list(angles) + [0.0] * (n - 1 - len(angles))
    if len(angles) != n - 1:
        raise ValueError(f"expected {n - 1} rotation angles")
    lam = [complex(math.cos(b), math.sin(b)) for b in angles]
    lam.append(math.exp(length / 2) * complex(math.cos(beta_n), math.sin(beta_n)))
    lam.append(math.exp(-length / 2) * complex(math.cos(beta_n), math.sin(beta_n)))
    return diagonal(lam)


def swap(n: int) -> SpMatrix:
    """Involution exchanging the last two coordinates, i.e. o and infinity."""
    E = identity(n).entries.copy()
    E[n - 1, n - 1, 0] = E[n, n, 0] = 0.0
    E[n - 1, n, 0] = E[n, n - 1, 0] = 1.0
    return validate(E)


def translation(n: int, tau=None, v=None) -> SpMatrix:
    """Heisenberg translation fixing infinity.

    ``tau`` is a vector in H^{n-1}, ``v`` an imaginary quaternion; the matrix is
    [[I, 0, tau], [tau*, 1, |tau|^2/2 + v], [0, 0, 1]].
    """
    E = identity(n).entries.copy()
    tau = np.zeros((n - 1, 4)) if tau is None else qarray(tau).reshape(n - 1, 4)
    v = np.zeros(4) if v is None else _quat(v)
    if abs(v[0]) > 1e-15:
        raise ValueError("vertical part of a translation must be purely imaginary")
    E[: n - 1, n] = tau
    E[n - 1, : n - 1] = qH(tau[:, None, :])[0]
    s = v.copy()
    s[0] = float(np.sum(qnorm2(tau))) / 2.0
    E[n - 1, n] = s
    return validate(E)


def unitary_block(n: int, U) -> SpMatrix:
    """Embed an (n-1)x(n-1) quaternionic unitary in the first block."""
    E = identity(n).entries.copy()
    E[: n - 1, : n - 1] = qarray(U)
    return validate(E)


def random_unitary(m: int, rng) -> np.ndarray:
    """Quaternionic Gram-Schmidt on a Gaussian matrix."""
    X = rng.normal(size=(m, m, 4))
    cols = []
    for j in range(m):
        x = X[:, j]
        for u in cols:
            # x <- x - u (u* x)
            coef = qmul(qH(u[:, None, :])[0], x).sum(axis=0)
            x = x - qmul(u, coef)
        x = x / math.sqrt(float(np.sum(qnorm2(x))))
        cols.append(x)
    return np.stack(cols, axis=1) if m else np.zeros((0, 0, 4))


def _random_unit_quaternion(rng):
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def _random_imaginary(rng, scale):
    v = np.zeros(4)
    v[1:] = rng.normal(scale=scale, size=3)
    return v


def random_sp(n: int, rng, factors: int = 2, scale: float = 0.6) -> SpMatrix:
    """Random element built as a product of simple generators.

    The generators are normal-form quaternionic diagonals with random
    rotation and length, the swap, unitary rotations of the first block and
    Heisenberg translations.  A fixed skeleton ``D T S T R D T`` keeps every
    block generically non-zero; ``factors`` random generators are appended.
    """

    def draw(kind):
        if kind == 0:
            l = rng.uniform(-2 * scale, 2 * scale)
            u = _random_unit_quaternion(rng)
            lam = [_random_unit_quaternion(rng) for _ in range(n - 1)]
            lam += [math.exp(l / 2) * u, math.exp(-l / 2) * u]
            return diagonal(lam)
        if kind == 1:
            return swap(n)
        if kind == 2:
            return unitary_block(n, random_unitary(n - 1, rng))
        tau = rng.normal(scale=scale, size=(n - 1, 4))
        return translation(n, tau, _random_imaginary(rng, scale))

    kinds = [0, 3, 1, 3, 2, 0, 3] + list(rng.integers(4, size=factors))
    M = identity(n)
    for kind in kinds:
        M = M @ draw(int(kind))
    return validate(M.entries)


def random_loxodromic(n: int, rng, length=None, conjugate=True, l_range=(0.01, 0.5)):
    """A conjugated normal-form loxodromic; returns ``(g, diag, conjugator)``."""
    l = rng.uniform(*l_range) if length is None else length
    angles = rng.uniform(0, math.pi, size=n - 1)
    beta_n = rng.uniform(0, math.pi)
    D = loxodromic_diagonal(n, l, beta_n, angles)
    if not conjugate:
        return D, D, identity(n)
    h = random_sp(n, rng, factors=0, scale=0.4)
    return h @ D @ inverse(h), D, h


def axis_frame(u, v) -> SpMatrix:
    """An element C of Sp(n,1) with C(infinity) = u and C(o) = v.

    The last two columns are lifts of ``u`` and ``v`` scaled so that
    <u, v> = -1; the first n-1 columns are an orthonormal basis of their
    orthogonal complement, found by Gram-Schmidt for the form.
    """
    from .hspace import herm_array, same_point

    U = np.array(u.lift if isinstance(u, ProjPoint) else u, dtype=float)
    V = np.array(v.lift if isinstance(v, ProjPoint) else v, dtype=float)
    n = U.shape[0] - 1
    if same_point(U, V):
        raise ValueError("axis endpoints coincide")
    V = qmul(V, -qinv(herm_array(V, U)))
    basis = []
    candidates = list(np.eye(n + 1))
    for _ in range(n - 1):
        best = None
        for idx, e in enumerate(candidates):
            x = join(e, np.zeros(n + 1))
            x = x + qmul(U, herm_array(x, V)) + qmul(V, herm_array(x, U))
            for f in basis:
                x = x - qmul(f, herm_array(x, f))
            q = norm_form(x)
            if best is None or q > best[0]:
                best = (q, idx, x)
        q, idx, x = best
        if q <= 1e-12:
            raise InternalError("could not complete a J-orthonormal frame")
        candidates.pop(idx)
        basis.append(x / math.sqrt(q))
    C = np.stack(basis + [U, V], axis=1)
    return validate(C, tol=1e-8)
