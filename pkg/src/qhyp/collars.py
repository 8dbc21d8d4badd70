"""Geodesics, distance bounds between them, and canonical tubes.

A geodesic with null endpoint lifts ``p, q`` normalised so that
``<p, q> = -1`` is traced at unit speed by ``p e^{t/2} + q e^{-t/2}``.
The canonical tube about the axis of a loxodromic ``g`` has radius ``r``
with ``cosh 2r = 2(1 - M_g) / M_g^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import CoincidentEndpoints, DegenerateConfiguration, MgTooLarge
from .hspace import PointKind, ProjPoint, classify_point, herm_array, infinity, origin, same_point
from .quaternion import qinv, qmatmul, qmul
from .spgroup import SpMatrix, axis_frame, inverse, loxodromic_data
from .xratio import Inequality, abs_cross_ratio

__all__ = [
    "MG_LIMIT",
    "Geodesic",
    "geodesic_from_endpoints",
    "axis",
    "geodesic_distance_lower_bound",
    "geodesic_distance_oracle",
    "SharedEndpointWarning",
    "CollarResult",
    "safe_acosh",
    "collar_from_mg",
    "canonical_collar",
    "DisjointnessReport",
    "disjointness_check",
    "TubeReport",
    "tube_invariance_harness",
]

MG_LIMIT = math.sqrt(3.0) - 1.0
GRID_HALF_WIDTH = 20.0
GRID_POINTS = 81
REFINE_ROUNDS = 60
MATCH_TOL = 1e-8


class SharedEndpointWarning(UserWarning):
    """The two geodesics meet at infinity; the bound collapses to 0."""


def safe_acosh(x: float) -> float:
    """arccosh that forgives roundoff just below 1."""
    if x < 1.0:
        if x >= 1.0 - 1e-12:
            return 0.0
        raise ValueError(f"arccosh of {x!r} < 1")
    return math.log(x + math.sqrt(x * x - 1.0))


# ---------------------------------------------------------------------------
# geodesics


@dataclass(frozen=True)
class Geodesic:
    p: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)

    @property
    def u(self) -> ProjPoint:
        """Endpoint reached as t -> +inf."""
        return _endpoint(self.p)

    @property
    def v(self) -> ProjPoint:
        return _endpoint(self.q)

    def lift(self, t: float) -> np.ndarray:
        return self.p * math.exp(t / 2) + self.q * math.exp(-t / 2)

    def point(self, t: float) -> ProjPoint:
        return classify_point(self.lift(t))

    def image(self, h: SpMatrix) -> "Geodesic":
        # h preserves the form, so the normalisation survives
        return Geodesic(qmatmul(h.entries, self.p[:, None, :])[:, 0, :],
                        qmatmul(h.entries, self.q[:, None, :])[:, 0, :])

    def to_json(self):
        return {"p": self.p.tolist(), "q": self.q.tolist()}

    @classmethod
    def from_json(cls, data) -> "Geodesic":
        return geodesic_from_endpoints(classify_point(data["p"]), classify_point(data["q"]))


def _endpoint(z: np.ndarray) -> ProjPoint:
    # null by construction; after an ill-conditioned h the computed <z,z>
    # can drift past the relative null tolerance, so skip the re-test
    z = np.array(z, dtype=float)
    z.flags.writeable = False
    return ProjPoint(z, PointKind.Boundary)


def _as_point(x) -> ProjPoint:
    return x if isinstance(x, ProjPoint) else classify_point(x)


def geodesic_from_endpoints(u, v) -> Geodesic:
    """Unit-speed geodesic from ``v`` (t -> -inf) to ``u`` (t -> +inf)."""
    u, v = _as_point(u), _as_point(v)
    if same_point(u, v):
        raise CoincidentEndpoints("endpoints coincide")
    p = np.array(u.lift, dtype=float)
    q = np.array(v.lift, dtype=float)
    # <p, q lam> = conj(lam) <p, q>, so lam = -<q, p>^-1 gives -1
    lam = -qinv(herm_array(q, p))
    return Geodesic(p, qmul(q, lam))


def axis(g: SpMatrix) -> Geodesic:
    """Axis of a loxodromic element, oriented towards its attracting point."""
    data = loxodromic_data(g)
    return geodesic_from_endpoints(data.fixed_attract, data.fixed_repel)


def _bound_sum(g1: Geodesic, g2: Geodesic) -> float:
    u1, v1, u2, v2 = g1.u, g1.v, g2.u, g2.v
    return abs_cross_ratio(v2, u1, v1, u2) + abs_cross_ratio(v2, v1, u1, u2)


def _shares_endpoint(g1: Geodesic, g2: Geodesic) -> bool:
    return any(same_point(a, b) for a in (g1.u, g1.v) for b in (g2.u, g2.v))


def geodesic_distance_lower_bound(g1: Geodesic, g2: Geodesic) -> float:
    """arccosh(max(1, |[v2,u1,v1,u2]| + |[v2,v1,u1,u2]|)), a lower bound for
    the distance between the two geodesics."""
    if _shares_endpoint(g1, g2) and not (same_point(g1.u, g2.u) and same_point(g1.v, g2.v)
                                         or same_point(g1.u, g2.v) and same_point(g1.v, g2.u)):
        warnings.warn("geodesics share one endpoint; distance bound is 0", SharedEndpointWarning,
                      stacklevel=2)
        return 0.0
    try:
        total = _bound_sum(g1, g2)
    except DegenerateConfiguration:
        warnings.warn("degenerate cross-ratio; distance bound is 0", SharedEndpointWarning,
                      stacklevel=2)
        return 0.0
    return safe_acosh(max(1.0, total))


def _pairing_table(g1: Geodesic, g2: Geodesic):
    """Coefficients of <g1(t), g2(s)> in e^{(+-t +- s)/2}."""
    P = np.stack([herm_array(x, y) for x in (g1.p, g1.q) for y in (g2.p, g2.q)])
    signs = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
    return P, signs


def _cosh_rho(P, signs, t, s):
    t = np.asarray(t, dtype=float)[..., None]
    s = np.asarray(s, dtype=float)[..., None]
    w = np.exp((signs[:, 0] * t + signs[:, 1] * s) / 2)
    H = np.einsum("...k,kc->...c", w, P)
    # both lifts have <z,z> = -2, so cosh rho = |H|^2 / 2 - 1
    return np.maximum(np.sum(H * H, axis=-1) / 2 - 1.0, 1.0)


def _line_min(f, lo, hi, tol=1e-10):
    r = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": tol})
    return float(r.x), float(r.fun)


def geodesic_distance_oracle(g1: Geodesic, g2: Geodesic) -> Tuple[float, float, float]:
    """Numerical inf of cosh rho(g1(t), g2(s)).

    An 81x81 grid on [-20, 20]^2 locates the basin; alternating bounded line
    searches in t and s then refine it.  Returns ``(cosh_rho, t, s)``.
    """
    P, signs = _pairing_table(g1, g2)
    grid = np.linspace(-GRID_HALF_WIDTH, GRID_HALF_WIDTH, GRID_POINTS)
    T, S = np.meshgrid(grid, grid, indexing="ij")
    values = _cosh_rho(P, signs, T, S)
    i, j = np.unravel_index(np.argmin(values), values.shape)
    t, s, best = float(grid[i]), float(grid[j]), float(values[i, j])
    width = float(grid[1] - grid[0])
    coef = P.tolist()

    def f(a, b):
        ea, eb = math.exp(a / 2), math.exp(b / 2)
        w = (ea * eb, ea / eb, eb / ea, 1.0 / (ea * eb))
        tot = 0.0
        for c in range(4):
            x = w[0] * coef[0][c] + w[1] * coef[1][c] + w[2] * coef[2][c] + w[3] * coef[3][c]
            tot += x * x
        return max(tot / 2 - 1.0, 1.0)

    for _ in range(REFINE_ROUNDS):
        t_new, _ = _line_min(lambda x: f(x, s), t - width, t + width)
        s_new, val = _line_min(lambda y: f(t_new, y), s - width, s + width)
        if val > best:
            break
        done = best - val <= 1e-15 * best
        t, s, best = t_new, s_new, val
        if done:
            break
    return best, t, s


# ---------------------------------------------------------------------------
# tubes


@dataclass(frozen=True)
class CollarResult:
    mg: float
    r: float
    cosh2r: float

    def to_json(self):
        return {"Mg": self.mg, "r": self.r, "cosh2r": self.cosh2r}


def collar_from_mg(mg: float) -> CollarResult:
    if not mg < MG_LIMIT:
        raise MgTooLarge(mg, MG_LIMIT)
    cosh2r = 2.0 * (1.0 - mg) / mg**2
    return CollarResult(mg, safe_acosh(cosh2r) / 2, cosh2r)


def canonical_collar(g: SpMatrix) -> CollarResult:
    return collar_from_mg(loxodromic_data(g).mg)


@dataclass(frozen=True)
class DisjointnessReport:
    r1: float
    r2: float
    cosh_bound: float
    chain: Tuple[Inequality, ...]
    swapped: bool  # True when the inputs were reordered so that M_h <= M_g

    @property
    def distance_bound(self) -> float:
        return safe_acosh(max(1.0, self.cosh_bound))

    @property
    def disjoint(self) -> bool:
        """Does the cross-ratio bound alone separate the two tubes?"""
        return self.distance_bound >= self.r1 + self.r2 - 1e-12

    @property
    def failed_steps(self) -> List[str]:
        return [i.name for i in self.chain if not i.holds]

    def to_json(self):
        return {
            "r1": self.r1,
            "r2": self.r2,
            "cosh_bound": self.cosh_bound,
            "distance_bound": self.distance_bound,
            "disjoint": self.disjoint,
            "swapped": self.swapped,
            "chain": [
                {"name": i.name, "lhs": i.lhs, "rhs": i.rhs, "holds": i.holds} for i in self.chain
            ],
        }


def _preserves(h: SpMatrix, u: ProjPoint, v: ProjPoint, tol=MATCH_TOL) -> bool:
    hu, hv = h.act(u), h.act(v)
    fixes = same_point(hu, u, tol) and same_point(hv, v, tol)
    swaps = same_point(hu, v, tol) and same_point(hv, u, tol)
    return fixes or swaps


def disjointness_check(g: SpMatrix, h: SpMatrix) -> DisjointnessReport:
    """Evaluate every link of the chain showing that the canonical tubes
    about the axes of ``g`` and ``h`` are disjoint.

    Each link is an :class:`Inequality` ``lhs <= rhs``.  All but one follow
    from algebra; the exception is the link that uses discreteness, so a
    failure there is what a non-discrete pair looks like.
    """
    dg, dh = loxodromic_data(g), loxodromic_data(h)
    for d in (dg, dh):
        if not d.mg < MG_LIMIT:
            raise MgTooLarge(d.mg, MG_LIMIT)
    if _preserves(h, dg.fixed_attract, dg.fixed_repel):
        raise DegenerateConfiguration("g and h share an axis")
    swapped = dh.mg > dg.mg
    if swapped:
        g, h, dg, dh = h, g, dh, dg
    Mg, Mh = dg.mg, dh.mg
    c1, c2 = collar_from_mg(Mg), collar_from_mg(Mh)

    # move the axis of g to (o, inf)
    C = axis_frame(dg.fixed_attract, dg.fixed_repel)
    Ci = inverse(C)
    g0 = Ci @ g @ C
    n = g.n
    o, inf = origin(n), infinity(n)
    p, q = Ci.act(dh.fixed_attract), Ci.act(dh.fixed_repel)

    x1 = abs_cross_ratio(o, p, q, inf)
    x2 = abs_cross_ratio(o, q, p, inf)
    gpq = abs_cross_ratio(g0.act(p), q, p, g0.act(q))
    cosh_bound = geodesic_distance_lower_bound(
        geodesic_from_endpoints(inf, o), geodesic_from_endpoints(p, q))
    cosh_bound = math.cosh(cosh_bound)
    am_gm = 2.0 * math.sqrt(x1 * x2)
    target = 2.0 * (1.0 - Mh) / (Mg * Mh)
    chain = (
        Inequality("2|[o,p,q,inf]|^1/2 |[o,q,p,inf]|^1/2 <= |[o,p,q,inf]| + |[o,q,p,inf]|",
                   am_gm, x1 + x2),
        Inequality("|[g(p),q,p,g(q)]| <= M_g^2 |[o,p,q,inf]| |[o,q,p,inf]|",
                   gpq, Mg**2 * x1 * x2),
        Inequality("(1-M_h)/M_h <= |[g(p),q,p,g(q)]|^1/2", (1.0 - Mh) / Mh, math.sqrt(gpq)),
        Inequality("2(1-M_h)/(M_g M_h) <= 2|[g(p),q,p,g(q)]|^1/2 / M_g",
                   target, 2.0 * math.sqrt(gpq) / Mg),
        Inequality("cosh(2r1) cosh(2r2) <= (2(1-M_h)/(M_g M_h))^2",
                   c1.cosh2r * c2.cosh2r, target**2),
        Inequality("cosh^2(r1+r2) <= cosh(2r1) cosh(2r2)",
                   math.cosh(c1.r + c2.r) ** 2, c1.cosh2r * c2.cosh2r),
    )
    return DisjointnessReport(c1.r, c2.r, cosh_bound, chain, swapped)


# ---------------------------------------------------------------------------
# precise invariance over short words


@dataclass
class TubeViolation:
    word: str
    distance: float
    method: str  # "oracle" when the bound was inconclusive

    def to_json(self):
        return {"word": self.word, "distance": self.distance, "method": self.method}


@dataclass
class TubeReport:
    mg: float
    r: float
    words: int = 0
    duplicates: int = 0
    skipped: List[str] = field(default_factory=list)
    by_bound: int = 0
    by_oracle: int = 0
    violations: List[TubeViolation] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations

    def to_json(self):
        return {
            "Mg": self.mg,
            "r": self.r,
            "words": self.words,
            "duplicates": self.duplicates,
            "skipped": len(self.skipped),
            "passed_by_bound": self.by_bound,
            "passed_by_oracle": self.by_oracle,
            "clean": self.clean,
            "violations": [v.to_json() for v in self.violations],
        }


def _letter(i: int, sign: int) -> str:
    ch = chr(ord("a") + i)
    return ch if sign > 0 else ch.upper()


def _reduced_words(k: int, length: int):
    """Freely reduced words of length 1..length as (letters, tuple of (i, sign))."""
    letters = [(i, s) for i in range(k) for s in (1, -1)]
    frontier = [()]
    for _ in range(length):
        nxt = []
        for w in frontier:
            for a in letters:
                if w and w[-1] == (a[0], -a[1]):
                    continue
                nxt.append(w + (a,))
        yield from nxt
        frontier = nxt


def _normalise_sign(E: np.ndarray) -> np.ndarray:
    flat = E.reshape(-1)
    idx = int(np.argmax(np.abs(flat) > MATCH_TOL))
    return E if flat[idx] >= 0 else -E


def tube_invariance_harness(generators: Sequence[SpMatrix], g_index: int, word_length: int) -> TubeReport:
    """Check that every short word h moves the canonical tube about the axis
    of ``generators[g_index]`` off itself, i.e. rho(gamma, h gamma) >= 2r.

    Words that preserve the axis are skipped; matrices equal up to sign to
    one already seen are counted once.  A clean report is consistency with
    precise invariance, not a proof of discreteness.
    """
    g = generators[g_index]
    coll = canonical_collar(g)
    gamma = axis(g)
    u, v = gamma.u, gamma.v
    mats = list(generators)
    invs = [inverse(m) for m in mats]
    report = TubeReport(coll.mg, coll.r)
    seen: List[np.ndarray] = []
    cache = {(): None}
    for word in _reduced_words(len(mats), word_length):
        prefix = cache.get(word[:-1])
        i, sgn = word[-1]
        step = mats[i] if sgn > 0 else invs[i]
        h = step if prefix is None else prefix @ step
        cache[word] = h
        report.words += 1
        key = _normalise_sign(h.entries)
        if seen and np.min(np.max(np.abs(np.stack(seen) - key), axis=(1, 2, 3))) <= MATCH_TOL * max(1.0, h.norm()):
            report.duplicates += 1
            continue
        seen.append(key)
        name = "".join(_letter(a, s) for a, s in word)
        if _preserves(h, u, v):
            report.skipped.append(name)
            continue
        image = gamma.image(h)
        bound = geodesic_distance_lower_bound(gamma, image)
        if bound >= 2 * coll.r:
            report.by_bound += 1
            continue
        cosh_rho, _, _ = geodesic_distance_oracle(gamma, image)
        rho = safe_acosh(cosh_rho)
        if rho >= 2 * coll.r:
            report.by_oracle += 1
        else:
            report.violations.append(TubeViolation(name, rho, "oracle"))
    return report
