"""Jorgensen-type discreteness tests and the conjugation iteration.

For a loxodromic ``g`` with ``M_g < 1`` and fixed points ``u`` (attracting)
and ``v`` (repelling), the tests compare cross-ratios of ``u, v, h(u), h(v)``
with bounds in ``M_g``.  A triggered test means <g, h> is elementary or not
discrete.

:func:`iterate` runs ``h_{k+1} = h_k g h_k^-1`` with ``g`` in diagonal
position and records the contraction of ``|b_k c_k|``.  Every verdict is
numerical evidence, not a proof.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import InsufficientIterations, InternalError, MgTooLarge, NotDiagonalPosition
from .hspace import infinity, origin, same_point
from .quaternion import qabs, qH, qmatmul, qmul, qconj
from .spgroup import SpMatrix, axis_frame, inverse, loxodromic_data, power
from .xratio import abs_cross_ratio, lemma23_triple

__all__ = [
    "Condition",
    "Conclusion",
    "TestReport",
    "test_theorem11",
    "test_corollary12",
    "Verdict",
    "StepRecord",
    "IterationTrace",
    "iterate",
    "compact_witness",
    "in_diagonal_position",
]

BLOWUP = 1e12
ELEMENTARY_TOL = 1e-12
STEP_SLACK = 1e-9


class Condition(enum.Enum):
    Thm11 = "Thm11"
    CondA = "CondA"  # |[h(u),v,u,h(v)]|^1/2 < (1-M)/M
    CondB = "CondB"  # |[h(u),u,v,h(v)]|^1/2 < (1-M)/M
    CondC = "CondC"  # |[u,v,h(u),h(v)]|^1/2 < 1-M
    CondD = "CondD"  # sum of the two moduli < 2(1-M)/M^2

    @classmethod
    def parse(cls, value) -> "Condition":
        if isinstance(value, Condition):
            return value
        aliases = {"3": cls.Thm11, "thm11": cls.Thm11, "4": cls.CondA, "a": cls.CondA,
                   "5": cls.CondB, "b": cls.CondB, "6": cls.CondC, "c": cls.CondC,
                   "7": cls.CondD, "d": cls.CondD}
        key = str(value).lower().removeprefix("cond")
        if key in aliases:
            return aliases[key]
        return cls(value)


class Conclusion(enum.Enum):
    ElementaryOrNonDiscrete = "ElementaryOrNonDiscrete"
    Inconclusive = "Inconclusive"


@dataclass(frozen=True)
class TestReport:
    __test__ = False

    lhs: float
    rhs: float
    condition: Condition
    mg: float
    # |ad|, |bc| of h after conjugating g into diagonal position
    block_value: Optional[float] = None

    @property
    def triggered(self) -> bool:
        return self.lhs < self.rhs

    @property
    def conclusion(self) -> Conclusion:
        return Conclusion.ElementaryOrNonDiscrete if self.triggered else Conclusion.Inconclusive

    def to_json(self):
        return {
            "condition": self.condition.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "Mg": self.mg,
            "triggered": self.triggered,
            "conclusion": self.conclusion.value,
        }


def in_diagonal_position(g: SpMatrix, data=None) -> bool:
    """True when the attracting/repelling fixed points are infinity/o."""
    data = data or loxodromic_data(g)
    return same_point(data.fixed_attract, infinity(g.n)) and same_point(data.fixed_repel, origin(g.n))


class _Setup:
    def __init__(self, g: SpMatrix, h: SpMatrix):
        self.data = loxodromic_data(g)
        self.mg = self.data.mg
        if self.mg >= 1.0:
            raise MgTooLarge(self.mg, 1.0)
        self.u = self.data.fixed_attract
        self.v = self.data.fixed_repel
        self.hu = h.act(self.u)
        self.hv = h.act(self.v)
        self.x_ad = abs_cross_ratio(self.hu, self.u, self.v, self.hv)  # [h(u),u,v,h(v)]
        self.x_bc = abs_cross_ratio(self.hu, self.v, self.u, self.hv)  # [h(u),v,u,h(v)]
        # the same quantities from the blocks of C^-1 h C, C sending (inf, o) -> (u, v)
        C = axis_frame(self.u, self.v)
        self.h_diag = inverse(C) @ h @ C
        self.blocks = lemma23_triple(self.h_diag)

    def ratio_uv(self):
        return abs_cross_ratio(self.u, self.v, self.hu, self.hv)


def _check(value, expected, what):
    if abs(value - expected) > 1e-7 * max(1.0, abs(expected)):
        raise InternalError(f"{what}: cross-ratio {value!r} disagrees with block value {expected!r}")


def test_theorem11(g: SpMatrix, h: SpMatrix) -> TestReport:
    """|[h(u),u,v,h(v)]|^1/2 |[h(u),v,u,h(v)]|^1/2 < (1-M_g)/M_g^2."""
    s = _Setup(g, h)
    lhs = math.sqrt(s.x_ad) * math.sqrt(s.x_bc)
    block = math.sqrt(s.blocks.ad) * math.sqrt(s.blocks.bc)
    _check(lhs, block, "cross-ratio product")
    return TestReport(lhs, (1.0 - s.mg) / s.mg**2, Condition.Thm11, s.mg, block)


test_theorem11.__test__ = False


def test_corollary12(g: SpMatrix, h: SpMatrix, condition) -> TestReport:
    """One of the four sufficient conditions; each implies the product test."""
    condition = Condition.parse(condition)
    if condition is Condition.Thm11:
        return test_theorem11(g, h)
    s = _Setup(g, h)
    M = s.mg
    bc, ad, ratio = s.blocks
    if condition is Condition.CondA:
        lhs, rhs, block = math.sqrt(s.x_bc), (1 - M) / M, math.sqrt(bc)
    elif condition is Condition.CondB:
        lhs, rhs, block = math.sqrt(s.x_ad), (1 - M) / M, math.sqrt(ad)
    elif condition is Condition.CondC:
        lhs, rhs = math.sqrt(s.ratio_uv()), 1 - M
        block = None if ratio is None else math.sqrt(ratio)
    else:
        lhs, rhs, block = s.x_ad + s.x_bc, 2 * (1 - M) / M**2, ad + bc
    if block is not None:
        _check(lhs, block, condition.value)
    return TestReport(lhs, rhs, condition, M, block)


test_corollary12.__test__ = False


# ---------------------------------------------------------------------------
# iteration


class Verdict(enum.Enum):
    ContractionToElementaryOrNonDiscrete = "ContractionToElementaryOrNonDiscrete"
    ElementaryBranch = "ElementaryBranch"
    DivergedOrInconclusive = "DivergedOrInconclusive"


VERDICT_LABELS = {
    Verdict.ContractionToElementaryOrNonDiscrete: "|b_k c_k| -> 0 geometrically: evidence of an elementary or non-discrete group",
    Verdict.ElementaryBranch: "numerically elementary branch: b_k c_k ~ 0, so elementary or non-discrete",
    Verdict.DivergedOrInconclusive: "inconclusive",
}


@dataclass
class StepRecord:
    k: int
    ad: float
    bc: float
    bound: Optional[float]  # (M(1+|b1c1|^1/2))^{k-1} |b1c1|^1/2, k >= 1
    iteration_rhs: Optional[float] = None  # M |a_{k-1}d_{k-1}|^1/2 |b_{k-1}c_{k-1}|^1/2
    recursion_residual: float = 0.0
    vanished: str = ""

    @property
    def iteration_ok(self) -> bool:
        if self.iteration_rhs is None:
            return True
        return math.sqrt(self.bc) <= self.iteration_rhs * (1 + STEP_SLACK) + 1e-300

    @property
    def bound_ok(self) -> bool:
        if self.bound is None:
            return True
        return math.sqrt(self.bc) <= self.bound * (1 + STEP_SLACK) + 1e-300

    def to_json(self):
        return {
            "k": self.k,
            "ad": self.ad,
            "bc": self.bc,
            "bound": self.bound,
            "iteration_rhs": self.iteration_rhs,
            "recursion_residual": self.recursion_residual,
        }


@dataclass
class IterationTrace:
    steps: List[StepRecord]
    verdict: Verdict
    max_k: int
    mg: float
    g: SpMatrix = field(repr=False)
    matrices: List[SpMatrix] = field(repr=False, default_factory=list)
    conjugator: Optional[SpMatrix] = field(repr=False, default=None)
    rcond: bool = False

    @property
    def contraction_ratio(self) -> Optional[float]:
        """M_g (1 + |b_1 c_1|^1/2); below 1 the bound forces |b_k c_k| -> 0."""
        if len(self.steps) < 2:
            return None
        return self.mg * (1.0 + math.sqrt(self.steps[1].bc))

    @property
    def label(self) -> str:
        return VERDICT_LABELS[self.verdict]

    def to_json(self):
        return {
            "verdict": self.verdict.value,
            "label": self.label,
            "Mg": self.mg,
            "max_k": self.max_k,
            "contraction_ratio": self.contraction_ratio,
            "steps": [s.to_json() for s in self.steps],
        }


def _diag_blocks(g: SpMatrix):
    """Return (L, lam, mu) when g is block diagonal, else None."""
    n = g.n
    E = g.entries
    mask = np.ones((n + 1, n + 1), dtype=bool)
    mask[: n - 1, : n - 1] = False
    mask[n - 1, n - 1] = mask[n, n] = False
    if np.max(np.abs(E[mask]), initial=0.0) > 1e-12 * max(1.0, g.norm()):
        return None
    return E[: n - 1, : n - 1], E[n - 1, n - 1], E[n, n]


def _recursion(h: SpMatrix, L, lam, mu):
    """The four scalar entries of h g h^-1 from the block formulas, written
    with L - I, lam - 1 and mu - 1 so that small outputs stay accurate."""
    a, b, c, d = h.scalar_blocks()
    eta, theta = h.eta, h.theta
    M, H = qmatmul, qH
    Lm = L.copy()
    Lm[np.arange(L.shape[0]), np.arange(L.shape[0]), 0] -= 1.0
    one = np.array([1.0, 0.0, 0.0, 0.0])
    lm, mm = lam - one, mu - one

    def quad(X, Y):
        if X.shape[1] == 0:
            return np.zeros(4)
        return M(M(X, Lm), H(Y))[0, 0]

    cj = qconj
    a1 = one - quad(eta, theta) + qmul(qmul(a, lm), cj(d)) + qmul(qmul(b, mm), cj(c))
    b1 = -quad(eta, eta) + qmul(qmul(a, lm), cj(b)) + qmul(qmul(b, mm), cj(a))
    c1 = -quad(theta, theta) + qmul(qmul(c, lm), cj(d)) + qmul(qmul(d, mm), cj(c))
    d1 = one - quad(theta, eta) + qmul(qmul(c, lm), cj(b)) + qmul(qmul(d, mm), cj(a))
    return a1, b1, c1, d1


def _moduli(h: SpMatrix):
    a, b, c, d = (float(qabs(x)) for x in h.scalar_blocks())
    return a * d, b * c, b, c


def iterate(g: SpMatrix, h: SpMatrix, max_k: int = 20, conjugator=None) -> IterationTrace:
    """Run h_{k+1} = h_k g h_k^-1 for k < max_k.

    ``g`` must fix o and infinity unless ``conjugator`` is given; pass
    ``conjugator="auto"`` to move g's axis there first (h is conjugated by
    the same element).
    """
    if isinstance(conjugator, str) and conjugator == "auto":
        data = loxodromic_data(g)
        conjugator = axis_frame(data.fixed_attract, data.fixed_repel)
    if conjugator is not None:
        Ci = inverse(conjugator)
        g = Ci @ g @ conjugator
        h = Ci @ h @ conjugator
    blocks = _diag_blocks(g)
    if blocks is None:
        raise NotDiagonalPosition("g does not fix o and infinity; pass conjugator='auto'")
    L, lam, mu = blocks
    mg = loxodromic_data(g).mg
    scale = lambda ad: ELEMENTARY_TOL * max(1.0, ad)  # noqa: E731
    eye = np.zeros_like(g.entries)
    eye[np.arange(g.n + 1), np.arange(g.n + 1), 0] = 1.0
    # h g h^-1 = I + h (g - I) h^-1: every partial product of the off-diagonal
    # entries stays small, so |b_k c_k| keeps relative accuracy far below 1e-16
    g_minus_i = g.entries - eye

    hk = h
    ad, bc, bb, cc = _moduli(hk)
    rcond = math.sqrt(ad) * math.sqrt(bc) < (1 - mg) / mg**2 if mg < 1 else False
    steps = [StepRecord(0, ad, bc, None)]
    mats = [hk]
    verdict = None
    if bc <= scale(ad):
        steps[0].vanished = _which(bb, cc, ad)
        verdict = Verdict.ElementaryBranch
    b1c1 = None
    for k in range(1, max_k + 1):
        if verdict is not None:
            break
        prev = steps[-1]
        nxt = SpMatrix(eye + qmatmul(qmatmul(hk.entries, g_minus_i), inverse(hk).entries), _trusted=True)
        rec = _recursion(hk, L, lam, mu)
        direct = nxt.scalar_blocks()
        resid = max(float(qabs(r - dv)) for r, dv in zip(rec, direct))
        hk = nxt
        if hk.norm() > BLOWUP:
            verdict = Verdict.DivergedOrInconclusive
            break
        ad, bc, bb, cc = _moduli(hk)
        if k == 1:
            b1c1 = bc
        base = mg * (1.0 + math.sqrt(b1c1))
        bound = base ** (k - 1) * math.sqrt(b1c1)
        step = StepRecord(
            k, ad, bc, bound,
            iteration_rhs=mg * math.sqrt(prev.ad) * math.sqrt(prev.bc),
            recursion_residual=resid,
        )
        steps.append(step)
        mats.append(hk)
        if k == 1 and bc <= scale(ad):
            step.vanished = _which(bb, cc, ad)
            verdict = Verdict.ElementaryBranch
    if verdict is None:
        ok = all(s.iteration_ok and s.bound_ok for s in steps)
        ratio = mg * (1.0 + math.sqrt(steps[1].bc)) if len(steps) > 1 else math.inf
        decreasing = len(steps) > 2 and steps[-1].bc < steps[1].bc
        if ok and ratio < 1.0 and decreasing:
            verdict = Verdict.ContractionToElementaryOrNonDiscrete
        else:
            verdict = Verdict.DivergedOrInconclusive
    return IterationTrace(steps, verdict, max_k, mg, g, mats, conjugator, rcond)


def _which(b, c, ad):
    tol = math.sqrt(ELEMENTARY_TOL * max(1.0, ad))
    parts = [name for name, x in (("b", b), ("c", c)) if x <= tol]
    return "".join(parts) or "bc"


def compact_witness(trace: IterationTrace, k: int) -> SpMatrix:
    """f_k = g^-k h_{2k} g^k, using the diagonal-position g of the trace."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if 2 * k >= len(trace.matrices):
        raise InsufficientIterations(f"need h_{2 * k}, trace has {len(trace.matrices) - 1} steps")
    gk = power(trace.g, k)
    return inverse(gk) @ trace.matrices[2 * k] @ gk
