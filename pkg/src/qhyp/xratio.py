"""Quaternionic cross-ratios.

    [z1, z2, w1, w2] = <w1,z1> <w1,z2>^-1 <w2,z2> <w2,z1>^-1

The quaternion itself depends on the lift of ``z1`` (it changes by a
conjugation), so only its modulus is used downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ADZero, DegenerateConfiguration
from .hspace import NULL_RTOL, ProjPoint, herm_array
from .quaternion import Quaternion, qabs, qH, qinv, qmatmul, qmul, qnorm2
from .spgroup import SpMatrix

__all__ = [
    "CrossRatioValue",
    "cross_ratio",
    "abs_cross_ratio",
    "Lemma23",
    "lemma23_triple",
    "Inequality",
    "Lemma24Report",
    "lemma24_check",
]

SLACK = 1e-9


@dataclass(frozen=True)
class CrossRatioValue:
    value: Quaternion
    abs: float


def _lift(p):
    return p.lift if isinstance(p, ProjPoint) else np.asarray(p, dtype=float)


def _pairing(w, z, what):
    h = herm_array(w, z)
    scale = math.sqrt(float(np.sum(qnorm2(w))) * float(np.sum(qnorm2(z))))
    if float(qabs(h)) <= NULL_RTOL * scale:
        raise DegenerateConfiguration(f"pairing {what} vanishes")
    return h


def cross_ratio(z1, z2, w1, w2) -> CrossRatioValue:
    z1, z2, w1, w2 = (_lift(p) for p in (z1, z2, w1, w2))
    den1 = _pairing(w1, z2, "<w1,z2>")
    den2 = _pairing(w2, z1, "<w2,z1>")
    num1 = herm_array(w1, z1)
    num2 = herm_array(w2, z2)
    value = qmul(qmul(qmul(num1, qinv(den1)), num2), qinv(den2))
    modulus = float(qabs(num1) * qabs(num2) / (qabs(den1) * qabs(den2)))
    return CrossRatioValue(Quaternion.from_array(value), modulus)


def abs_cross_ratio(z1, z2, w1, w2) -> float:
    return cross_ratio(z1, z2, w1, w2).abs


class Lemma23(NamedTuple):
    bc: float
    ad: float
    ratio: Optional[float]  # None when |ad| vanishes

    def require_ratio(self) -> float:
        if self.ratio is None:
            raise ADZero("|ad| vanishes; |bc|/|ad| is undefined")
        return self.ratio


def lemma23_triple(h: SpMatrix, tol: float = 1e-12) -> Lemma23:
    """``(|bc|, |ad|, |bc|/|ad|)``: the moduli of [h(inf),o,inf,h(o)],
    [h(inf),inf,o,h(o)] and [inf,o,h(inf),h(o)]."""
    a, b, c, d = (float(qabs(x)) for x in h.scalar_blocks())
    bc, ad = b * c, a * d
    ratio = None if ad <= tol * max(1.0, h.norm() ** 2) else bc / ad
    return Lemma23(bc, ad, ratio)


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        # relative slack: some chains compare numbers of size 1e7
        return self.margin >= -SLACK * max(1.0, abs(self.lhs), abs(self.rhs))


@dataclass(frozen=True)
class Lemma24Report:
    inequalities: tuple

    @property
    def all_hold(self) -> bool:
        return all(i.holds for i in self.inequalities)

    @property
    def min_margin(self) -> float:
        return min(i.margin for i in self.inequalities)

    def __iter__(self):
        return iter(self.inequalities)


def lemma24_check(h: SpMatrix) -> Lemma24Report:
    """Five inequalities between |ad|, |bc| and the off-diagonal blocks.

    They follow from J-unitarity alone, so a failure on a validated matrix
    points at a bug, not at the input.
    """
    bc, ad, _ = lemma23_triple(h)
    rad, rbc = math.sqrt(ad), math.sqrt(bc)
    beta_alpha = float(np.sqrt(np.sum(qmatmul(qH(h.beta), h.alpha) ** 2)))
    eta_theta = float(np.sqrt(np.sum(qmatmul(h.eta, qH(h.theta)) ** 2)))
    return Lemma24Report(
        (
            Inequality("|beta* alpha| <= 2|ad|^1/2 |bc|^1/2", beta_alpha, 2 * rad * rbc),
            Inequality("|eta theta*| <= 2|ad|^1/2 |bc|^1/2", eta_theta, 2 * rad * rbc),
            Inequality("|ad|^1/2 <= |bc|^1/2 + 1", rad, rbc + 1.0),
            Inequality("|bc|^1/2 <= |ad|^1/2 + 1", rbc, rad + 1.0),
            Inequality("1 <= |ad|^1/2 + |bc|^1/2", 1.0, rad + rbc),
        )
    )
