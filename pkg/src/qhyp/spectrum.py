"""How M_{g^k} depends on k, and collar widths from the length alone.

For a loxodromic ``g`` with rotation angles ``beta_1..beta_{n-1}``, angle
``beta_n`` of ``lambda_n`` and translation length ``l``::

    M_{g^k} = 2 sqrt((cosh(kl/2) + 1)(cosh(kl/2) - cos(k beta_n)))
              + max_i 2 sqrt(2 (1 - cos(k beta_i)))

Some power of ``g`` aligns every angle within ``2 pi / N`` of zero, which
bounds ``min_k M_{g^k}`` by ``h(N, l)`` without knowing the angles.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .collars import MG_LIMIT, CollarResult, collar_from_mg, safe_acosh
from .errors import BelowThreshold, ConditionFailed, InternalError

__all__ = [
    "X0",
    "AngleProfile",
    "SpectrumResult",
    "mgk",
    "mgk_array",
    "minimize_T",
    "pigeonhole_k",
    "h",
    "r_n_bound",
    "l_of_x",
    "curve_samples",
    "length_only_collar",
    "write_curve_csv",
    "write_spectrum_csv",
]

SQRT3 = math.sqrt(3.0)
X0 = 2 * math.pi / math.acos((14 + SQRT3) / 16)
DEFAULT_KMAX = 10**6
CHUNK = 4096
CERT_SLACK = 1e-12


@dataclass(frozen=True)
class AngleProfile:
    angles: Tuple[float, ...]
    beta_n: float
    length: float

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        values = (*self.angles, self.beta_n, self.length)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("angle profile must be finite")
        if self.length <= 0:
            raise ValueError("translation length must be positive")

    @property
    def n(self) -> int:
        return len(self.angles) + 1

    @classmethod
    def from_loxodromic(cls, data) -> "AngleProfile":
        return cls(tuple(data.angles), data.beta_n, data.length)

    @classmethod
    def from_json(cls, data) -> "AngleProfile":
        length = data["l"] if "l" in data else data["length"]
        return cls(tuple(data.get("angles", ())), float(data["beta_n"]), float(length))

    def to_json(self):
        return {"angles": list(self.angles), "beta_n": self.beta_n, "l": self.length}


def mgk_array(profile: AngleProfile, ks) -> np.ndarray:
    """Vectorised closed form for an array of exponents."""
    k = np.asarray(ks, dtype=float)
    with np.errstate(over="ignore"):
        ch = np.cosh(k * profile.length / 2)
        # (ch+1)(ch-1) form loses digits for tiny kl; rewrite ch - cos as a sum of sines
        diff = 2 * np.sinh(k * profile.length / 4) ** 2 + 2 * np.sin(k * profile.beta_n / 2) ** 2
        main = 2 * np.sqrt((ch + 1) * diff)
    if profile.angles:
        b = np.asarray(profile.angles)[:, None]
        rot = np.max(4 * np.abs(np.sin(k[None, :] * b / 2)), axis=0)
    else:
        rot = 0.0
    return main + rot


def mgk(profile: AngleProfile, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    return float(mgk_array(profile, [k])[0])


@dataclass(frozen=True)
class SpectrumResult:
    T: float
    argmin_k: int
    ks: np.ndarray
    values: np.ndarray

    @property
    def samples(self) -> List[Tuple[int, float]]:
        return list(zip(self.ks.tolist(), self.values.tolist()))

    def to_json(self):
        return {"argmin_k": self.argmin_k, "T": self.T, "scanned": int(self.ks.size)}


def minimize_T(profile: AngleProfile, k_max: int = DEFAULT_KMAX) -> SpectrumResult:
    """Smallest M_{g^k} over 1 <= k <= k_max, ties going to the smaller k.

    The rotation terms are non-negative, so once 2 sinh(kl/2) exceeds the
    best value so far no larger k can win and the scan stops.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    best, best_k = math.inf, 0
    ks_out, vals_out = [], []
    start = 1
    while start <= k_max:
        ks = np.arange(start, min(start + CHUNK, k_max + 1))
        vals = mgk_array(profile, ks)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best, best_k = float(vals[i]), int(ks[i])
        ks_out.append(ks)
        vals_out.append(vals)
        start = int(ks[-1]) + 1
        if 2 * math.sinh(min(start * profile.length / 2, 700.0)) > best:
            break
    return SpectrumResult(best, best_k, np.concatenate(ks_out), np.concatenate(vals_out))


def _aligned(angles: np.ndarray, ks: np.ndarray, N: int) -> np.ndarray:
    c = np.cos(np.outer(ks, angles))
    return np.all(c >= math.cos(2 * math.pi / N) - CERT_SLACK, axis=1)


def pigeonhole_k(angles: Sequence[float], N: int) -> int:
    """Smallest k <= N^n with cos(k beta_i) >= cos(2 pi / N) for every i."""
    if N < 2:
        raise ValueError("N must be >= 2")
    angles = np.asarray(angles, dtype=float).reshape(-1)
    limit = N ** max(angles.size, 1)
    start = 1
    while start <= limit:
        ks = np.arange(start, min(start + CHUNK, limit + 1))
        ok = _aligned(angles, ks, N)
        if ok.any():
            k = int(ks[np.argmax(ok)])
            if not _aligned(angles, np.array([k]), N)[0]:
                raise InternalError("pigeonhole certificate failed on re-check")
            return k
        start = int(ks[-1]) + 1
    raise InternalError(f"no k <= {limit} aligns the angles within 2pi/{N}")


def h(x: float, l: float, n: int) -> float:
    """Angle-free bound, continuous in x; h(N, l, n) = R_N."""
    c = math.cos(2 * math.pi / x)
    ch = math.cosh(x**n * l / 2)
    return 2 * math.sqrt((ch + 1) * (ch - c)) + 2 * math.sqrt(2 * (1 - c))


def r_n_bound(l: float, N: int, n: int) -> float:
    if N < 2 or n < 1:
        raise ValueError("need N >= 2 and n >= 1")
    return h(N, l, n)


def l_of_x(x: float, n: int = 2) -> float:
    """The l solving h(x, l) = sqrt(3) - 1, defined for x >= X0."""
    if x < X0:
        raise BelowThreshold(f"x = {x!r} is below x0 = {X0!r}")
    c = math.cos(2 * math.pi / x)
    radicand = 13 - 2 * SQRT3 - 6 * c + c * c - 4 * (SQRT3 - 1) * math.sqrt(2 * (1 - c))
    arg = (math.sqrt(max(radicand, 0.0)) - 1 + c) / 2
    return 2 / x**n * safe_acosh(arg)


def curve_samples(n: int, x_min: float, x_max: float, step: float) -> List[Tuple[float, float]]:
    if step <= 0:
        raise ValueError("step must be positive")
    if x_min < X0:
        raise BelowThreshold(f"x_min = {x_min!r} is below x0 = {X0!r}")
    count = int(math.floor((x_max - x_min) / step + 1e-9)) + 1
    xs = [x_min + i * step for i in range(count)]
    return [(x, l_of_x(x, n)) for x in xs]


def length_only_collar(l: float, n: int, N: int) -> CollarResult:
    """Canonical collar radius using R_N in place of M_g."""
    R = r_n_bound(l, N, n)
    if not R < MG_LIMIT:
        raise ConditionFailed(R, f"R_N = {R:.10g} is not below sqrt(3) - 1")
    return collar_from_mg(R)


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def write_curve_csv(path, rows) -> None:
    _write(path, ("x", "l"), rows)


def write_spectrum_csv(path, result: SpectrumResult) -> None:
    _write(path, ("k", "Mgk"), result.samples)
