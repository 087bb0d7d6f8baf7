"""Finite positive sequences: dual sequences, regularity, Dini regularization.

Sequences are indexed ``1..horizon`` and extended by ``0 -> 0``.  All
regularity questions are decided over the declared horizon only.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np


class SequenceError(ValueError):
    """Raised when a sequence violates a precondition.

    ``index`` is the first offending 1-based index, when there is one.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class PosSequence:
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1).copy()
        if vals.size < 1:
            raise SequenceError("horizon must be at least 1")
        if not np.all(np.isfinite(vals)):
            raise SequenceError("sequence values must be finite")
        bad = np.flatnonzero(vals <= 0)
        if bad.size:
            raise SequenceError("sequence values must be strictly positive", int(bad[0]) + 1)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def horizon(self) -> int:
        return int(self.values.size)

    def __call__(self, m: int) -> float:
        if m == 0:
            return 0.0
        if not 1 <= m <= self.horizon:
            raise IndexError(f"index {m} outside 1..{self.horizon}")
        return float(self.values[m - 1])

    def __len__(self) -> int:
        return self.horizon

    def extended(self) -> np.ndarray:
        """Values at 0..horizon with the 0 -> 0 convention."""
        return np.concatenate([[0.0], self.values])

    def truncate(self, horizon: int) -> "PosSequence":
        if horizon > self.horizon:
            raise SequenceError(f"cannot extend horizon {self.horizon} to {horizon}")
        return PosSequence(self.values[:horizon])

    def to_json(self) -> dict:
        return {"horizon": self.horizon, "values": [float(x) for x in self.values]}

    @classmethod
    def from_json(cls, data) -> "PosSequence":
        if isinstance(data, list):
            return cls(np.array(data, dtype=float))
        values = data["values"]
        seq = cls(np.array(values, dtype=float))
        if "horizon" in data and int(data["horizon"]) != seq.horizon:
            raise SequenceError("declared horizon does not match number of values")
        return seq

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "value", "dual_value"])
        dual = dual_sequence(self)
        for m in range(1, self.horizon + 1):
            w.writerow([m, repr(self(m)), repr(dual(m))])
        return buf.getvalue()


@dataclass(frozen=True)
class RegularityReport:
    lrp_witness: int | None
    urp_witness: int | None
    dini_constant: float | None
    horizon_used: int
    # set when r_max exceeds the horizon, so some witnesses are checked on an empty m-range
    restricted: bool = False
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "lrp_witness": self.lrp_witness,
            "urp_witness": self.urp_witness,
            "dini_constant": self.dini_constant,
            "horizon_used": self.horizon_used,
            "restricted": self.restricted,
            "notes": list(self.notes),
        }


def power_sequence(alpha: float, horizon: int) -> PosSequence:
    if horizon < 1:
        raise SequenceError("horizon must be at least 1")
    m = np.arange(1, horizon + 1, dtype=float)
    return PosSequence(m ** alpha)


def dual_sequence(s: PosSequence) -> PosSequence:
    """m -> m / s(m)."""
    m = np.arange(1, s.horizon + 1, dtype=float)
    return PosSequence(m / s.values)


def _lrp_witness(vals: np.ndarray, r_max: int, tol: float) -> int | None:
    n = vals.size
    for r in range(2, r_max + 1):
        ok = True
        for m in range(1, n // r + 1):
            if vals[r * m - 1] < 2.0 * vals[m - 1] * (1.0 - tol):
                ok = False
                break
        if ok:
            return r
    return None


def dini_constant(s: PosSequence) -> float | None:
    """Least C with (1/C) s(m)/m <= s(m) - s(m-1) <= C s(m)/m over the horizon.

    ``None`` when some discrete derivative is not positive.
    """
    ext = s.extended()
    diff = np.diff(ext)
    if np.any(diff <= 0):
        return None
    m = np.arange(1, s.horizon + 1, dtype=float)
    ratio = diff / (s.values / m)
    return float(max(ratio.max(), 1.0 / ratio.min()))


def check_regularity(s: PosSequence, r_max: int = 8, tol: float = 1e-12) -> RegularityReport:
    """Least LRP / URP witnesses ``r <= r_max`` and the Dini constant.

    A witness ``r`` is only tested on the m-range with ``r*m <= horizon``.
    """
    if r_max < 2:
        raise SequenceError("r_max must be at least 2")
    notes = []
    restricted = s.horizon < r_max
    if restricted:
        notes.append(f"horizon {s.horizon} < r_max {r_max}: witnesses above the horizon hold vacuously")
    lrp = _lrp_witness(s.values, r_max, tol)
    urp = _lrp_witness(dual_sequence(s).values, r_max, tol)
    return RegularityReport(lrp, urp, dini_constant(s), s.horizon, restricted, notes)


def _first_decrease(vals: np.ndarray, tol: float) -> int | None:
    bad = np.flatnonzero(np.diff(vals) < -tol * np.maximum(1.0, np.abs(vals[:-1])))
    return int(bad[0]) + 2 if bad.size else None


def is_nondecreasing(s: PosSequence, tol: float = 1e-12) -> bool:
    return _first_decrease(s.values, tol) is None


def validate_sigma(s: PosSequence, horizon: int | None = None, tol: float = 1e-12) -> None:
    """Reject ``s`` unless both ``s`` and its dual are nondecreasing."""
    if horizon is not None:
        s = s.truncate(horizon)
    idx = _first_decrease(s.values, tol)
    if idx is not None:
        raise SequenceError(f"sequence decreases at m={idx}", idx)
    idx = _first_decrease(dual_sequence(s).values, tol)
    if idx is not None:
        raise SequenceError(f"dual sequence decreases at m={idx}", idx)


def dini_regularize(tau: PosSequence) -> PosSequence:
    """sigma(m) = sum_{n<=m} tau(n)/n.

    Requires ``tau`` and its dual to be nondecreasing; the output then has
    both properties and dominates ``tau``.
    """
    validate_sigma(tau)
    n = np.arange(1, tau.horizon + 1, dtype=float)
    terms = tau.values / n
    return PosSequence(np.array([math.fsum(terms[:m]) for m in range(1, tau.horizon + 1)]))


def doubling_minorant(f: PosSequence) -> PosSequence:
    """g(1)=f(1), g(m+1) = min(f(m+1), (m+1)/m * g(m)).

    The multipliers telescope over m=k..2k-1 to exactly 2, so g(2m) <= 2 g(m).
    """
    idx = _first_decrease(f.values, 0.0)
    if idx is not None:
        raise SequenceError(f"sequence decreases at m={idx}", idx)
    g = np.empty(f.horizon)
    g[0] = f.values[0]
    for m in range(1, f.horizon):
        # (m+1)/m written as a product so the doubling bound holds in floating point
        g[m] = min(f.values[m], g[m - 1] * (m + 1) / m)
    return PosSequence(g)


def load_sequence(path) -> PosSequence:
    with open(path) as fh:
        return PosSequence.from_json(json.load(fh))
