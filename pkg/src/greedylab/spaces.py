"""Finite-dimensional normed spaces with a distinguished basis.

Vectors are plain numpy arrays of coefficients (0-based internally; every
public index set is also 0-based).  A model provides ``norm``; most also
provide a subgradient, a cvxpy expression of the norm, and a closed-form
dual norm.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import convex
from .seqlab import PosSequence, dual_sequence

_REGISTRY: dict = {}


def register_kind(name):
    def deco(cls):
        _REGISTRY[name] = cls
        cls.kind = name
        return cls
    return deco


class DescriptorError(ValueError):
    pass


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class DualEstimate:
    value: float
    lower: float
    upper: float
    certified: bool
    method: str

    def to_json(self) -> dict:
        return {"value": self.value, "lower": self.lower, "upper": self.upper,
                "certified": self.certified, "method": self.method}


@dataclass(frozen=True)
class SignedSet:
    """Indices with a sign each; ``signs`` defaults to all +1."""
    indices: tuple
    signs: tuple = None

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(set(idx)) != len(idx):
            raise ValueError("repeated index in signed set")
        signs = (1,) * len(idx) if self.signs is None else tuple(int(s) for s in self.signs)
        if len(signs) != len(idx) or any(s not in (-1, 1) for s in signs):
            raise ValueError("signs must be +-1, one per index")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "signs", signs)

    def vector(self, n: int) -> np.ndarray:
        v = np.zeros(n)
        for i, s in zip(self.indices, self.signs):
            v[i] = s
        return v


def indicator(A, n: int, signs=None) -> np.ndarray:
    return SignedSet(tuple(A), None if signs is None else tuple(signs)).vector(n)


class SpaceModel:
    """Base class.  Subclasses set ``dim`` and implement ``norm``."""

    kind = "abstract"
    sign_invariant = False   # N(eps * v) = N(v) for every sign vector
    symmetric = False        # additionally permutation invariant
    expensive = False        # norm evaluation costs convex programs
    linf_bound = 1.0         # |v_k| <= linf_bound * N(v)

    label: str = ""

    def _check(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionError(f"expected a vector of length {self.dim}, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("coefficients must be finite")
        return v

    def norm(self, v) -> float:
        raise NotImplementedError

    def norm_many(self, V) -> np.ndarray:
        V = np.atleast_2d(np.asarray(V, float))
        return np.array([self.norm(v) for v in V])

    def subgradient(self, v) -> np.ndarray:
        raise NotImplementedError(f"{self.kind} has no subgradient oracle")

    def cvx_norm(self, x):
        """cvxpy expression for the norm, or None."""
        return None

    def free_signs(self) -> list:
        """Coordinates whose sign can be flipped without changing any norm."""
        return list(range(self.dim)) if self.sign_invariant else []

    def dual_bracket(self, y) -> DualEstimate:
        y = self._check(y)
        if not np.any(y):
            return DualEstimate(0.0, 0.0, 0.0, True, "zero")
        up, low, _ = convex.dual_program(self, y)
        method = "cvx" if convex.has_cvx(self) else "cutting-plane"
        up = max(up, low)
        return DualEstimate(up, low, up, up - low <= 1e-6 * max(1.0, up), method)

    def dual_norm(self, y) -> float:
        return self.dual_bracket(y).value

    def params(self) -> dict:
        raise NotImplementedError

    def descriptor(self) -> dict:
        d = {"kind": self.kind}
        d.update(self.params())
        if self.label:
            d["label"] = self.label
        return d

    def __repr__(self):
        return f"<{self.kind} dim={self.dim}>"


# ------------------------------------------------------------------ helpers

def _dual_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _pnorm(v: np.ndarray, p: float, axis=-1) -> np.ndarray:
    a = np.abs(v)
    if math.isinf(p):
        return a.max(axis=axis)
    if p == 1:
        return a.sum(axis=axis)
    m = a.max(axis=axis, keepdims=True)
    m = np.where(m > 0, m, 1.0)
    return np.squeeze(m, axis=axis) * (((a / m) ** p).sum(axis=axis)) ** (1.0 / p)


def _p_to_json(p):
    return "inf" if math.isinf(p) else p


def _p_from_json(p):
    return math.inf if p in ("inf", "Infinity", None) else float(p)


def top_sums(v) -> np.ndarray:
    """Prefix sums of the nonincreasing rearrangement of |v| (length n)."""
    return np.cumsum(np.sort(np.abs(np.asarray(v, float)))[::-1])


# ------------------------------------------------------------------ kinds

@register_kind("weighted-lp")
class WeightedLp(SpaceModel):
    """N(v) = (sum w_k |v_k|^p)^(1/p);  p = inf gives max w_k |v_k|."""

    sign_invariant = True

    def __init__(self, p, weights, label=""):
        p = float(p)
        if not p >= 1:
            raise ValueError("p must be >= 1")
        w = np.asarray(weights, float)
        if w.ndim != 1 or w.size < 1 or np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and positive")
        self.p, self.weights, self.dim, self.label = p, w, w.size, label
        self.symmetric = bool(np.all(w == w[0]))
        self._scale = w if math.isinf(p) else w ** (1.0 / p)
        self.linf_bound = float(1.0 / self._scale.min())

    def norm(self, v):
        return float(_pnorm(self._scale * self._check(v), self.p))

    def norm_many(self, V):
        return _pnorm(self._scale * np.atleast_2d(V), self.p, axis=1)

    def subgradient(self, v):
        u = self._scale * self._check(v)
        nu = _pnorm(u, self.p)
        g = np.zeros(self.dim)
        if nu == 0:
            return g
        if math.isinf(self.p):
            k = int(np.argmax(np.abs(u)))
            g[k] = np.sign(u[k])
        elif self.p == 1:
            g = np.sign(u)
        else:
            g = np.sign(u) * (np.abs(u) / nu) ** (self.p - 1)
        return g * self._scale

    def cvx_norm(self, x):
        import cvxpy as cp
        return cp.pnorm(cp.multiply(self._scale, x), self.p)

    def dual_bracket(self, y):
        y = self._check(y)
        u = y / self._scale
        q = _dual_exponent(self.p)
        val = float(_pnorm(u, q))
        if val == 0:
            return DualEstimate(0.0, 0.0, 0.0, True, "closed-form")
        # norming vector in the primal ball
        if math.isinf(q):
            k = int(np.argmax(np.abs(u)))
            x = np.zeros(self.dim)
            x[k] = np.sign(y[k])
        elif q == 1:
            x = np.sign(u)
        else:
            x = np.sign(u) * (np.abs(u) / val) ** (q - 1)
        x = x / self._scale
        low = float(y @ x) / self.norm(x)
        return DualEstimate(val, low, val, True, "closed-form")

    def params(self):
        return {"dim": self.dim, "p": _p_to_json(self.p), "weights": [float(w) for w in self.weights]}

    @classmethod
    def from_params(cls, d):
        return cls(_p_from_json(d["p"]), d["weights"], d.get("label", ""))


@register_kind("lorentz")
class Lorentz(SpaceModel):
    """N(v) = sum_k w_k v*_k with w nonincreasing."""

    sign_invariant = True
    symmetric = True

    def __init__(self, weights, label=""):
        w = np.asarray(weights, float)
        if w.ndim != 1 or w.size < 1 or np.any(w <= 0):
            raise ValueError("weights must be positive")
        if np.any(np.diff(w) > 0):
            raise ValueError("weights must be nonincreasing")
        self.weights, self.dim, self.label = w, w.size, label
        self.linf_bound = float(1.0 / w[0])

    def norm(self, v):
        return float(np.sort(np.abs(self._check(v)))[::-1] @ self.weights)

    def norm_many(self, V):
        return -np.sort(-np.abs(np.atleast_2d(V)), axis=1) @ self.weights

    def subgradient(self, v):
        v = self._check(v)
        order = np.argsort(-np.abs(v), kind="stable")
        g = np.zeros(self.dim)
        g[order] = self.weights * np.where(v[order] >= 0, 1.0, -1.0)
        return g

    def cvx_norm(self, x):
        import cvxpy as cp
        w = np.append(self.weights, 0.0)
        terms = [(w[k - 1] - w[k]) * cp.sum_largest(cp.abs(x), k) for k in range(1, self.dim + 1) if w[k - 1] > w[k]]
        return cp.sum(cp.hstack(terms))

    def dual_bracket(self, y):
        y = self._check(y)
        ratios = top_sums(y) / np.cumsum(self.weights)
        k = int(np.argmax(ratios)) + 1
        val = float(ratios[k - 1])
        top = np.argsort(-np.abs(y), kind="stable")[:k]
        x = np.zeros(self.dim)
        x[top] = np.where(y[top] >= 0, 1.0, -1.0)
        low = float(y @ x) / self.norm(x) if val > 0 else 0.0
        return DualEstimate(val, low, val, True, "closed-form")

    def params(self):
        return {"dim": self.dim, "weights": [float(w) for w in self.weights]}

    @classmethod
    def from_params(cls, d):
        return cls(d["weights"], d.get("label", ""))


@register_kind("marcinkiewicz")
class Marcinkiewicz(SpaceModel):
    """N(v) = max_k (sum of the k largest |v_n|) / sigma*(k)."""

    sign_invariant = True
    symmetric = True

    def __init__(self, sigma: PosSequence, dim: int | None = None, label=""):
        dim = sigma.horizon if dim is None else int(dim)
        if sigma.horizon < dim:
            raise ValueError(f"sigma horizon {sigma.horizon} shorter than dim {dim}")
        self.sigma = sigma.truncate(dim)
        self.dim, self.label = dim, label
        self.sdual = dual_sequence(self.sigma).values
        self.linf_bound = float(self.sdual[0])

    def norm(self, v):
        return float(np.max(top_sums(self._check(v)) / self.sdual))

    def norm_many(self, V):
        s = np.cumsum(-np.sort(-np.abs(np.atleast_2d(V)), axis=1), axis=1)
        return np.max(s / self.sdual, axis=1)

    def subgradient(self, v):
        v = self._check(v)
        k = int(np.argmax(top_sums(v) / self.sdual)) + 1
        top = np.argsort(-np.abs(v), kind="stable")[:k]
        g = np.zeros(self.dim)
        g[top] = np.where(v[top] >= 0, 1.0, -1.0) / self.sdual[k - 1]
        return g

    def cvx_norm(self, x):
        import cvxpy as cp
        return cp.max(cp.hstack([cp.sum_largest(cp.abs(x), k) / self.sdual[k - 1] for k in range(1, self.dim + 1)]))

    def dual_bracket(self, y):
        y = self._check(y)
        val, x = marcinkiewicz_dual(self.sdual, y)
        nx = self.norm(x)
        low = float(y @ x) / nx if nx > 0 else 0.0
        return DualEstimate(max(val, low), low, max(val, low), True, "linear-program")

    def params(self):
        return {"dim": self.dim, "sigma": self.sigma.to_json()}

    @classmethod
    def from_params(cls, d):
        return cls(PosSequence.from_json(d["sigma"]), d.get("dim"), d.get("label", ""))


def marcinkiewicz_dual(sdual: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """sup y.x subject to every top-k sum of |x| being <= sdual[k-1].

    The maximiser can be taken aligned with |y| and nonincreasing along its
    rearrangement, which leaves a small LP in the sorted coordinates.
    """
    y = np.asarray(y, float)
    n = y.size
    if not np.any(y):
        return 0.0, np.zeros(n)
    order = np.argsort(-np.abs(y), kind="stable")
    ys = np.abs(y)[order]
    a_ub = np.tril(np.ones((n, n)))
    b_ub = np.asarray(sdual[:n], float)
    mono = np.zeros((n - 1, n))
    for i in range(n - 1):
        mono[i, i], mono[i, i + 1] = -1.0, 1.0
    res = linprog(-ys, A_ub=np.vstack([a_ub, mono]), b_ub=np.concatenate([b_ub, np.zeros(n - 1)]),
                  bounds=[(0, None)] * n, method="highs")
    if res.status != 0:
        raise convex.ConvexFailure(res.message)
    x = np.zeros(n)
    x[order] = res.x * np.where(y[order] >= 0, 1.0, -1.0)
    return float(-res.fun), x


@register_kind("direct-sum")
class DirectSum(SpaceModel):
    """(sum_j N_j(v_j)^p)^(1/p) with blocks laid out consecutively."""

    def __init__(self, p, parts, label=""):
        p = float(p)
        if not p >= 1:
            raise ValueError("p must be >= 1")
        if not parts:
            raise ValueError("need at least one part")
        self.p, self.parts, self.label = p, list(parts), label
        self.offsets = np.cumsum([0] + [q.dim for q in self.parts])
        self.dim = int(self.offsets[-1])
        self.sign_invariant = all(q.sign_invariant for q in self.parts)
        self.expensive = any(q.expensive for q in self.parts)
        self.linf_bound = max(q.linf_bound for q in self.parts)

    def blocks(self, v):
        return [v[self.offsets[j]:self.offsets[j + 1]] for j in range(len(self.parts))]

    def norm(self, v):
        v = self._check(v)
        return float(_pnorm(np.array([q.norm(b) for q, b in zip(self.parts, self.blocks(v))]), self.p))

    def norm_many(self, V):
        V = np.atleast_2d(np.asarray(V, float))
        cols = [q.norm_many(V[:, self.offsets[j]:self.offsets[j + 1]]) for j, q in enumerate(self.parts)]
        return _pnorm(np.stack(cols, axis=1), self.p, axis=1)

    def subgradient(self, v):
        v = self._check(v)
        bn = np.array([q.norm(b) for q, b in zip(self.parts, self.blocks(v))])
        total = _pnorm(bn, self.p)
        g = np.zeros(self.dim)
        if total == 0:
            return g
        if math.isinf(self.p):
            a = np.zeros_like(bn)
            a[int(np.argmax(bn))] = 1.0
        elif self.p == 1:
            a = np.ones_like(bn)
        else:
            a = (bn / total) ** (self.p - 1)
        for j, (q, b) in enumerate(zip(self.parts, self.blocks(v))):
            if a[j] > 0:
                g[self.offsets[j]:self.offsets[j + 1]] = a[j] * q.subgradient(b)
        return g

    def cvx_norm(self, x):
        import cvxpy as cp
        exprs = [q.cvx_norm(x[self.offsets[j]:self.offsets[j + 1]]) for j, q in enumerate(self.parts)]
        if any(e is None for e in exprs):
            return None
        return cp.pnorm(cp.hstack(exprs), self.p)

    def free_signs(self):
        out = []
        for j, q in enumerate(self.parts):
            out += [int(self.offsets[j]) + k for k in q.free_signs()]
        return out

    def dual_bracket(self, y):
        y = self._check(y)
        ests = [q.dual_bracket(b) for q, b in zip(self.parts, self.blocks(y))]
        q_exp = _dual_exponent(self.p)
        up = float(_pnorm(np.array([e.upper for e in ests]), q_exp))
        low = float(_pnorm(np.array([e.lower for e in ests]), q_exp))
        return DualEstimate(up, low, up, all(e.certified for e in ests), "block-dual")

    def params(self):
        return {"dim": self.dim, "p": _p_to_json(self.p), "parts": [q.descriptor() for q in self.parts]}

    @classmethod
    def from_params(cls, d):
        return cls(_p_from_json(d["p"]), [space_from_descriptor(x) for x in d["parts"]], d.get("label", ""))


# ------------------------------------------------------------------ constructors

def make_weighted_lp(p, weights=None, n=None, label="") -> WeightedLp:
    if weights is None:
        if n is None:
            raise ValueError("need weights or n")
        weights = np.ones(n)
    elif n is not None and len(weights) != n:
        raise DimensionError("weights length does not match n")
    return WeightedLp(p, weights, label)


def make_lp(p, n, label="") -> WeightedLp:
    return WeightedLp(p, np.ones(n), label)


def make_lorentz(weights, n=None, label="") -> Lorentz:
    if n is not None and len(weights) != n:
        raise DimensionError("weights length does not match n")
    return Lorentz(weights, label)


def make_marcinkiewicz(sigma: PosSequence, n=None, label="") -> Marcinkiewicz:
    return Marcinkiewicz(sigma, n, label)


def make_direct_sum_lp(p, parts, label="") -> DirectSum:
    if p < 1:
        raise ValueError("p must be >= 1")
    return DirectSum(p, parts, label)


# ------------------------------------------------------------------ free operations

def norm(space: SpaceModel, v) -> float:
    return space.norm(v)


def dual_norm(space: SpaceModel, y) -> float:
    return space.dual_norm(y)


def apply_multiplier(space: SpaceModel, lam, v) -> np.ndarray:
    lam = np.asarray(lam, float)
    if lam.shape != (space.dim,) or not np.all(np.isfinite(lam)):
        raise ValueError("multiplier must be finite with one entry per coordinate")
    return lam * space._check(v)


def project(v, A) -> np.ndarray:
    """S_A v."""
    v = np.asarray(v, float)
    out = np.zeros_like(v)
    A = list(A)
    out[A] = v[A]
    return out


def apply_shift(space: SpaceModel, beta, v) -> np.ndarray:
    """L_beta: coordinate n moves to beta[n] (0-based); ``beta`` covers the support of v."""
    v = space._check(v)
    beta = [int(b) for b in beta]
    if any(b2 <= b1 for b1, b2 in zip(beta, beta[1:])):
        raise ValueError("beta must be strictly increasing")
    if len(beta) < v.size and np.any(v[len(beta):]):
        raise ValueError("beta does not cover the support of v")
    out = np.zeros(space.dim)
    for n, b in enumerate(beta):
        if v[n] == 0:
            continue
        if not 0 <= b < space.dim:
            raise IndexError(f"beta({n}) = {b} outside 0..{space.dim - 1}")
        out[b] = v[n]
    return out


# ------------------------------------------------------------------ descriptors

def space_from_descriptor(d: dict) -> SpaceModel:
    if not isinstance(d, dict) or "kind" not in d:
        raise DescriptorError("descriptor must be an object with a 'kind' field")
    kind = d["kind"]
    if kind not in _REGISTRY:
        raise DescriptorError(f"unknown kind {kind!r}")
    try:
        model = _REGISTRY[kind].from_params(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise DescriptorError(f"bad {kind} descriptor: {exc}") from exc
    if "dim" in d and int(d["dim"]) != model.dim:
        raise DescriptorError(f"declared dim {d['dim']} but model has dim {model.dim}")
    return model


def load_space(path) -> SpaceModel:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DescriptorError(str(exc)) from exc
    return space_from_descriptor(data)


def dumps_descriptor(space: SpaceModel) -> str:
    return json.dumps(space.descriptor(), indent=2, sort_keys=True) + "\n"
