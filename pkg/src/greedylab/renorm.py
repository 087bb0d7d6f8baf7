"""Renormings as norm evaluators: lattice, main (Property (A) plus isometric
bidemocracy), (1+eps) almost greedy, and subsymmetric on a window."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import convex
from .metrics import (ENUM_CAP, FundamentalProfile, _need_cap, fundamental_profile, greedy_sets,
                      lorentz_embedding_constant, sample_vectors)
from .seqlab import PosSequence, SequenceError, dini_regularize, dual_sequence, validate_sigma
from .spaces import (DualEstimate, Marcinkiewicz, SpaceModel, marcinkiewicz_dual, project,
                     register_kind, space_from_descriptor, top_sums)

INFLATE = 1.05


class InvalidConstants(ValueError):
    pass


# ------------------------------------------------------------------ S, T, T^c

def s_func(v, A) -> float:
    v = np.asarray(v, float)
    return float(np.abs(v[list(A)]).sum()) if len(A) else 0.0


def t_func(v, fstar, A) -> float:
    A = list(A)
    return float(np.asarray(fstar, float)[A] @ np.asarray(v, float)[A]) if A else 0.0


def tc_func(v, fstar, A) -> float:
    return float(np.asarray(fstar, float) @ np.asarray(v, float)) - t_func(v, fstar, A)


# ------------------------------------------------------------------ lattice renorm

@register_kind("lattice")
class LatticeRenorm(SpaceModel):
    """v -> max over sign vectors eps of N(eps * v).

    Sign vectors are taken modulo coordinates whose sign the base norm ignores
    and modulo the global sign.
    """

    sign_invariant = True
    LATTICE_CAP = 20

    def __init__(self, base: SpaceModel, label=""):
        if base.dim > self.LATTICE_CAP:
            raise ValueError(f"dim {base.dim} exceeds lattice renorm cap {self.LATTICE_CAP}")
        self.base, self.dim, self.label = base, base.dim, label
        free = set(base.free_signs())
        live = [i for i in range(base.dim) if i not in free]
        pats = []
        for rest in itertools.product((1.0, -1.0), repeat=max(len(live) - 1, 0)):
            eps = np.ones(base.dim)
            eps[live[1:]] = rest
            pats.append(eps)
        self.patterns = np.array(pats)
        self.linf_bound = base.linf_bound
        self.expensive = base.expensive
        self.symmetric = base.symmetric

    def norm(self, v):
        v = self._check(v)
        return float(max(self.base.norm_many(self.patterns * v[None, :])))

    def norm_many(self, V):
        V = np.atleast_2d(np.asarray(V, float))
        return np.max(np.stack([self.base.norm_many(V * eps[None, :]) for eps in self.patterns]), axis=0)

    def subgradient(self, v):
        v = self._check(v)
        vals = self.base.norm_many(self.patterns * v[None, :])
        eps = self.patterns[int(np.argmax(vals))]
        return eps * self.base.subgradient(eps * v)

    def cvx_norm(self, x):
        import cvxpy as cp
        exprs = [self.base.cvx_norm(cp.multiply(eps, x)) for eps in self.patterns]
        if any(e is None for e in exprs):
            return None
        return exprs[0] if len(exprs) == 1 else cp.max(cp.hstack(exprs))

    def params(self):
        return {"dim": self.dim, "base": self.base.descriptor()}

    @classmethod
    def from_params(cls, d):
        return cls(space_from_descriptor(d["base"]), d.get("label", ""))


def lattice_renorm(space: SpaceModel) -> LatticeRenorm:
    return LatticeRenorm(space)


# ------------------------------------------------------------------ constants

FIELDS = ("C_q", "C_d", "C_e", "C_a", "C_r", "C_b", "delta")


@dataclass
class RenormConstants:
    C_q: float
    C_d: float
    C_e: float
    C_a: float
    C_r: float
    C_b: float
    delta: float | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in FIELDS:
            val = getattr(self, name)
            if val is None and name == "delta":
                continue
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise InvalidConstants(f"{name} must be a positive real, got {val!r}")
        allowed = {"computed-exact", "computed-lower-bound-inflated", "computed-numerical-inflated", "user-supplied"}
        for name, prov in self.provenance.items():
            if prov not in allowed:
                raise InvalidConstants(f"invalid provenance {prov!r} for {name}")

    @property
    def kappa(self) -> float:
        return 1.0 / (2.0 * self.C_e * self.C_r)

    def to_json(self) -> dict:
        out = {name: getattr(self, name) for name in FIELDS}
        out["provenance"] = dict(sorted(self.provenance.items()))
        return out

    @classmethod
    def from_json(cls, d) -> "RenormConstants":
        return cls(**{k: d.get(k) for k in FIELDS}, provenance=dict(d.get("provenance", {})))


def sequence_constants(sigma: PosSequence, phi_u: np.ndarray) -> dict:
    """C_a, C_b, C_r for sigma against the fundamental function, over len(phi_u)."""
    n = phi_u.size
    s = sigma.truncate(n).values
    sd = dual_sequence(sigma.truncate(n)).values
    inc = np.diff(np.concatenate([[0.0], s]))
    return {"C_a": float(np.max(s / phi_u)), "C_b": float(np.max(phi_u / s)), "C_r": float(np.max(1.0 / (sd * inc)))}


def dual_suppression_quasi_greedy(space: SpaceModel, rng, samples=200) -> float:
    """Sampled lower bound for the suppression quasi-greedy constant of the dual basis."""
    best = 1.0
    for y in sample_vectors(rng, space.dim, samples):
        ny = space.dual_norm(y)
        for m in range(1, space.dim):
            A = greedy_sets(y, m)[0]
            best = max(best, space.dual_norm(y - project(y, A)) / ny)
    return best


def compute_constants(space: SpaceModel, sigma: PosSequence, profile: FundamentalProfile | None = None,
                      eps_target: float | None = None, seed: int = 0) -> RenormConstants:
    n = space.dim
    validate_sigma(sigma, n)
    prof = profile if profile is not None else fundamental_profile(space)
    seqc = sequence_constants(sigma, prof.phi_u)
    prov = {"C_a": "computed-exact", "C_b": "computed-exact", "C_r": "computed-exact"}
    m = np.arange(1, n + 1)
    C_d = float(np.max(prof.phi_u * prof.phi_u_dual / m)) * INFLATE
    prov["C_d"] = "computed-lower-bound-inflated"
    if space.sign_invariant:
        C_q = 1.0
        prov["C_q"] = "computed-exact"
    else:
        C_q = dual_suppression_quasi_greedy(space, np.random.default_rng(seed)) * INFLATE
        prov["C_q"] = "computed-lower-bound-inflated"
    C_e = lorentz_embedding_constant(space, sigma).value * INFLATE
    prov["C_e"] = "computed-numerical-inflated"
    delta = None
    if eps_target is not None:
        delta = min(eps_target, 1.0) / (2 * C_e + seqc["C_b"])
        prov["delta"] = "computed-exact"
    return RenormConstants(C_q, C_d, C_e, seqc["C_a"], seqc["C_r"], seqc["C_b"], delta, prov)


def check_constants(space: SpaceModel, sigma: PosSequence, c: RenormConstants, phi_u,
                    rng=None, functionals: int = 100, tol: float = 1e-9) -> dict:
    """Re-check the defining inequalities of C_a, C_r and C_e."""
    n = space.dim
    s = sigma.truncate(n).values
    sd = dual_sequence(sigma.truncate(n)).values
    inc = np.diff(np.concatenate([[0.0], s]))
    out = {
        "C_a": bool(np.all(s <= c.C_a * np.asarray(phi_u) * (1 + tol))),
        "C_r": bool(np.all(sd * inc >= (1.0 / c.C_r) * (1 - tol))),
    }
    rng = rng if rng is not None else np.random.default_rng(0)
    worst = 0.0
    for y in rng.standard_normal((functionals, n)):
        D = np.sort(np.abs(y))[::-1]
        worst = max(worst, float(np.max(sd * D)) / space.dual_norm(y))
    out["C_e"] = bool(worst <= c.C_e * (1 + tol))
    out["C_e_observed"] = worst
    return out


# ------------------------------------------------------------------ main renorm

def _bits(idx) -> int:
    return sum(1 << int(i) for i in idx)


class _RenormBase(SpaceModel):
    expensive = True

    def _setup(self, base, sigma, constants):
        n = base.dim
        try:
            validate_sigma(sigma, n)
        except SequenceError as exc:
            raise SequenceError(f"invalid sigma: {exc}", exc.index) from exc
        self.base, self.dim = base, n
        self.sigma = sigma.truncate(n)
        self.constants = constants
        self.sdual = dual_sequence(self.sigma).values
        self.marc = Marcinkiewicz(self.sigma)
        self.sign_invariant = base.sign_invariant
        self.linf_bound = float(self.sdual[0])
        self._memo: dict = {}
        self.stats = {"programs": 0, "evaluations": 0}

    def free_signs(self):
        return self.base.free_signs()

    def _key(self, v):
        return (np.abs(v) if self.sign_invariant else v).tobytes()

    def norm(self, v):
        v = self._check(v)
        if not np.any(v):
            return 0.0
        key = self._key(v)
        hit = self._memo.get(key)
        if hit is None:
            scale = float(np.max(np.abs(v)))
            hit = float(scale * self._evaluate(v / scale))
            self._memo[key] = hit
            self.stats["evaluations"] += 1
        return hit

    def dual_bracket(self, y):
        """Upper bound from the Marcinkiewicz minorant, lower bound from candidates."""
        y = self._check(y)
        if not np.any(y):
            return DualEstimate(0.0, 0.0, 0.0, True, "zero")
        up, x = marcinkiewicz_dual(self.sdual, y)
        cands = [x]
        order = np.argsort(-np.abs(y), kind="stable")
        for k in range(1, self.dim + 1):
            z = np.zeros(self.dim)
            z[order[:k]] = np.sign(y[order[:k]])
            cands.append(z)
        low = max(float(y @ c) / self.norm(c) for c in cands if np.any(c))
        up = max(up, low)
        return DualEstimate(up, low, up, up - low <= 1e-9 * max(1.0, up), "marcinkiewicz-bracket")


@register_kind("renormed")
class MainRenorm(_RenormBase):
    """sup over (A, B, y) of S(f,A)/sigma*(|A|) + kappa |T^c(f, y, A u B)|,

    y in the dual ball, B greedy for y, |A| <= |B|, kappa = 1/(2 C_e C_r).

    ``mode``:
      * "factorized": flat-top pruning of A, minimal padding of B for
        sign-invariant bases, and bounds from the dual Lorentz embedding;
      * "pruned": flat-top pruning only, all B and all sign patterns;
      * "brute": every (A, B) pair, every sign pattern when ``all_signs``.
    """

    def __init__(self, base, sigma, constants: RenormConstants, mode="factorized", all_signs=None, label=""):
        self._setup(base, sigma, constants)
        if mode not in ("factorized", "pruned", "brute"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "factorized" and not base.sign_invariant:
            mode = "pruned"
        if base.dim > 12:
            raise ValueError("main renorm supports dim <= 12")
        self.mode, self.label = mode, label
        self.all_signs = (not base.sign_invariant) if all_signs is None else bool(all_signs)
        self.kappa = constants.kappa
        self._phi: dict = {}

    # inner program: sup c.y over the dual ball with B greedy for y, sign s on B
    def phi(self, c, B, signs=None) -> float:
        if not np.any(c):
            return 0.0
        B = tuple(B)
        s = (1.0,) * len(B) if signs is None else tuple(signs)
        key = (c.tobytes(), B, s)
        hit = self._phi.get(key)
        if hit is None:
            hit = convex.region_min(self.base, c, dict(zip(B, s)))
            self._phi[key] = hit
            self.stats["programs"] += 1
        return hit

    def _tail_bound(self, c, b):
        """C_e sum_i c*_i / sigma*(b+i): the dual Lorentz embedding bound on Phi."""
        cs = np.sort(np.abs(c))[::-1]
        cs = cs[cs > 0]
        if cs.size == 0:
            return 0.0
        return self.constants.C_e * float(cs @ (1.0 / self.sdual[b:b + cs.size]))

    def _evaluate(self, f):
        if self.mode == "factorized":
            return self._eval_lattice(f)
        return self._eval_generic(f, prune=self.mode == "pruned")

    def _s_term(self, a, A):
        return float(a[list(A)].sum()) / self.sdual[len(A) - 1] if A else 0.0

    def _eval_lattice(self, f):
        n = self.dim
        a = np.abs(f)
        T = [i for i in range(n) if a[i] > 0]
        D = [i for i in T if a[i] == 1.0]
        H = [i for i in T if a[i] != 1.0]
        cands = []
        for r in range(len(H) + 1):
            for extra in itertools.combinations(H, r):
                A = tuple(sorted(D + list(extra)))
                c0 = a.copy()
                c0[list(A)] = 0.0
                cands.append((self._s_term(a, A), A, c0))
        best = max(s for s, _, _ in cands)
        kap = self.kappa
        ordered = sorted(cands, key=lambda t: -(t[0] + kap * min(self.base.norm(t[2]), self._tail_bound(t[2], len(t[1])))))
        for sA, A, c0 in ordered:
            if not np.any(c0):
                continue
            if sA + kap * min(self.base.norm(c0), self._tail_bound(c0, len(A))) <= best:
                continue
            rest = [i for i in T if i not in A]
            for r in range(len(rest) + 1):
                for W in itertools.combinations(rest, r):
                    c = c0.copy()
                    c[list(W)] = 0.0
                    if not np.any(c):
                        continue
                    b = max(len(A), len(W))
                    if sA + kap * min(self.base.norm(c), self._tail_bound(c, b)) <= best:
                        continue
                    val_w = self.phi(c, W)
                    if len(W) >= len(A):
                        best = max(best, sA + kap * val_w)
                        continue
                    if sA + kap * val_w <= best:
                        continue
                    pool = [i for i in range(n) if c[i] == 0 and i not in W]
                    for P in itertools.combinations(pool, len(A) - len(W)):
                        B = tuple(sorted(W + P))
                        best = max(best, sA + kap * self.phi(c, B))
        return best

    def _eval_generic(self, f, prune):
        n = self.dim
        a = np.abs(f)
        if prune:
            T = [i for i in range(n) if a[i] > 0]
            D = [i for i in T if a[i] == 1.0]
            H = [i for i in T if a[i] != 1.0]
            As = [tuple(sorted(D + list(e))) for r in range(len(H) + 1) for e in itertools.combinations(H, r)]
        else:
            As = [A for r in range(n + 1) for A in itertools.combinations(range(n), r)]
        best = max(self._s_term(a, A) for A in As)
        for A in As:
            sA = self._s_term(a, A)
            for bsize in range(max(len(A), 0), n + 1):
                for B in itertools.combinations(range(n), bsize):
                    U = set(A) | set(B)
                    c = f.copy()
                    c[list(U)] = 0.0
                    if not np.any(c):
                        best = max(best, sA)
                        continue
                    if not self.all_signs:
                        c = np.abs(c)
                    if prune and sA + self.kappa * self.base.norm(c) <= best:
                        continue
                    patterns = itertools.product((1.0, -1.0), repeat=len(B)) if self.all_signs else [None]
                    for s in patterns:
                        best = max(best, sA + self.kappa * self.phi(c, B, s))
        return best

    def params(self):
        d = {"dim": self.dim, "mode": "main", "base": self.base.descriptor(), "sigma": self.sigma.to_json(),
             "constants": self.constants.to_json()}
        if self.mode != "factorized":
            d["enumeration"] = self.mode
        return d

    @classmethod
    def from_params(cls, d):
        base = space_from_descriptor(d["base"])
        sigma = PosSequence.from_json(d["sigma"])
        consts = RenormConstants.from_json(d["constants"])
        if d.get("mode", "main") == "almost-greedy":
            return AlmostGreedyRenorm(base, sigma, consts, d["eps_target"], d.get("label", ""))
        return cls(base, sigma, consts, d.get("enumeration", "factorized"), label=d.get("label", ""))


def main_renorm(base, sigma, constants, mode="factorized", **kw) -> MainRenorm:
    return MainRenorm(base, sigma, constants, mode, **kw)


def brute_force_renorm(program: MainRenorm, all_signs=None) -> MainRenorm:
    """The same norm evaluated by unpruned enumeration of every (A, B)."""
    return MainRenorm(program.base, program.sigma, program.constants, "brute", all_signs=all_signs)


# ------------------------------------------------------------------ almost greedy renorm

class AlmostGreedyRenorm(_RenormBase):
    """max(||f||_s, delta ||f||_t) with ||.||_s the Marcinkiewicz norm of sigma."""

    kind = "renormed"

    def __init__(self, base, sigma, constants: RenormConstants, eps_target: float, label=""):
        self._setup(base, sigma, constants)
        if constants.delta is None:
            raise InvalidConstants("almost-greedy renorm needs delta")
        bound = constants.delta * (2 * constants.C_e + constants.C_b)
        if bound > min(eps_target, 1.0) * (1 + 1e-12):
            raise InvalidConstants(f"delta too large: delta(2C_e+C_b) = {bound} > min(eps, 1)")
        if base.dim > 12 or (not base.sign_invariant and base.dim > 8):
            raise ValueError("almost-greedy renorm supports dim <= 12 (dim <= 8 for non-lattice bases)")
        self.eps_target, self.delta, self.label = float(eps_target), constants.delta, label
        self._phi: dict = {}

    def t_norm(self, f) -> float:
        """sup |T(f, y, A minus B)| over nested greedy pairs B of A for y in the dual ball.

        For sign-invariant bases it equals N(f): B empty and A = supp f give
        N(f), and suppression-1 unconditionality bounds every term by N(f).
        """
        f = self._check(f)
        if self.base.sign_invariant:
            return self.base.norm(f)
        return self._t_enum(f, 0.0)

    def _t_enum(self, f, floor):
        n = self.dim
        best = 0.0
        for a_size in range(1, n + 1):
            for A in itertools.combinations(range(n), a_size):
                for b_size in range(0, a_size):
                    for B in itertools.combinations(A, b_size):
                        E = [i for i in A if i not in B]
                        c = np.zeros(n)
                        c[E] = f[E]
                        if not np.any(c):
                            continue
                        if self.delta * self.base.norm(c) <= max(best * self.delta, floor):
                            continue
                        for s in itertools.product((1.0, -1.0), repeat=a_size):
                            best = max(best, self._phi_nested(c, A, B, s))
        return best

    def _phi_nested(self, c, A, B, s):
        key = (c.tobytes(), A, B, s)
        hit = self._phi.get(key)
        if hit is None:
            n = self.dim
            sg = dict(zip(A, s))
            E = [i for i in A if i not in B]
            out = [k for k in range(n) if k not in A]
            cols = []
            for b in B:
                for e in E:
                    col = np.zeros(n)
                    col[b], col[e] = sg[b], -sg[e]
                    cols.append(col)
            for e in E:
                col = np.zeros(n)
                col[e] = sg[e]
                cols.append(col)
                for k in out:
                    for pm in (1.0, -1.0):
                        col = np.zeros(n)
                        col[e], col[k] = sg[e], pm
                        cols.append(col)
            hit = convex.cone_min(self.base, c, np.array(cols).T)
            self._phi[key] = hit
            self.stats["programs"] += 1
        return hit

    def _evaluate(self, f):
        s = self.marc.norm(f)
        if self.base.sign_invariant:
            return max(s, self.delta * self.base.norm(f))
        return max(s, self.delta * self._t_enum(f, s))

    def norm_many(self, V):
        V = np.atleast_2d(np.asarray(V, float))
        if self.base.sign_invariant:
            return np.maximum(self.marc.norm_many(V), self.delta * self.base.norm_many(V))
        return super().norm_many(V)

    def params(self):
        return {"dim": self.dim, "mode": "almost-greedy", "base": self.base.descriptor(),
                "sigma": self.sigma.to_json(), "constants": self.constants.to_json(), "eps_target": self.eps_target}


def almost_greedy_renorm(base, sigma, constants, eps_target) -> AlmostGreedyRenorm:
    return AlmostGreedyRenorm(base, sigma, constants, eps_target)


# ------------------------------------------------------------------ subsymmetric renorm

@dataclass(frozen=True)
class SubsymValue:
    value: float
    per_k: dict
    stabilized: bool


def gap_maps(length: int, window: int, k: int):
    """All increasing maps 0..length-1 -> 0..window-1 with beta(0) >= k-1 and gaps >= k."""
    def rec(prefix, start, left):
        if left == 0:
            yield tuple(prefix)
            return
        last = window - (left - 1) * k - 1
        for pos in range(start, last + 1):
            yield from rec(prefix + [pos], pos + k, left - 1)
    if length == 0:
        yield ()
        return
    yield from rec([], k - 1, length)


@register_kind("subsymmetric")
class SubsymRenorm(SpaceModel):
    """sup over gap-k spreads of the base norm, for k on a schedule, on a window."""

    SUPPORT_CAP = 6

    def __init__(self, base: SpaceModel, k_schedule=(1, 2, 4, 8), dim: int | None = None, label=""):
        self.base, self.window = base, base.dim
        self.k_schedule = tuple(sorted(int(k) for k in k_schedule))
        self.dim = base.dim // 4 if dim is None else int(dim)
        if self.dim < 1 or 4 * self.dim > self.window:
            raise ValueError("vectors must live in a prefix of length <= window/4")
        # a gap-k spread of a length-l prefix ends at position k*l - 1
        longest = min(self.dim, self.SUPPORT_CAP)
        if self.k_schedule[-1] * longest > self.window:
            raise ValueError(f"window {self.window} too small for k={self.k_schedule[-1]} and length {longest}")
        self.label = label
        self.sign_invariant = base.sign_invariant
        self.linf_bound = base.linf_bound
        self._memo: dict = {}

    def evaluate(self, v) -> SubsymValue:
        v = self._check(v)
        supp = np.flatnonzero(v)
        if supp.size == 0:
            return SubsymValue(0.0, {k: 0.0 for k in self.k_schedule}, True)
        length = int(supp[-1]) + 1
        if length > self.SUPPORT_CAP:
            raise ValueError(f"support prefix {length} exceeds cap {self.SUPPORT_CAP}")
        key = v[:length].tobytes()
        if key in self._memo:
            return self._memo[key]
        per_k = {}
        for k in self.k_schedule:
            maps = np.array(list(gap_maps(length, self.window, k)))
            X = np.zeros((maps.shape[0], self.window))
            np.put_along_axis(X, maps, np.broadcast_to(v[:length], maps.shape), axis=1)
            per_k[k] = float(np.max(self._base_many(X)))
        vals = [per_k[k] for k in self.k_schedule]
        stable = len(vals) < 2 or abs(vals[-1] - vals[-2]) <= 1e-9 * max(1.0, abs(vals[-1]))
        out = SubsymValue(vals[-1], per_k, stable)
        self._memo[key] = out
        return out

    def _base_many(self, X):
        return self.base.norm_many(X)

    def norm(self, v):
        return self.evaluate(v).value

    def params(self):
        return {"dim": self.dim, "base": self.base.descriptor(), "k_schedule": list(self.k_schedule)}

    @classmethod
    def from_params(cls, d):
        return cls(space_from_descriptor(d["base"]), d.get("k_schedule", (1, 2, 4, 8)), d.get("dim"), d.get("label", ""))


def subsym_renorm(space: SpaceModel, window: int | None = None, k_schedule=(1, 2, 4, 8)) -> SubsymRenorm:
    if window is not None and window != space.dim:
        raise ValueError("the base model must be built on the window")
    return SubsymRenorm(space, k_schedule)


# ------------------------------------------------------------------ pipeline

@dataclass
class PipelineResult:
    model: SpaceModel
    constants: RenormConstants
    sigma: PosSequence
    lattice: SpaceModel
    profile: FundamentalProfile


def resolve_sigma(sigma, policy: str, phi_u) -> PosSequence:
    if policy == "given":
        if sigma is None:
            raise ValueError("sigma required for policy 'given'")
        return sigma
    if policy == "dini":
        return dini_regularize(PosSequence(phi_u))
    raise ValueError(f"unknown sigma policy {policy!r}")


def pipeline_renorm(space: SpaceModel, sigma: PosSequence | None = None, policy: str = "given",
                    kind: str = "main", eps_target: float | None = None, seed: int = 0) -> PipelineResult:
    """Lattice renorm, constants on the lattice model, then the main or almost-greedy renorm."""
    lat = space if space.sign_invariant else lattice_renorm(space)
    prof = fundamental_profile(lat)
    sig = resolve_sigma(sigma, policy, prof.phi_u)
    validate_sigma(sig, lat.dim)
    if kind == "main":
        consts = compute_constants(lat, sig, prof, seed=seed)
        model = MainRenorm(lat, sig, consts)
    elif kind == "almost-greedy":
        if eps_target is None:
            raise ValueError("almost-greedy renorm needs eps_target")
        consts = compute_constants(lat, sig, prof, eps_target=eps_target, seed=seed)
        model = AlmostGreedyRenorm(lat, sig, consts, eps_target)
    else:
        raise ValueError(f"unknown renorm kind {kind!r}")
    return PipelineResult(model, consts, sig, lat, prof)
