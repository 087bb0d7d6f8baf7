"""Concrete models: the discrete Haar system in L_p, Besov-type truncations
and the truncated Schlumprecht norm."""
from __future__ import annotations

import math

import numpy as np

from .spaces import (DirectSum, DualEstimate, SpaceModel, WeightedLp, _dual_exponent,
                     _p_from_json, _p_to_json, register_kind)


def haar_synthesis(levels: int, p: float) -> np.ndarray:
    """Cell values (rows) of the L_p-normalised Haar functions (columns).

    Column 0 is the constant; then intervals by level and left endpoint.
    ``p = inf`` gives the unnormalised +-1 functions.
    """
    n = 2 ** levels
    H = np.zeros((n, n))
    H[:, 0] = 1.0
    col = 1
    for lev in range(levels):
        width = n >> lev
        scale = 1.0 if math.isinf(p) else (width / n) ** (-1.0 / p)
        for start in range(0, n, width):
            H[start:start + width // 2, col] = scale
            H[start + width // 2:start + width, col] = -scale
            col += 1
    return H


@register_kind("haar")
class Haar(SpaceModel):
    def __init__(self, levels: int, p: float, label=""):
        levels = int(levels)
        p = float(p)
        if not 1 <= levels <= 6:
            raise ValueError("levels must be in 1..6")
        if not 1 < p < math.inf:
            raise ValueError("p must satisfy 1 < p < inf")
        self.levels, self.p, self.label = levels, p, label
        self.dim = 2 ** levels
        self.H = haar_synthesis(levels, p)
        self.q = _dual_exponent(p)
        self.Hdual = haar_synthesis(levels, self.q)
        self.M = self.H * self.dim ** (-1.0 / p)
        self.sign_invariant = p == 2
        self.linf_bound = 1.0

    def synthesize(self, v):
        return self.H @ self._check(v)

    def coefficients(self, cells):
        """Coefficients of a step function, recovered by pairing with the dual system."""
        return self.Hdual.T @ np.asarray(cells, float) / self.dim

    def norm(self, v):
        u = self.M @ self._check(v)
        return float(np.sum(np.abs(u) ** self.p) ** (1.0 / self.p))

    def norm_many(self, V):
        U = np.atleast_2d(V) @ self.M.T
        return np.sum(np.abs(U) ** self.p, axis=1) ** (1.0 / self.p)

    def subgradient(self, v):
        u = self.M @ self._check(v)
        nu = np.sum(np.abs(u) ** self.p) ** (1.0 / self.p)
        if nu == 0:
            return np.zeros(self.dim)
        return self.M.T @ (np.sign(u) * (np.abs(u) / nu) ** (self.p - 1))

    def cvx_norm(self, x):
        import cvxpy as cp
        return cp.pnorm(self.M @ x, self.p)

    def free_signs(self):
        if self.sign_invariant:
            return list(range(self.dim))
        # flipping a finest-level coefficient swaps two cell values
        return list(range(self.dim // 2, self.dim))

    def dual_bracket(self, y):
        y = self._check(y)
        g = self.Hdual @ y
        val = float((np.sum(np.abs(g) ** self.q) / self.dim) ** (1.0 / self.q))
        if val == 0:
            return DualEstimate(0.0, 0.0, 0.0, True, "closed-form")
        phi = np.sign(g) * (np.abs(g) / val) ** (self.q - 1)
        x = self.coefficients(phi)
        low = float(y @ x) / self.norm(x)
        return DualEstimate(val, low, val, True, "closed-form")

    def params(self):
        return {"levels": self.levels, "p": self.p}

    @classmethod
    def from_params(cls, d):
        return cls(d["levels"], d["p"], d.get("label", ""))


def make_haar(levels: int, p: float) -> Haar:
    return Haar(levels, p)


@register_kind("besov")
class Besov(DirectSum):
    """(l_q^1 + l_q^2 + ... + l_q^B) summed in l_p."""

    def __init__(self, p, q, blocks, label=""):
        p, q, blocks = float(p), _p_from_json(q), int(blocks)
        if not 1 < p < math.inf:
            raise ValueError("p must satisfy 1 < p < inf")
        if not q >= 1:
            raise ValueError("q must be >= 1")
        if blocks < 1:
            raise ValueError("need at least one block")
        super().__init__(p, [WeightedLp(q, np.ones(k)) for k in range(1, blocks + 1)], label)
        self.q, self.block_count = q, blocks

    def params(self):
        return {"p": self.p, "q": _p_to_json(self.q), "blocks": self.block_count}

    @classmethod
    def from_params(cls, d):
        return cls(d["p"], d["q"], d["blocks"], d.get("label", ""))


def make_besov_truncation(p, q, block_count) -> Besov:
    return Besov(p, q, block_count)


# ------------------------------------------------------------------ Schlumprecht

def schlumprecht_f(x):
    return np.log2(np.asarray(x, float) + 1.0)


def _inv_f(n: int) -> np.ndarray:
    out = np.zeros(n + 1)
    out[1:] = 1.0 / schlumprecht_f(np.arange(1, n + 1))
    return out


class SchlumprechtNonConvergence(RuntimeError):
    pass


def _interval_table(a: np.ndarray, tol: float, max_iter: int):
    """Fixed point of the interval recursion for |v| compressed to its support.

    W[i, j] is the norm of the restriction to positions i..j.  Returns the
    table and the number of iterations used.
    """
    n = a.size
    neg = -np.inf
    # sup norm of every interval, the l_inf seed
    W = np.full((n, n), neg)
    for i in range(n):
        W[i, i:] = np.maximum.accumulate(a[i:])
    base = W.copy()
    upper = np.triu(np.ones((n, n), bool))
    inv_f = _inv_f(n)
    for it in range(1, max_iter + 1):
        # Q[k, j] = W[k+1, j]: the rest of a partition that begins after k
        Q = np.full((n, n), neg)
        Q[:-1, :] = W[1:, :]
        P = W
        best = base.copy()
        for l in range(2, n + 1):
            P = (W[:, :, None] + Q[None, :, :]).max(axis=1)
            best = np.maximum(best, P * inv_f[l])
            if l < n:
                Q = np.full((n, n), neg)
                Q[:-1, :] = P[1:, :]
        diff = np.max(np.abs(best[upper] - W[upper]))
        W = best
        if diff < tol:
            return W, it
    raise SchlumprechtNonConvergence(f"no convergence in {max_iter} iterations")


def _norming_weights(a: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Weights of the tree functional that realises W[0, n-1] (approximately)."""
    n = a.size
    inv_f = _inv_f(n)
    out = np.zeros(n)

    def best_split(i, j):
        # best partition of i..j into l pieces under W, for every l, by DP with argmax
        m = j - i + 1
        best_val, best_cut = np.max(a[i:j + 1]), None
        # P[l][k]: best sum of l pieces covering i..k
        P = {1: {k: (W[i, k], [i]) for k in range(i, j + 1)}}
        for l in range(2, m + 1):
            P[l] = {}
            for k in range(i + l - 1, j + 1):
                cand = max(((P[l - 1][s][0] + W[s + 1, k], s) for s in range(i + l - 2, k)), key=lambda t: t[0])
                P[l][k] = (cand[0], P[l - 1][cand[1]][1] + [cand[1] + 1])
            val = P[l][j][0] * inv_f[l]
            if val > best_val + 1e-15:
                best_val, best_cut = val, (l, P[l][j][1])
        return best_cut

    def walk(i, j, weight):
        cut = best_split(i, j)
        if cut is None:
            k = i + int(np.argmax(a[i:j + 1]))
            out[k] += weight
            return
        l, starts = cut
        bounds = starts + [j + 1]
        for s, e in zip(bounds[:-1], bounds[1:]):
            walk(s, e - 1, weight * inv_f[l])

    walk(0, n - 1, 1.0)
    return out


@register_kind("schlumprecht")
class Schlumprecht(SpaceModel):
    """Truncated Schlumprecht norm with f(x) = log2(x+1)."""

    sign_invariant = True

    def __init__(self, dim: int, tol: float = 1e-10, max_iter: int = 200, label=""):
        dim = int(dim)
        if not 1 <= dim <= 32:
            raise ValueError("dim must be in 1..32")
        self.dim, self.tol, self.max_iter, self.label = dim, tol, max_iter, label
        self.linf_bound = 1.0
        self._memo: dict = {}

    def evaluate(self, v, compress: bool = True) -> tuple[float, int]:
        """(norm, iterations used).

        Zero coordinates are dropped before iterating unless ``compress`` is
        False; the raw form is kept to test support-position independence.
        """
        a = np.abs(self._check(v))
        if not np.any(a):
            return 0.0, 0
        if compress:
            a = a[a > 0]
        key = (compress, a.tobytes())
        hit = self._memo.get(key)
        if hit is None:
            W, its = _interval_table(a, self.tol, self.max_iter)
            hit = (float(W[0, -1]), its)
            self._memo[key] = hit
        return hit

    def norm(self, v):
        return self.evaluate(v)[0]

    def subgradient(self, v):
        v = self._check(v)
        supp = np.flatnonzero(v)
        g = np.zeros(self.dim)
        if supp.size == 0:
            return g
        a = np.abs(v[supp])
        W, _ = _interval_table(a, self.tol, self.max_iter)
        g[supp] = _norming_weights(a, W) * np.sign(v[supp])
        return g

    def params(self):
        return {"dim": self.dim}

    @classmethod
    def from_params(cls, d):
        return cls(d["dim"], label=d.get("label", ""))


def make_schlumprecht(dim: int) -> Schlumprecht:
    return Schlumprecht(dim)


def schlumprecht_norm(v, model: Schlumprecht | None = None) -> tuple[float, int]:
    """Norm and iteration count."""
    v = np.asarray(v, float)
    model = Schlumprecht(v.size) if model is None else model
    return model.evaluate(v)


def fundamental_beam_estimate(space, width: int = 24) -> np.ndarray:
    """Lower estimate of phi_u by beam search over signed sets.

    For models too large to enumerate (Haar with 64 cells).  Each size keeps
    the ``width`` best signed sets and extends them by one signed coordinate.
    """
    n = space.dim
    beam = [np.zeros(n)]
    best = []
    for _ in range(n):
        cands = {}
        for v in beam:
            for i in np.flatnonzero(v == 0):
                for s in (1.0, -1.0):
                    w = v.copy()
                    w[i] = s
                    cands[w.tobytes()] = w
        C = np.array(list(cands.values()))
        vals = space.norm_many(C)
        order = np.argsort(-vals, kind="stable")[:width]
        beam = [C[i] for i in order]
        best.append(vals[order[0]])
    return np.maximum.accumulate(np.array(best))
