"""Small convex programs shared by the dual-norm, best m-term and renorm code.

Every program is a minimisation (or maximisation) of a model's norm over an
affine family.  Models that expose a cvxpy expression get one parametrised,
DPP-compliant problem per template, compiled once and re-solved.  Models
without one fall back to Kelley's cutting-plane method driven by the model's
subgradient oracle.
"""
from __future__ import annotations

import warnings

import cvxpy as cp
import numpy as np
from scipy.optimize import linprog

SOLVER_KW = dict(solver=cp.CLARABEL, tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11, max_iter=400)
FALLBACK_KW = dict(solver=cp.SCS, eps=1e-10, max_iters=200000)


class ConvexFailure(RuntimeError):
    pass


def _solve(prob: cp.Problem) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            prob.solve(**SOLVER_KW)
        except cp.error.SolverError:
            pass
    if prob.status not in ("optimal", "optimal_inaccurate"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            prob.solve(**FALLBACK_KW)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise ConvexFailure(f"solver status {prob.status}")
    return float(prob.value)


def _templates(model) -> dict:
    cache = model.__dict__.get("_cvx_templates")
    if cache is None:
        cache = {}
        object.__setattr__(model, "_cvx_templates", cache)
    return cache


def has_cvx(model) -> bool:
    x = cp.Variable(model.dim)
    try:
        return model.cvx_norm(x) is not None
    except NotImplementedError:
        return False


# ---------------------------------------------------------------- Kelley

def kelley_min(model, c, G, *, simplex=False, fixed_zero=None, tol=1e-9, max_iter=400):
    """min N(c + G lam) over lam >= 0 (and sum lam = 1 when ``simplex``).

    Returns (upper, lower, lam).  ``upper`` is attained by ``lam``; ``lower``
    is the final cutting-plane bound, valid inside the search box.
    """
    c = np.asarray(c, float)
    G = np.asarray(G, float)
    k = G.shape[1]
    if k == 0:
        v = model.norm(c)
        return v, v, np.zeros(0)
    ub = np.full(k, 1.0 if simplex else 4.0 * (model.norm(c) + 1.0) * max(1.0, model.linf_bound))
    ub_fixed = ub.copy()
    if fixed_zero is not None:
        ub_fixed[np.asarray(fixed_zero, bool)] = 0.0
    a_eq = np.concatenate([np.ones((1, k)), np.zeros((1, 1))], axis=1) if simplex else None
    b_eq = [1.0] if simplex else None
    lam = np.zeros(k)
    if simplex:
        free = np.flatnonzero(ub_fixed > 0)
        lam[free] = 1.0 / free.size
    cuts_a, cuts_b = [], []
    best, best_lam, lower = np.inf, lam, -np.inf
    for _ in range(max_iter):
        point = c + G @ lam
        val = model.norm(point)
        g = G.T @ model.subgradient(point)
        if val < best:
            best, best_lam = val, lam.copy()
        # theta >= val + g.(l - lam)  <=>  g.l - theta <= g.lam - val
        cuts_a.append(np.concatenate([g, [-1.0]]))
        cuts_b.append(g @ lam - val)
        res = linprog(
            np.concatenate([np.zeros(k), [1.0]]),
            A_ub=np.array(cuts_a), b_ub=np.array(cuts_b),
            A_eq=a_eq, b_eq=b_eq,
            bounds=[(0.0, u) for u in ub_fixed] + [(0.0, None)],
            method="highs",
        )
        if res.status != 0:
            raise ConvexFailure(res.message)
        lam = res.x[:k]
        lower = max(lower, res.fun)
        if best - lower <= tol * max(1.0, best):
            break
    return best, lower, best_lam


def kelley_dual(model, y, tol=1e-9, max_iter=500):
    """sup y.x over N(x) <= 1 by outer cutting planes.  Returns (upper, lower, x)."""
    y = np.asarray(y, float)
    n = y.size
    R = model.linf_bound
    cuts = []
    best_lower, best_x = 0.0, np.zeros(n)
    upper = np.inf
    for _ in range(max_iter):
        res = linprog(-y, A_ub=np.array(cuts) if cuts else None, b_ub=np.ones(len(cuts)) if cuts else None,
                      bounds=[(-R, R)] * n, method="highs")
        if res.status != 0:
            raise ConvexFailure(res.message)
        x = res.x
        upper = min(upper, -res.fun)
        nx = model.norm(x)
        if nx > 0:
            low = float(y @ x) / nx
            if low > best_lower:
                best_lower, best_x = low, x / nx
        if upper - best_lower <= tol * max(1.0, upper) or nx <= 1.0 + 1e-13:
            break
        g = model.subgradient(x)
        cuts.append(g)
    return upper, best_lower, best_x


# ---------------------------------------------------------------- templates

def dual_program(model, y):
    """(value, maximiser x with N(x)<=1) of sup y.x over the unit ball."""
    if not has_cvx(model):
        up, low, x = kelley_dual(model, y)
        return up, low, x
    t = _templates(model)
    if "dual" not in t:
        x = cp.Variable(model.dim)
        yp = cp.Parameter(model.dim)
        prob = cp.Problem(cp.Maximize(yp @ x), [model.cvx_norm(x) <= 1])
        t["dual"] = (prob, x, yp)
    prob, x, yp = t["dual"]
    yp.value = np.asarray(y, float)
    val = _solve(prob)
    xv = np.asarray(x.value, float)
    nx = model.norm(xv)
    low = float(np.asarray(y) @ xv) / nx if nx > 0 else 0.0
    return max(val, low), low, xv / nx if nx > 0 else xv


def region_generators(B_signs: dict, n: int, outside=None) -> np.ndarray:
    """Generators of the dual cone of {y : s_j y_j >= |y_k|, j in B, k in outside}."""
    if outside is None:
        outside = [k for k in range(n) if k not in B_signs]
    cols = []
    for j, s in B_signs.items():
        for k in outside:
            for pm in (1.0, -1.0):
                col = np.zeros(n)
                col[j] = s
                col[k] = pm
                cols.append(col)
    return np.array(cols).T if cols else np.zeros((n, 0))


def region_min(model, c, B_signs: dict) -> float:
    """sup c.y over the dual ball intersected with {B greedy for y with sign s on B}.

    Computed in its dual form  min N(c+z),  s_j z_j >= 0 on B,
    ||z off B||_1 <= sum_B s_j z_j.
    """
    c = np.asarray(c, float)
    n = c.size
    if not B_signs or len(B_signs) == n:
        # no outside coordinates: the region constraint is vacuous
        return model.norm(c)
    if not has_cvx(model):
        return kelley_min(model, c, region_generators(B_signs, n))[0]
    t = _templates(model)
    if "region" not in t:
        z = cp.Variable(n)
        cp_ = cp.Parameter(n)
        sp = cp.Parameter(n)
        op = cp.Parameter(n, nonneg=True)
        cons = [cp.multiply(sp, z) >= 0, cp.norm1(cp.multiply(op, z)) <= cp.sum(cp.multiply(sp, z))]
        prob = cp.Problem(cp.Minimize(model.cvx_norm(cp_ + z)), cons)
        t["region"] = (prob, cp_, sp, op)
    prob, cp_, sp, op = t["region"]
    s = np.zeros(n)
    for j, v in B_signs.items():
        s[j] = v
    cp_.value = c
    sp.value = s
    op.value = (s == 0).astype(float)
    return _solve(prob)


def cone_min(model, c, G) -> float:
    """min N(c + G lam) over lam >= 0 for an explicit generator matrix G."""
    c = np.asarray(c, float)
    G = np.asarray(G, float)
    if G.shape[1] == 0:
        return model.norm(c)
    if not has_cvx(model):
        return kelley_min(model, c, G)[0]
    lam = cp.Variable(G.shape[1], nonneg=True)
    prob = cp.Problem(cp.Minimize(model.cvx_norm(c + G @ lam)))
    return _solve(prob)


def simplex_min(model, signs: dict) -> float:
    """min N(sum lam_n s_n e_n) over the probability simplex on the keys of ``signs``."""
    n = model.dim
    idx = sorted(signs)
    if len(idx) == 1:
        e = np.zeros(n)
        e[idx[0]] = 1.0
        return model.norm(e)
    if not has_cvx(model):
        G = np.zeros((n, len(idx)))
        for col, j in enumerate(idx):
            G[j, col] = signs[j]
        return kelley_min(model, np.zeros(n), G, simplex=True)[0]
    t = _templates(model)
    if "simplex" not in t:
        lam = cp.Variable(n, nonneg=True)
        sp = cp.Parameter(n)
        mp = cp.Parameter(n, nonneg=True)
        prob = cp.Problem(cp.Minimize(model.cvx_norm(cp.multiply(sp, lam))),
                          [cp.sum(lam) == 1, cp.multiply(mp, lam) == 0])
        t["simplex"] = (prob, sp, mp)
    prob, sp, mp = t["simplex"]
    s = np.zeros(n)
    for j, v in signs.items():
        s[j] = v
    sp.value = s
    mp.value = (s == 0).astype(float)
    return _solve(prob)


def masked_min(model, v, support) -> tuple[float, np.ndarray]:
    """min over a supported on ``support`` of N(v - a).  Returns (value, a)."""
    v = np.asarray(v, float)
    n = v.size
    support = list(support)
    if not support:
        return model.norm(v), np.zeros(n)
    if not has_cvx(model):
        G = np.zeros((n, 2 * len(support)))
        for col, j in enumerate(support):
            G[j, 2 * col] = 1.0
            G[j, 2 * col + 1] = -1.0
        val, _, lam = kelley_min(model, v, G)
        a = -(G @ lam)
        return val, a
    t = _templates(model)
    if "masked" not in t:
        a = cp.Variable(n)
        vp = cp.Parameter(n)
        mp = cp.Parameter(n, nonneg=True)
        prob = cp.Problem(cp.Minimize(model.cvx_norm(vp - cp.multiply(mp, a))))
        t["masked"] = (prob, a, vp, mp)
    prob, a, vp, mp = t["masked"]
    m = np.zeros(n)
    m[support] = 1.0
    vp.value = v
    mp.value = m
    _solve(prob)
    coef = np.where(m > 0, np.asarray(a.value, float), 0.0)
    # the witness value is attained, so it is what gets reported
    return model.norm(v - coef), coef
