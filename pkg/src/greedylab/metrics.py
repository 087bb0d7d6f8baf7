"""Greedy sets, the TGA, best m-term errors, fundamental functions and the
greedy-type constants of a model."""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import convex
from .seqlab import PosSequence, dual_sequence
from .spaces import SpaceModel, indicator, project

ENUM_CAP = 16


class CapExceeded(RuntimeError):
    pass


def _need_cap(space, cap):
    if space.dim > cap:
        raise CapExceeded(f"dim {space.dim} exceeds enumeration cap {cap}; use a sampling mode instead")


# ------------------------------------------------------------------ greedy sets and TGA

def greedy_sets(v, m: int) -> list[tuple]:
    """Every A with |A| = m and min_A |v| >= max off A |v|, as sorted tuples."""
    a = np.abs(np.asarray(v, float))
    n = a.size
    if not 0 <= m <= n:
        raise ValueError(f"m={m} outside 0..{n}")
    if m == 0:
        return [()]
    if m == n:
        return [tuple(range(n))]
    t = np.sort(a)[::-1][m - 1]
    above = [i for i in range(n) if a[i] > t]
    ties = [i for i in range(n) if a[i] == t]
    return [tuple(sorted(above + list(c))) for c in itertools.combinations(ties, m - len(above))]


def greedy_order(v) -> np.ndarray:
    """Indices by decreasing |v|, ties to the lowest index."""
    return np.argsort(-np.abs(np.asarray(v, float)), kind="stable")


@dataclass(frozen=True)
class TGAStep:
    greedy_set: tuple
    approximant: np.ndarray
    residual: np.ndarray


def tga(space: SpaceModel, v, m: int) -> TGAStep:
    v = space._check(v)
    if not 0 <= m <= space.dim:
        raise ValueError(f"m={m} outside 0..{space.dim}")
    A = tuple(sorted(int(i) for i in greedy_order(v)[:m]))
    G = project(v, A)
    return TGAStep(A, G, v - G)


# ------------------------------------------------------------------ best m-term

@dataclass(frozen=True)
class BestMTerm:
    value: float
    support: tuple
    coefficients: np.ndarray


def _subset_masks(n: int, m: int) -> tuple[list, np.ndarray]:
    combos = list(itertools.combinations(range(n), m))
    masks = np.zeros((len(combos), n), bool)
    for r, c in enumerate(combos):
        masks[r, list(c)] = True
    return combos, masks


def zeroing_errors(space: SpaceModel, v, m: int):
    """(values, supports) of N(v - S_B v) over all |B| = m."""
    v = np.asarray(v, float)
    combos, masks = _subset_masks(space.dim, m)
    return space.norm_many(np.where(masks, 0.0, v[None, :])), combos


def best_m_term(space: SpaceModel, v, m: int, cap: int = ENUM_CAP) -> BestMTerm:
    """Exact sigma_m(v) by enumerating supports of size m.

    Sign-invariant norms are lattice 1-unconditional, so the inner minimum
    over coefficients on B is attained by zeroing v on B.  Other norms solve
    the inner convex program.
    """
    v = space._check(v)
    n = space.dim
    if not 0 <= m <= n:
        raise ValueError(f"m={m} outside 0..{n}")
    _need_cap(space, cap)
    if m == 0:
        return BestMTerm(space.norm(v), (), np.zeros(n))
    supp = np.flatnonzero(v)
    if supp.size <= m:
        pad = [i for i in range(n) if v[i] == 0][: m - supp.size]
        B = tuple(sorted(supp.tolist() + pad))
        return BestMTerm(0.0, B, project(v, B))
    vals, combos = zeroing_errors(space, v, m)
    if space.sign_invariant:
        k = int(np.argmin(vals))
        return BestMTerm(float(vals[k]), combos[k], project(v, combos[k]))
    best = None
    for k in np.argsort(vals, kind="stable"):
        B = combos[k]
        val, a = convex.masked_min(space, v, B)
        val = min(val, float(vals[k]))
        if val == vals[k]:
            a = project(v, B)
        if best is None or val < best.value - 1e-15:
            best = BestMTerm(float(val), B, a)
    return best


# ------------------------------------------------------------------ fundamental functions

def sign_patterns(space: SpaceModel, A) -> list[np.ndarray]:
    """Sign vectors on A modulo free coordinates and the global sign."""
    A = list(A)
    free = set(space.free_signs())
    live = [i for i in A if i not in free]
    if not live:
        return [indicator(A, space.dim)]
    out = []
    for rest in itertools.product((1.0, -1.0), repeat=len(live) - 1):
        v = indicator(A, space.dim)
        for i, s in zip(live[1:], rest):
            v[i] = s
        out.append(v)
    return out


def signed_indicators(space: SpaceModel, cap: int = ENUM_CAP):
    """All 1_{eps,A} (A nonempty) up to norm-preserving sign changes, with |A|."""
    _need_cap(space, cap)
    n = space.dim
    vecs, sizes = [], []
    for size in range(1, n + 1):
        for A in itertools.combinations(range(n), size):
            for v in sign_patterns(space, A):
                vecs.append(v)
                sizes.append(size)
    return np.array(vecs), np.array(sizes)


@dataclass
class FundamentalProfile:
    phi_u: np.ndarray
    phi_l: np.ndarray
    phi_u_dual: np.ndarray | None
    phi_l_dual: np.ndarray | None
    sign_collapsed: bool
    dual_certified: bool = True
    witnesses: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.phi_u.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "phi_u", "phi_l", "phi_u_dual", "phi_l_dual"])
        for m in range(1, self.dim + 1):
            row = [m, repr(float(self.phi_u[m - 1])), repr(float(self.phi_l[m - 1]))]
            if self.phi_u_dual is not None:
                row += [repr(float(self.phi_u_dual[m - 1])), repr(float(self.phi_l_dual[m - 1]))]
            else:
                row += ["", ""]
            w.writerow(row)
        return buf.getvalue()


def _envelopes(vals, sizes, n):
    best = np.array([vals[sizes == k].max() for k in range(1, n + 1)])
    worst = np.array([vals[sizes == k].min() for k in range(1, n + 1)])
    return np.maximum.accumulate(best), np.minimum.accumulate(worst[::-1])[::-1]


def fundamental_profile(space: SpaceModel, cap: int = ENUM_CAP, dual: bool = True) -> FundamentalProfile:
    vecs, sizes = signed_indicators(space, cap)
    vals = space.norm_many(vecs)
    phi_u, phi_l = _envelopes(vals, sizes, space.dim)
    wit = {"phi_u_argmax": [np.flatnonzero(vecs[np.flatnonzero(sizes == k)[np.argmax(vals[sizes == k])]]).tolist()
                            for k in range(1, space.dim + 1)]}
    phi_u_dual = phi_l_dual = None
    certified = True
    if dual:
        ests = [space.dual_bracket(v) for v in vecs]
        certified = all(e.certified for e in ests)
        dvals = np.array([e.value for e in ests])
        phi_u_dual, phi_l_dual = _envelopes(dvals, sizes, space.dim)
    return FundamentalProfile(phi_u, phi_l, phi_u_dual, phi_l_dual, space.sign_invariant, certified, wit)


# ------------------------------------------------------------------ constants

@dataclass
class Constant:
    value: float
    mode: str          # exact | lower-bound-estimate
    witness: dict = field(default_factory=dict)
    note: str = ""

    def to_json(self):
        d = {"value": self.value, "mode": self.mode, "witness": self.witness}
        if self.note:
            d["note"] = self.note
        return d


def sample_vectors(rng: np.random.Generator, n: int, count: int, grid_only: bool = False) -> np.ndarray:
    """A mix of gaussian, grid-valued and flat-topped vectors."""
    grid = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    if grid_only:
        return grid[rng.integers(0, 5, size=(count, n))]
    out = rng.standard_normal((count, n))
    k = count // 3
    out[:k] = grid[rng.integers(0, 5, size=(k, n))]
    # flat tops: a random block of coordinates shares the largest modulus
    for r in range(k, 2 * k):
        top = rng.random(n) < 0.4
        out[r, top] = np.sign(out[r, top]) * (np.abs(out[r]).max() + 0.0)
    sparse = rng.random((count - 2 * k, n)) < 0.35
    out[2 * k:][sparse] = 0.0
    zero_rows = ~np.any(out, axis=1)
    out[zero_rows, 0] = 1.0
    return out


def _ratio_search(space, rng, num, samples, n):
    """Max of num(v)/N(v) over sampled v with a short random-perturbation ascent."""
    V = sample_vectors(rng, n, samples)
    den = space.norm_many(V)
    r = np.array([num(v) for v in V]) / den
    order = np.argsort(-r)[:5]
    best_v, best_r = V[order[0]], float(r[order[0]])
    for i in order:
        v, cur = V[i].copy(), float(r[i])
        step = 0.5
        for _ in range(200):
            w = v + step * rng.standard_normal(n)
            rw = num(w) / space.norm(w)
            if rw > cur:
                v, cur = w, rw
            else:
                step *= 0.97
        if cur > best_r:
            best_v, best_r = v, cur
    return best_r, best_v


def unconditionality(space: SpaceModel, rng, samples=300):
    """(K_u, K_su, k_m) constants; exact 1 for sign-invariant norms."""
    n = space.dim
    if space.sign_invariant:
        one = Constant(1.0, "exact", {"vector": [1.0] + [0.0] * (n - 1)}, "sign-invariant norm")
        return one, one, [Constant(1.0, "exact") for _ in range(n)]
    ku, ku_w = 1.0, {}
    nonfree = [i for i in range(n) if i not in set(space.free_signs())]
    for rest in itertools.product((1.0, -1.0), repeat=max(len(nonfree) - 1, 0)):
        eps = np.ones(n)
        eps[nonfree[1:]] = rest
        r, v = _ratio_search(space, rng, lambda x: space.norm(eps * x), samples, n)
        if r > ku:
            ku, ku_w = r, {"signs": eps.tolist(), "vector": v.tolist()}
    km = []
    best_so_far, best_w = 1.0, {}
    for m in range(1, n + 1):
        for A in itertools.combinations(range(n), m):
            if m > 3 and m < n - 1:
                continue  # middle sizes are covered by complements of small sets below
            r, v = _ratio_search(space, rng, lambda x: space.norm(project(x, A)), max(samples // 10, 20), n)
            if r > best_so_far:
                best_so_far, best_w = r, {"set": list(A), "vector": v.tolist()}
        km.append(Constant(best_so_far, "lower-bound-estimate", dict(best_w)))
    ksu = Constant(max(c.value for c in km), "lower-bound-estimate", km[-1].witness)
    return Constant(ku, "lower-bound-estimate", ku_w), ksu, km


def _masks(n, size):
    combos = list(itertools.combinations(range(n), size))
    bits = np.array([sum(1 << i for i in c) for c in combos], dtype=np.int64)
    return combos, bits


def slc_constant(space: SpaceModel, max_size: int = 3, grid=(-1.0, -0.5, 0.0, 0.5, 1.0),
                 g_support: int = 2, equal_sizes: bool = False) -> Constant:
    """Worst ratio N(1_{eps,A}+g)/N(1_{delta,B}+g) over the declared family.

    A, B disjoint, |A| <= |B| <= max_size (or |A| = |B|), g grid-valued with
    at most ``g_support`` nonzero coordinates off A u B.
    """
    n = space.dim
    grid_nz = [x for x in grid if x != 0]
    # signed set families per size: list of (bitmask, vector) with free signs collapsed
    fam = {}
    for size in range(0, max_size + 1):
        combos, bits = _masks(n, size)
        entries = []
        for c, b in zip(combos, bits):
            if size == 0:
                pats = [np.zeros(n)]
            elif space.sign_invariant:
                pats = [indicator(c, n)]
            else:
                # g breaks the global sign symmetry, so keep both signs
                pats = sign_patterns(space, c)
                pats = pats + [-v for v in pats]
            for v in pats:
                entries.append((int(b), v))
        fam[size] = entries
    worst, wit = 0.0, {}
    g_list = [np.zeros(n)]
    for k in range(1, g_support + 1):
        for supp in itertools.combinations(range(n), k):
            for vals in itertools.product(grid_nz, repeat=k):
                g = np.zeros(n)
                g[list(supp)] = vals
                g_list.append(g)
    for g in g_list:
        gbits = sum(1 << int(i) for i in np.flatnonzero(g))
        val = {}
        for size, entries in fam.items():
            ok = [(b, v) for b, v in entries if b & gbits == 0]
            if not ok:
                continue
            norms = space.norm_many(np.array([v + g for _, v in ok]))
            # per set: max and min over sign patterns
            per = {}
            for (b, v), x in zip(ok, norms):
                lo, hi, vhi, vlo = per.get(b, (np.inf, -np.inf, None, None))
                if x > hi:
                    hi, vhi = x, v
                if x < lo:
                    lo, vlo = x, v
                per[b] = (lo, hi, vhi, vlo)
            val[size] = per
        for a in val:
            for bsz in val:
                if bsz < a or (equal_sizes and bsz != a) or bsz == 0:
                    continue
                pa, pb = val[a], val[bsz]
                ab = np.array(list(pa.keys()), dtype=np.int64)
                bb = np.array(list(pb.keys()), dtype=np.int64)
                hi = np.array([pa[k][1] for k in pa])
                lo = np.array([pb[k][0] for k in pb])
                disjoint = (ab[:, None] & bb[None, :]) == 0
                ratio = np.where(disjoint, hi[:, None] / lo[None, :], -np.inf)
                i, j = np.unravel_index(np.argmax(ratio), ratio.shape)
                if ratio[i, j] > worst:
                    worst = float(ratio[i, j])
                    wit = {"A": pa[int(ab[i])][2].tolist(), "B": pb[int(bb[j])][3].tolist(), "g": g.tolist()}
    return Constant(worst, "exact", wit, f"family |A|,|B|<={max_size}, |supp g|<={g_support}")


def lorentz_embedding_constant(space: SpaceModel, sigma: PosSequence, cap: int = ENUM_CAP) -> Constant:
    """C_e = max_m sigma*(m) max_{|A|=m, eps} max{t : eps_n y_n >= t on A, N*(y) <= 1}.

    The inner value equals min over the simplex on A of N(sum lam_n eps_n e_n);
    for sign-invariant norms it is 1/N*(1_A), taken from the certified lower
    bound of the dual norm so that C_e is not underestimated.
    """
    _need_cap(space, cap)
    n = space.dim
    sd = dual_sequence(sigma.truncate(n)).values
    best, wit = 0.0, {}
    for m in range(1, n + 1):
        for A in itertools.combinations(range(n), m):
            for v in sign_patterns(space, A):
                if space.sign_invariant:
                    t = 1.0 / space.dual_bracket(v).lower
                else:
                    t = convex.simplex_min(space, {i: float(v[i]) for i in A})
                if sd[m - 1] * t > best:
                    best, wit = sd[m - 1] * t, {"set": list(A), "signs": [float(v[i]) for i in A], "t": t}
    return Constant(float(best), "exact", wit, "one convex program per signed set")


def _all_masks(n: int):
    bits = np.arange(2 ** n)
    masks = ((bits[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    return masks, masks.sum(axis=1)


def greedy_ratios(space: SpaceModel, V):
    """Per vector: (screened ratio, m, greedy set) maximising N(f - S_A f)/min_|B|=m N(f - S_B f).

    Every zeroing N(f - S_B f) is evaluated once; numerators and screened
    denominators are both read from that table.
    """
    n = space.dim
    masks, pop = _all_masks(n)
    weights = 1 << np.arange(n)
    out = []
    for f in V:
        vals = space.norm_many(np.where(masks, 0.0, f[None, :]))
        best = (0.0, 0, ())
        for m in range(1, n):
            den = float(vals[pop == m].min())
            for A in greedy_sets(f, m):
                num = float(vals[int(weights[list(A)].sum())])
                r = num / den if den > 0 else (1.0 if num == 0 else np.inf)
                if r > best[0]:
                    best = (r, m, A)
        out.append(best)
    return out


def greedy_constant(space: SpaceModel, rng, samples=2000, refine=20, grid_only=False) -> Constant:
    """Certified lower bound for K_g.

    Screening uses min over |B|=m of N(f - S_B f) >= sigma_m(f); the best
    candidates are re-scored with the exact best m-term error.
    """
    V = sample_vectors(rng, space.dim, samples, grid_only)
    scr = greedy_ratios(space, V)
    order = np.argsort([-s[0] for s in scr], kind="stable")[:refine]
    best = Constant(1.0, "lower-bound-estimate", {}, "sampled")
    for i in order:
        r0, m, A = scr[i]
        if m == 0:
            continue
        f = V[i]
        num = space.norm(f - project(f, A))
        bm = best_m_term(space, f, m)
        r = num / bm.value if bm.value > 0 else 1.0
        if r > best.value:
            best = Constant(float(r), "lower-bound-estimate",
                            {"vector": f.tolist(), "greedy_set": list(A), "numerator": num,
                             "sigma_m": bm.value, "best_support": list(bm.support),
                             "best_coefficients": bm.coefficients.tolist()}, "sampled")
    return best


def quasi_greedy_constants(space: SpaceModel, rng, samples=2000, grid_only=False):
    """(quasi-greedy, suppression quasi-greedy, almost-greedy) lower bounds."""
    n = space.dim
    V = sample_vectors(rng, n, samples, grid_only)
    qg, sqg, ag = (1.0, {}), (1.0, {}), (1.0, {})
    for f in V:
        nf = space.norm(f)
        for m in range(1, n):
            for A in greedy_sets(f, m):
                kept = project(f, A)
                rest = space.norm(f - kept)
                r1, r2 = space.norm(kept) / nf, rest / nf
                if r1 > qg[0]:
                    qg = (r1, {"vector": f.tolist(), "greedy_set": list(A)})
                if r2 > sqg[0]:
                    sqg = (r2, {"vector": f.tolist(), "greedy_set": list(A)})
                r3, E = almost_greedy_ratio(space, f, A)
                if r3 > ag[0]:
                    ag = (r3, {"vector": f.tolist(), "greedy_set": list(A), "other_set": list(E)})
    mk = lambda t: Constant(float(t[0]), "lower-bound-estimate", t[1], "sampled")
    return mk(qg), mk(sqg), mk(ag)


def almost_greedy_ratio(space: SpaceModel, f, A):
    """max over E disjoint from A, |E| <= |A|, of N(f - S_A f)/N(f - S_E f)."""
    n = space.dim
    rest = [i for i in range(n) if i not in A]
    num = space.norm(f - project(f, A))
    cands = [E for k in range(0, len(A) + 1) for E in itertools.combinations(rest, k)]
    V = np.array([f - project(f, E) for E in cands])
    den = space.norm_many(V)
    j = int(np.argmin(den))
    if den[j] == 0:
        return (1.0 if num == 0 else np.inf), cands[j]
    return float(num / den[j]), cands[j]


@dataclass
class ConstantsReport:
    entries: dict
    profile: FundamentalProfile

    def to_json(self) -> dict:
        out = {}
        for k, v in self.entries.items():
            out[k] = [c.to_json() for c in v] if isinstance(v, list) else v.to_json()
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["constant", "value", "mode"])
        for k, v in self.entries.items():
            if isinstance(v, list):
                for m, c in enumerate(v, 1):
                    w.writerow([f"{k}[{m}]", repr(c.value), c.mode])
            else:
                w.writerow([k, repr(v.value), v.mode])
        return buf.getvalue()


def constants_report(space: SpaceModel, seed: int = 0, samples: int = 400, cap: int = ENUM_CAP,
                     slc_size: int = 3, sigma: PosSequence | None = None) -> ConstantsReport:
    _need_cap(space, cap)
    rng = np.random.default_rng(seed)
    prof = fundamental_profile(space, cap)
    n = space.dim
    m = np.arange(1, n + 1)
    grid_only = space.expensive
    ku, ksu, km = unconditionality(space, rng, samples=max(samples // 4, 30))
    dem = prof.phi_u / prof.phi_l
    k = int(np.argmax(dem))
    entries = {
        "lattice_unconditional": ku,
        "suppression_unconditional": ksu,
        "unconditionality_params": km,
        "democracy": Constant(float(dem[k]), "exact", {"m": k + 1}),
        "superdemocracy": Constant(float(dem[k]), "exact", {"m": k + 1}, "signs enumerated"),
        "slc": slc_constant(space, max_size=min(slc_size, n // 2)),
    }
    bid = prof.phi_u * prof.phi_u_dual / m
    k = int(np.argmax(bid))
    entries["bidemocracy"] = Constant(float(bid[k]), "exact" if prof.dual_certified else "lower-bound-estimate",
                                      {"m": k + 1})
    qg, sqg, ag = quasi_greedy_constants(space, rng, samples, grid_only)
    entries["quasi_greedy"] = qg
    entries["suppression_quasi_greedy"] = sqg
    entries["greedy"] = greedy_constant(space, rng, samples, grid_only=grid_only)
    entries["almost_greedy"] = ag
    sig = sigma if sigma is not None else PosSequence(prof.phi_u)
    entries["lorentz_embedding"] = lorentz_embedding_constant(space, sig, cap)
    # isometric certificate: suppression 1 and slc 1 give K_g = 1 on the tested family
    if ksu.mode == "exact" and ksu.value == 1.0 and entries["slc"].value <= 1 + 1e-9:
        for key in ("quasi_greedy", "suppression_quasi_greedy", "greedy", "almost_greedy"):
            c = entries[key]
            if c.value <= 1 + 1e-9:
                entries[key] = Constant(c.value, "exact", c.witness, "suppression-1 and slc-1 certificate")
    return ConstantsReport(entries, prof)
