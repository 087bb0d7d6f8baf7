"""Indicator norms and iteration counts of the truncated Schlumprecht norm."""
import itertools
from dataclasses import dataclass

import numpy as np

from _config import parse
from greedylab.models import Schlumprecht
from greedylab.spaces import indicator


@dataclass
class Config:
    dim: int = 12
    max_size: int = 8
    sets_per_size: int = 30
    seed: int = 0


def run(cfg: Config):
    sp = Schlumprecht(cfg.dim)
    print("size  law        worst error   max iterations")
    for k in range(1, cfg.max_size + 1):
        law = k / np.log2(k + 1)
        err, its = 0.0, 0
        for A in itertools.islice(itertools.combinations(range(cfg.dim), k), cfg.sets_per_size):
            val, it = sp.evaluate(indicator(A, cfg.dim), compress=False)
            err, its = max(err, abs(val - law)), max(its, it)
        print(f"{k:4d}  {law:.6f}  {err:.2e}      {its}")
    rng = np.random.default_rng(cfg.seed)
    its = [sp.evaluate(x, compress=False)[1] for x in rng.standard_normal((20, cfg.dim))]
    print(f"random vectors: iterations min {min(its)} max {max(its)}")


if __name__ == "__main__":
    run(parse(Config))
