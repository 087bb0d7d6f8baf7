"""Greedy-constant lower bounds: classical Haar against its renormed version."""
import json
import os
from dataclasses import dataclass

import numpy as np

from _config import parse
from greedylab.metrics import best_m_term, greedy_constant, greedy_sets
from greedylab.models import Haar
from greedylab.renorm import pipeline_renorm
from greedylab.seqlab import power_sequence
from greedylab.spaces import project


@dataclass
class Config:
    """Sampled K_g for Haar(levels, p) and for the renormed model."""
    levels: int = 3
    p: float = 3.0
    samples: int = 2000
    probes: int = 2000
    seed: int = 0
    out: str = "results/greedy_contrast"


def renormed_worst(model, probes, rng):
    grid = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    worst = 0.0
    for _ in range(probes):
        f = rng.choice(grid, size=model.dim)
        if not f.any():
            continue
        m = int(rng.integers(1, model.dim))
        bm = best_m_term(model, f, m)
        num = model.norm(f - project(f, greedy_sets(f, m)[0]))
        worst = max(worst, num / bm.value if bm.value > 0 else 1.0)
    return worst


def run(cfg: Config):
    base = Haar(cfg.levels, cfg.p)
    kg = greedy_constant(base, np.random.default_rng(cfg.seed), samples=cfg.samples)
    model = pipeline_renorm(base, power_sequence(1 / cfg.p, base.dim), seed=cfg.seed).model
    worst = renormed_worst(model, cfg.probes, np.random.default_rng(cfg.seed))
    os.makedirs(cfg.out, exist_ok=True)
    res = {"config": vars(cfg), "classical": kg.to_json(), "renormed_worst_ratio": worst}
    with open(os.path.join(cfg.out, f"contrast_L{cfg.levels}_p{cfg.p:g}.json"), "w") as fh:
        json.dump(res, fh, indent=2, sort_keys=True)
    print(f"classical K_g >= {kg.value:.4f}")
    print(f"renormed worst greedy ratio over {cfg.probes} probes: {worst:.9f}")


if __name__ == "__main__":
    run(parse(Config))
