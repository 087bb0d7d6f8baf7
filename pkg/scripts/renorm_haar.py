"""Fundamental profile of the L_p Haar basis before and after the main renorm."""
import csv
import os
import time
from dataclasses import dataclass

import numpy as np

from _config import parse
from greedylab.metrics import fundamental_profile, slc_constant
from greedylab.models import Haar
from greedylab.renorm import pipeline_renorm
from greedylab.seqlab import power_sequence


@dataclass
class Config:
    """Renorm Haar(levels, p) with sigma(m) = m^(1/p)."""
    levels: int = 3
    p: float = 3.0
    seed: int = 0
    out: str = "results/renorm_haar"


def run(cfg: Config):
    base = Haar(cfg.levels, cfg.p)
    t0 = time.perf_counter()
    res = pipeline_renorm(base, power_sequence(1 / cfg.p, base.dim), seed=cfg.seed)
    before = fundamental_profile(base)
    after = fundamental_profile(res.model)
    slc = slc_constant(res.model, max_size=2, equal_sizes=True)
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, f"profile_L{cfg.levels}_p{cfg.p:g}.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "sigma", "phi_u_base", "phi_l_base", "phi_u_renorm", "phi_l_renorm", "bidem_renorm"])
        for m in range(1, base.dim + 1):
            w.writerow([m, res.sigma(m), before.phi_u[m - 1], before.phi_l[m - 1], after.phi_u[m - 1],
                        after.phi_l[m - 1], after.phi_u[m - 1] * after.phi_u_dual[m - 1] / m])
    print(f"constants: {res.constants.to_json()}")
    print(f"base democracy      {np.max(before.phi_u / before.phi_l):.4f}")
    print(f"renormed democracy  {np.max(after.phi_u / after.phi_l):.9f}")
    print(f"renormed slc (|A|=|B|<=2)  {slc.value:.9f}")
    print(f"{time.perf_counter() - t0:.1f}s, table in {path}")


if __name__ == "__main__":
    run(parse(Config))
