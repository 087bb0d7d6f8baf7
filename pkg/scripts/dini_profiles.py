"""Dini regularization of sqrt(m) and of a Haar fundamental function on 64 cells."""
import csv
import os
from dataclasses import dataclass

import numpy as np

from _config import parse
from greedylab.models import Haar, fundamental_beam_estimate
from greedylab.seqlab import PosSequence, check_regularity, dini_regularize, power_sequence


@dataclass
class Config:
    p: float = 3.0
    levels: int = 6
    beam: int = 24
    out: str = "results/dini"


def run(cfg: Config):
    n = 2 ** cfg.levels
    taus = {"sqrt": power_sequence(0.5, n),
            "haar": PosSequence(fundamental_beam_estimate(Haar(cfg.levels, cfg.p), cfg.beam))}
    os.makedirs(cfg.out, exist_ok=True)
    for name, tau in taus.items():
        sig = dini_regularize(tau)
        rep = check_regularity(sig)
        print(f"{name}: max sigma/tau = {np.max(sig.values / tau.values):.4f}, "
              f"Dini constant = {rep.dini_constant:.4f}, LRP r = {rep.lrp_witness}")
        with open(os.path.join(cfg.out, f"{name}.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "tau", "sigma"])
            w.writerows(zip(range(1, n + 1), tau.values, sig.values))


if __name__ == "__main__":
    run(parse(Config))
