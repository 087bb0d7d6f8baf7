"""Greedy approximation constants and isometric renormings for finite-dimensional models."""
from . import models, renorm  # noqa: F401  (registers descriptor kinds)
from .metrics import (best_m_term, constants_report, fundamental_profile, greedy_sets, slc_constant, tga)
from .models import make_besov_truncation, make_haar, make_schlumprecht, schlumprecht_norm
from .renorm import (RenormConstants, almost_greedy_renorm, lattice_renorm, main_renorm, pipeline_renorm,
                     s_func, subsym_renorm, t_func, tc_func)
from .seqlab import (PosSequence, check_regularity, dini_regularize, doubling_minorant, dual_sequence,
                     power_sequence)
from .spaces import (SignedSet, apply_multiplier, apply_shift, dual_norm, make_direct_sum_lp, make_lorentz,
                     make_lp, make_marcinkiewicz, make_weighted_lp, norm, space_from_descriptor)

__all__ = [
    "PosSequence", "dual_sequence", "check_regularity", "dini_regularize", "doubling_minorant", "power_sequence",
    "SignedSet", "norm", "dual_norm", "apply_multiplier", "apply_shift", "make_weighted_lp", "make_lp",
    "make_lorentz", "make_marcinkiewicz", "make_direct_sum_lp", "space_from_descriptor",
    "greedy_sets", "tga", "best_m_term", "fundamental_profile", "constants_report", "slc_constant",
    "make_haar", "make_besov_truncation", "make_schlumprecht", "schlumprecht_norm",
    "s_func", "t_func", "tc_func", "lattice_renorm", "main_renorm", "almost_greedy_renorm", "subsym_renorm",
    "pipeline_renorm", "RenormConstants",
]
