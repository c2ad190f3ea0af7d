"""Garling sequence spaces: norms, positionings, seeds and block-average experiments."""

from .dyadic import Dyadic
from .weights import Weight, harmonic
from .vectors import SparseVector, disjoint_concat
from .norms import (
    NormValue,
    garling_norm,
    garling_norm_bruteforce,
    garling_power,
    lorentz_norm,
    lp_norm,
    sup_norm,
    tail_weight_modulus,
)
from .positioning import (
    Positioning,
    greedy_j,
    greedy_ordering,
    greedy_positioning,
    greedy_sum,
    pi_prefix,
    positioning_from_pi,
    positioning_from_ranks,
    q_sequence,
)
from .seeds import (
    PowerCoefficients,
    Seed,
    block_sequence,
    block_sequence_Q,
    e_limit,
    e_tail,
    fundamental_function,
    perturbation_gaps,
)

__version__ = "0.1.0"

__all__ = [
    "Dyadic",
    "Weight",
    "harmonic",
    "SparseVector",
    "disjoint_concat",
    "NormValue",
    "garling_norm",
    "garling_norm_bruteforce",
    "garling_power",
    "lorentz_norm",
    "lp_norm",
    "sup_norm",
    "tail_weight_modulus",
    "Positioning",
    "greedy_j",
    "greedy_ordering",
    "greedy_positioning",
    "greedy_sum",
    "pi_prefix",
    "positioning_from_pi",
    "positioning_from_ranks",
    "q_sequence",
    "PowerCoefficients",
    "Seed",
    "block_sequence",
    "block_sequence_Q",
    "e_limit",
    "e_tail",
    "fundamental_function",
    "perturbation_gaps",
]
