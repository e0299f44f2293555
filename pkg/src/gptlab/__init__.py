"""Finite-dimensional generalized probabilistic theories on polytopes."""

from .channels import (Channel, ChannelError, TensorSpace, compose_channels, extend_with_identity, inverse,
                       is_reversible, make_channel, marginal, max_tensor_contains, measure_and_prepare,
                       min_tensor, permutation_channel)
from .core import (NotDistinguishable, Observable, StateSpace, contains_state, direct_sum,
                   find_distinguishing_observable, informationally_complete_observable,
                   make_state_space, max_pairwise_clique, simplex, validate_observable)
from .fidelity import FidelityResult, fidelity, fidelity_is_zero
from .lp import LpProblem, LpResult, Tolerances, lp_solve
from .polygon import (HelstromFamily, PolygonTheory, closed_form_optimum, helstrom_family, max_success_lp,
                      polygon_optimal_observable, polygon_theory, run_game, success_probability)
from .programming import (ProgrammingError, ProgrammingInstance, build_channel_programmer,
                          build_reversible_programmer, compute_residues, extract_program_observable,
                          no_programming_audit, verify_program)
from .structure import (Partition, QuasiClassicalStructure, check_condition_star,
                        enumerate_quasiclassical_decompositions, equivalence_decomposition,
                        quasiclassical_witness)

__version__ = "0.1.0"
