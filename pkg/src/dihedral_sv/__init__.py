"""Classical simulation of a lattice-assisted quantum algorithm for the parity
of the slope in the dihedral hidden subgroup problem."""

from .dihedral_core import DihedralElement, HiddenInstance, compose, coset_fourier_sample, hidden_f
from .lattice import check_lll, lll_reduce
from .parity_pipeline import PipelineConfig, PipelineResult, run_pipeline
from .sv_solver import SubsetSumInstance, brute_force_subset_sum, solve_congruence, sv_solve

__version__ = "0.1.0"
