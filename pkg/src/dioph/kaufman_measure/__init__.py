"""Kaufman-type measure on a continued-fraction Cantor set."""

from .blocks import (BlockDistribution, BlockParams, GoodBlockSet, block_sandwich_check,
                     build_block_distribution, build_good_set, envelope_check)
from .fourier import FourierResult, default_frequencies, fourier_estimate
from .measure import (DEFAULT_H_GRID, ConservationReport, HolderProfile, SampleBatch, SampleHandle,
                      conservation_check, continuant_estimate_check, holder_profile, lambda_bracket,
                      expand_by_length, mu_of_cylinder, sample_batch, sample_mu)
from .scales import (ALPHA0_NOMINAL, ALPHA0_THRESHOLD, TAU_THRESHOLD, AlphaChoice, Exceptional,
                     ScaleModel, Typical, case2_inequalities, choose_window, classify_log_scale,
                     classify_scale, select_alpha)
from .scheme import (CantorScheme, InsertionEvent, MembershipReport, PhiSpec, build_scheme,
                     insertion_events, membership_check, growth_schedule)

DESK_EPS = "0.7"


def desk_scheme(tau=1, insertions: int = 3, step: int = 4, eps=DESK_EPS) -> CantorScheme:
    """The desk-scale scheme used by the experiments: N=3, m=1, j0=2."""
    return build_scheme(BlockParams(3, 1, eps, 2), tau=tau, insertions=insertions, step=step)
