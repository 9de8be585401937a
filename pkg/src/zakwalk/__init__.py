"""Band structure, Zak phases and position-space simulation of discrete-time quantum walks."""

from .bands import DiracPoint, NormVector, dispersion, dispersion_surface, find_dirac_points, norm_vector
from .coins import CoinState, RotationSpec, apply_coin, momentum_step_unitary, rotation_matrix
from .errors import DomainError, ZakwalkError
from .params import HQW, NCRQW, SSQW, ProtocolParams, make_params
from .symmetry import flip_theta1, flipped_argument_walk, trs_allowed, trs_region_mask
from .walk import (
    TimeBinConfig,
    WalkState,
    evolve,
    from_time_bins,
    initial_state,
    initial_state_2d,
    overlap_phase,
    step_1d,
    to_time_bins,
)
from .zak import (
    berry_curvature_check,
    bloch_argument,
    bloch_eigenvectors,
    zak_closed_form_ssqw,
    zak_integrand_ncrqw,
    zak_landscape,
    zak_quadrature,
    zak_vector_2d,
    zak_wilson_loop,
)

__version__ = "0.1.0"

__all__ = [
    "HQW",
    "NCRQW",
    "SSQW",
    "CoinState",
    "DiracPoint",
    "DomainError",
    "NormVector",
    "ProtocolParams",
    "RotationSpec",
    "TimeBinConfig",
    "WalkState",
    "ZakwalkError",
    "apply_coin",
    "berry_curvature_check",
    "bloch_argument",
    "bloch_eigenvectors",
    "dispersion",
    "dispersion_surface",
    "evolve",
    "find_dirac_points",
    "flip_theta1",
    "flipped_argument_walk",
    "from_time_bins",
    "initial_state",
    "initial_state_2d",
    "make_params",
    "momentum_step_unitary",
    "norm_vector",
    "overlap_phase",
    "rotation_matrix",
    "step_1d",
    "to_time_bins",
    "trs_allowed",
    "trs_region_mask",
    "zak_closed_form_ssqw",
    "zak_integrand_ncrqw",
    "zak_landscape",
    "zak_quadrature",
    "zak_vector_2d",
    "zak_wilson_loop",
]
