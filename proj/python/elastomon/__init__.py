"""Elasticity Neumann-to-Dirichlet inclusion reconstruction."""

import json

from ._core import (
    InvalidArgument,
    NumericalFailure,
    Session as _Session,
    add_noise,
    compute_amax_tau,
    compute_beta,
    desk_config as _desk_config,
    onestep_solve,
    solve_box_qp,
    symmetrized_abs,
)

__all__ = [
    "InvalidArgument",
    "NumericalFailure",
    "Session",
    "add_noise",
    "compute_amax_tau",
    "compute_beta",
    "desk_config",
    "onestep_solve",
    "solve_box_qp",
    "symmetrized_abs",
]


def desk_config():
    return json.loads(_desk_config())


def Session(config=None):
    """Forward data and sensitivities for `config` (dict, nested or dotted keys)."""
    return _Session("" if config is None else json.dumps(config))
