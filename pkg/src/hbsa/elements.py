"""Logical action of the linear-optical elements on photonic DOF qubits."""

from __future__ import annotations

import enum
from typing import Sequence

import numpy as np

from .hilbert import (
    HADAMARD,
    Dof,
    PhotonId,
    PureState,
    QubitAddress,
    apply_one_qubit,
    apply_unitary,
)

# |V>-controlled flip of the F mode: basis order (P, F) = HE, HI, VE, VI
CONTROLLED_F_FLIP = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


class ElementKind(enum.Enum):
    BS_HADAMARD = "bs"
    PBS0 = "pbs0"
    # measurement-basis marker only; consumed by hilbert.measure_photon
    PBS45 = "pbs45"


def bs_hadamard(state: PureState, photon: PhotonId, dof: Dof) -> PureState:
    """50:50 beam splitter on one of the photon's spatial-mode qubits."""
    if dof is Dof.P:
        raise ValueError("a beam splitter acts on spatial modes (F or S), not polarization")
    return apply_one_qubit(state, QubitAddress(photon, dof), HADAMARD)


def pbs0(state: PureState, photon: PhotonId) -> PureState:
    """PBS at 0 degrees: a V-polarized photon swaps its E and I modes, H passes unchanged."""
    return apply_unitary(
        state, [QubitAddress(photon, Dof.P), QubitAddress(photon, Dof.F)], CONTROLLED_F_FLIP
    )


def stage_c(state: PureState, pair: Sequence[PhotonId]) -> PureState:
    """Linear optics in front of the detectors: PBS0 on each photon, then S beam splitters."""
    first, second = pair
    if first == second:
        raise ValueError("pair photons must be distinct")
    for photon in (first, second):
        state = pbs0(state, photon)
    for photon in (first, second):
        state = bs_hadamard(state, photon, Dof.S)
    return state
