"""Teleporting a three-DOF single-photon state over the all-plus hyper-Bell channel."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .analyzer import AnalysisRecord, analyze
from .hilbert import (
    ATOL,
    DOFS,
    IDENTITY,
    PAULI_X,
    PAULI_Z,
    BellLabel,
    HyperBellLabel,
    Parity,
    Phase,
    PhotonId,
    PureState,
    QubitAddress,
    apply_one_qubit,
    hyper_bell_state,
    normalized,
    photon_register,
    project_onto,
    reorder,
    tensor,
    fidelity,
)
from .kerr import HomodyneModel

SENDER_PAIR = (PhotonId.X, PhotonId.A)
CHANNEL_PAIR = (PhotonId.A, PhotonId.B)
ALL_PLUS = HyperBellLabel(*(BellLabel(Parity.PHI, Phase.PLUS),) * 3)


@dataclass(frozen=True)
class DofAmplitudes:
    a: complex
    b: complex

    def __post_init__(self) -> None:
        if abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1.0) > ATOL:
            raise ValueError(f"|a|^2 + |b|^2 must be 1, got {abs(self.a) ** 2 + abs(self.b) ** 2!r}")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "DofAmplitudes":
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        return cls(complex(v[0]), complex(v[1]))

    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=complex)


class Correction(enum.Enum):
    I = "I"
    Z = "Z"
    X = "X"
    ZX = "ZX"

    @property
    def matrix(self) -> np.ndarray:
        # ZX means X first, then Z
        return {
            Correction.I: IDENTITY,
            Correction.Z: PAULI_Z,
            Correction.X: PAULI_X,
            Correction.ZX: PAULI_Z @ PAULI_X,
        }[self]


class CorrectionOp(NamedTuple):
    p: Correction
    f: Correction
    s: Correction

    def apply(self, state: PureState, photon: PhotonId) -> PureState:
        for dof, corr in zip(DOFS, self):
            state = apply_one_qubit(state, QubitAddress(photon, dof), corr.matrix)
        return state


_CORRECTIONS = {
    (Parity.PHI, Phase.PLUS): Correction.I,
    (Parity.PHI, Phase.MINUS): Correction.Z,
    (Parity.PSI, Phase.PLUS): Correction.X,
    (Parity.PSI, Phase.MINUS): Correction.ZX,
}


def correction_for(label: HyperBellLabel) -> CorrectionOp:
    return CorrectionOp(*(_CORRECTIONS[tuple(bell)] for bell in label))


def make_input(
    p: DofAmplitudes, f: DofAmplitudes, s: DofAmplitudes, photon: PhotonId = PhotonId.X
) -> PureState:
    return PureState(
        photon_register(photon), np.kron(np.kron(p.vector(), f.vector()), s.vector())
    )


def make_channel() -> PureState:
    return hyper_bell_state(ALL_PLUS, CHANNEL_PAIR)


class TeleportResult(NamedTuple):
    label: HyperBellLabel
    bob_state: PureState
    fidelity: float
    record: AnalysisRecord


def teleport(
    p: DofAmplitudes,
    f: DofAmplitudes,
    s: DofAmplitudes,
    model: HomodyneModel | None = None,
    rng: np.random.Generator | None = None,
) -> TeleportResult:
    """Alice analyzes (X, A); Bob corrects B according to the decoded label."""
    joint = tensor(make_input(p, f, s), make_channel())
    record, post = analyze(joint, SENDER_PAIR, model, rng)
    label = record.decoded
    post = correction_for(label).apply(post, PhotonId.B)
    target = make_input(p, f, s, photon=PhotonId.B)
    # X and A are left in detected product states, so B's reduced state is pure
    rho_fid = fidelity(post, target)
    return TeleportResult(label, _bob_state(post), rho_fid, record)


def _bob_state(post: PureState) -> PureState:
    """Extract photon B's ket from a state where every other photon is in a product state."""
    bob = photon_register(PhotonId.B)
    aligned = reorder(post, [a for a in post.register if a not in bob] + list(bob))
    block = aligned.amplitudes.reshape(-1, 8)
    row = int(np.argmax(np.linalg.norm(block, axis=1)))
    return normalized(PureState(bob, block[row]))


def forced_outcome(
    p: DofAmplitudes, f: DofAmplitudes, s: DofAmplitudes, label: HyperBellLabel
) -> tuple[float, PureState]:
    """Project (X, A) onto hyper-Bell ``label`` instead of sampling the analyzer.

    Returns the outcome probability and Bob's uncorrected state.
    """
    joint = tensor(make_input(p, f, s), make_channel())
    rest = project_onto(joint, hyper_bell_state(label, SENDER_PAIR))
    prob = rest.norm()
    return prob, normalized(rest)


def forced_fidelity(p: DofAmplitudes, f: DofAmplitudes, s: DofAmplitudes, label: HyperBellLabel) -> float:
    _, bob = forced_outcome(p, f, s, label)
    corrected = correction_for(label).apply(bob, PhotonId.B)
    return fidelity(corrected, make_input(p, f, s, photon=PhotonId.B))


def random_input(rng: np.random.Generator) -> tuple[DofAmplitudes, DofAmplitudes, DofAmplitudes]:
    return tuple(DofAmplitudes.random(rng) for _ in DOFS)
