"""Cross-Kerr probes: branch-wise phase tags and X-quadrature readout.

A coherent probe that has interacted with the signal photons is not simulated
as a field.  Each signal basis branch instead carries an integer tag per probe,
the net phase it imprinted in units of theta.  Homodyne detection of the x
quadrature (``x = a + a^dagger``, vacuum variance 1) sees a Gaussian centred on
``2 alpha cos(tag * theta)``, which depends only on ``|tag|``: the sign of the
shift is invisible and the +theta/-theta branches stay coherent.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import erfc

from .hilbert import ATOL, Dof, PhotonId, PureState, QubitAddress

MAX_TAG = 2


class ModelViolation(RuntimeError):
    """A probe carries a phase the two-level readout cannot represent."""


class ProbeId(enum.IntEnum):
    P1 = 0
    P2 = 1
    P3 = 2


class ProbeOutcome(enum.Enum):
    ZERO = "0"
    THETA = "theta"


@dataclass(frozen=True)
class KerrParams:
    theta: float
    alpha: float

    def __post_init__(self) -> None:
        # theta = 0 is admitted as the degenerate indistinguishable limit
        if not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")

    @property
    def threshold(self) -> float:
        return self.alpha * (1.0 + math.cos(self.theta))

    def mean_x(self, shifted: bool) -> float:
        return 2.0 * self.alpha * (math.cos(self.theta) if shifted else 1.0)


@dataclass(frozen=True)
class HomodyneModel:
    mode: str = "ideal"
    params: KerrParams | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("ideal", "gaussian"):
            raise ValueError(f"unknown homodyne mode {self.mode!r}")
        if self.mode == "gaussian":
            if self.params is None:
                raise ValueError("gaussian mode needs KerrParams")
            if self.params.alpha <= 0:
                raise ValueError("gaussian mode needs alpha > 0")

    @classmethod
    def ideal(cls) -> "HomodyneModel":
        return cls("ideal")

    @classmethod
    def gaussian(cls, theta: float, alpha: float) -> "HomodyneModel":
        return cls("gaussian", KerrParams(theta, alpha))

    @property
    def is_ideal(self) -> bool:
        return self.mode == "ideal"


@dataclass(frozen=True)
class Coupling:
    probe: ProbeId
    photon: PhotonId
    dof: Dof
    mode_value: int
    sign: int

    def __post_init__(self) -> None:
        if self.mode_value not in (0, 1):
            raise ValueError("mode_value must be 0 or 1")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def address(self) -> QubitAddress:
        return QubitAddress(self.photon, self.dof)


@dataclass(frozen=True, eq=False)
class TaggedState:
    base: PureState
    tags: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        tags = np.array(self.tags, dtype=np.int64)
        if tags.shape != (self.base.amplitudes.size, len(ProbeId)):
            raise ValueError(f"tags shape {tags.shape} does not match the state")
        if np.any(np.abs(tags) > MAX_TAG):
            raise ModelViolation(f"probe tags must stay within +/-{MAX_TAG}")
        tags.setflags(write=False)
        object.__setattr__(self, "tags", tags)


def attach_probes(state: PureState) -> TaggedState:
    return TaggedState(state, np.zeros((state.amplitudes.size, len(ProbeId)), dtype=np.int64))


def strip_probes(tagged: TaggedState) -> PureState:
    if np.any(tagged.tags != 0):
        raise ValueError("probes still carry phase information")
    return tagged.base


def _bit_column(state: PureState, addr: QubitAddress) -> np.ndarray:
    n = state.n_qubits
    shift = n - 1 - state.position(addr)
    return (np.arange(2**n) >> shift) & 1


def cross_kerr(tagged: TaggedState, c: Coupling) -> TaggedState:
    """Record one signal-mode/probe interaction; signal amplitudes are untouched."""
    hit = _bit_column(tagged.base, c.address) == c.mode_value
    tags = tagged.tags.copy()
    tags[hit, c.probe] += c.sign
    return TaggedState(tagged.base, tags)


def apply_couplings(tagged: TaggedState, couplings: Sequence[Coupling]) -> TaggedState:
    for c in couplings:
        tagged = cross_kerr(tagged, c)
    return tagged


def standard_couplings(pair: Sequence[PhotonId] = (PhotonId.A, PhotonId.B)) -> list[Coupling]:
    """I (resp. l) mode of the first photon with +1, of the second with -1.

    Branches where both or neither photon sit in the coupled mode cancel to a
    net zero shift; opposite-valued branches pick up +-theta.
    """
    first, second = pair
    out = []
    for probe, dof in ((ProbeId.P1, Dof.F), (ProbeId.P2, Dof.S), (ProbeId.P3, Dof.F)):
        out.append(Coupling(probe, first, dof, 1, +1))
        out.append(Coupling(probe, second, dof, 1, -1))
    return out


def couplings_for(probe: ProbeId, pair: Sequence[PhotonId] = (PhotonId.A, PhotonId.B)) -> list[Coupling]:
    return [c for c in standard_couplings(pair) if c.probe is probe]


def error_probability(params: KerrParams) -> float:
    """Chance that a midpoint-threshold x readout confuses a 0 and a theta shift."""
    return 0.5 * float(erfc(params.alpha * (1.0 - math.cos(params.theta)) / math.sqrt(2.0)))


def classify_x(x: np.ndarray | float, params: KerrParams) -> np.ndarray:
    """True where the quadrature value is read as a theta shift."""
    return np.asarray(x) < params.threshold


def sample_x(shifted: np.ndarray, params: KerrParams, rng: np.random.Generator) -> np.ndarray:
    shifted = np.asarray(shifted, dtype=bool)
    means = np.where(shifted, params.mean_x(True), params.mean_x(False))
    return rng.normal(means, 1.0)


def misclassification_rate(params: KerrParams, trials: int, rng: np.random.Generator) -> float:
    """Empirical readout error with the two shift classes drawn equally often."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    shifted = np.arange(trials) % 2 == 1
    read = classify_x(sample_x(shifted, params, rng), params)
    return float(np.mean(read != shifted))


def _gaussian_pdf(x: float, mean: float) -> float:
    return math.exp(-0.5 * (x - mean) ** 2) / math.sqrt(2 * math.pi)


def homodyne_x(
    tagged: TaggedState,
    probe: ProbeId,
    model: HomodyneModel,
    rng: np.random.Generator,
) -> tuple[ProbeOutcome, TaggedState]:
    """Read one probe's x quadrature and clear its tags.

    Ideal mode projects onto the Born-sampled |tag| class.  Gaussian mode draws
    x from the branch-weighted mixture and reweights every branch by the
    square root of its likelihood at that x; the reported outcome is the
    thresholded x and may be wrong.
    """
    col = tagged.tags[:, probe]
    mags = np.abs(col)
    if np.any(mags >= 2):
        raise ModelViolation(f"probe {probe.name} carries a 2*theta shift")
    amps = tagged.base.amplitudes
    weights = np.abs(amps) ** 2
    total = weights.sum()
    p_shift = float(weights[mags == 1].sum() / total)

    if model.is_ideal:
        shifted = bool(rng.random() < p_shift)
        keep = (mags == 1) if shifted else (mags == 0)
        new_amps = np.where(keep, amps, 0.0)
        outcome = ProbeOutcome.THETA if shifted else ProbeOutcome.ZERO
    else:
        params = model.params
        true_shift = bool(rng.random() < p_shift)
        x = float(sample_x(np.array([true_shift]), params, rng)[0])
        outcome = ProbeOutcome.THETA if bool(classify_x(x, params)) else ProbeOutcome.ZERO
        lik = np.array([_gaussian_pdf(x, params.mean_x(False)), _gaussian_pdf(x, params.mean_x(True))])
        new_amps = amps * np.sqrt(lik[mags])

    norm = np.sqrt(np.vdot(new_amps, new_amps).real)
    if norm <= ATOL:
        raise ModelViolation("homodyne readout left no amplitude")
    tags = tagged.tags.copy()
    tags[:, probe] = 0
    return outcome, TaggedState(tagged.base.with_amplitudes(new_amps / norm), tags)
