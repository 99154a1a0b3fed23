"""The complete hyper-Bell analyzer: three Kerr probes, linear optics, detectors, decoder."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import elements, kerr
from .hilbert import (
    ATOL,
    Click,
    Dof,
    HyperBellLabel,
    PhotonId,
    Parity,
    Phase,
    BellLabel,
    PureState,
    all_hyper_bell_labels,
    hyper_bell_state,
    measure_photon,
    outcome_support,
    photon_register,
)
from .kerr import HomodyneModel, ProbeId, ProbeOutcome

DEFAULT_PAIR = (PhotonId.A, PhotonId.B)


class ProbeSignature(NamedTuple):
    s1: ProbeOutcome
    s2: ProbeOutcome
    s3: ProbeOutcome

    def as_list(self) -> list[str]:
        return [o.value for o in self]

    @property
    def bits(self) -> tuple[int, int, int]:
        return tuple(int(o is ProbeOutcome.THETA) for o in self)


class DetectionSignature(NamedTuple):
    first: Click
    second: Click

    def parity_classes(self) -> tuple[bool, bool, bool]:
        """(pol, f, s) equality between the two photons' clicks."""
        return (
            self.first.pol == self.second.pol,
            self.first.f == self.second.f,
            self.first.s == self.second.s,
        )

    def as_dict(self) -> dict:
        return {"first": self.first.as_dict(), "second": self.second.as_dict()}


@dataclass(frozen=True)
class AnalysisRecord:
    input_label: HyperBellLabel | None
    probe_sig: ProbeSignature
    detection: DetectionSignature
    decoded: HyperBellLabel

    @property
    def correct(self) -> bool | None:
        if self.input_label is None:
            return None
        return self.decoded == self.input_label

    def to_json(self) -> dict:
        return {
            "input": None if self.input_label is None else str(self.input_label),
            "probe_sig": self.probe_sig.as_list(),
            "detection": self.detection.as_dict(),
            "decoded": str(self.decoded),
            "correct": self.correct,
        }


def _bell(psi: bool, minus: bool) -> BellLabel:
    return BellLabel(Parity.PSI if psi else Parity.PHI, Phase.MINUS if minus else Phase.PLUS)


def decode(probe_sig: ProbeSignature, detection: DetectionSignature) -> HyperBellLabel:
    """Recover the input label from the probe readouts and the detector parities.

    The PBS0 pair acts as a bilateral controlled flip (P controls F), so after
    it the F parity carries P parity XOR post-beam-splitter F parity (= s3),
    and the polarization phase carries P phase XOR post-beam-splitter F phase
    (= s1).  The S beam splitters turn the S phase into the S mode parity.
    """
    s1, s2, s3 = (bool(b) for b in probe_sig.bits)
    pol_equal, f_equal, s_equal = detection.parity_classes()
    return HyperBellLabel(
        p=_bell(psi=(not f_equal) ^ s3, minus=(not pol_equal) ^ s1),
        f=_bell(psi=s1, minus=s3),
        s=_bell(psi=s2, minus=not s_equal),
    )


def _check_state(state: PureState, pair: Sequence[PhotonId]) -> None:
    first, second = pair
    if first == second:
        raise ValueError("pair photons must be distinct")
    for photon in pair:
        for addr in photon_register(photon):
            state.position(addr)
    if abs(state.norm() - 1.0) > 1e-10:
        raise ValueError("input state must be normalized")


def probe_stage(
    state: PureState,
    pair: Sequence[PhotonId],
    model: HomodyneModel,
    rng: np.random.Generator,
) -> tuple[ProbeSignature, PureState]:
    """P1/P2 readout, F beam splitters, P3 readout."""
    tagged = kerr.attach_probes(state)
    tagged = kerr.apply_couplings(tagged, kerr.couplings_for(ProbeId.P1, pair))
    tagged = kerr.apply_couplings(tagged, kerr.couplings_for(ProbeId.P2, pair))
    s1, tagged = kerr.homodyne_x(tagged, ProbeId.P1, model, rng)
    s2, tagged = kerr.homodyne_x(tagged, ProbeId.P2, model, rng)
    signal = kerr.strip_probes(tagged)
    for photon in pair:
        signal = elements.bs_hadamard(signal, photon, Dof.F)
    tagged = kerr.apply_couplings(kerr.attach_probes(signal), kerr.couplings_for(ProbeId.P3, pair))
    s3, tagged = kerr.homodyne_x(tagged, ProbeId.P3, model, rng)
    return ProbeSignature(s1, s2, s3), kerr.strip_probes(tagged)


def analyze(
    state: PureState,
    pair: Sequence[PhotonId] = DEFAULT_PAIR,
    model: HomodyneModel | None = None,
    rng: np.random.Generator | None = None,
    input_label: HyperBellLabel | None = None,
) -> tuple[AnalysisRecord, PureState]:
    """Run the full analyzer on ``pair`` and return the record and the post-detection state."""
    model = model or HomodyneModel.ideal()
    rng = rng if rng is not None else np.random.default_rng()
    pair = tuple(pair)
    _check_state(state, pair)
    sig, signal = probe_stage(state, pair, model, rng)
    signal = elements.stage_c(signal, pair)
    clicks = []
    for photon in pair:
        click, _, signal = measure_photon(signal, photon, rng)
        clicks.append(click)
    detection = DetectionSignature(*clicks)
    record = AnalysisRecord(input_label, sig, detection, decode(sig, detection))
    return record, signal


def analyze_label(
    label: HyperBellLabel,
    model: HomodyneModel | None = None,
    rng: np.random.Generator | None = None,
    pair: Sequence[PhotonId] = DEFAULT_PAIR,
) -> AnalysisRecord:
    record, _ = analyze(hyper_bell_state(label, pair), pair, model, rng, input_label=label)
    return record


def label_streams(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def verify_all(model: HomodyneModel | None = None, seed: int = 0) -> list[AnalysisRecord]:
    """One record per hyper-Bell label, each with its own stream spawned from ``seed``."""
    labels = all_hyper_bell_labels()
    return [analyze_label(lab, model, rng) for lab, rng in zip(labels, label_streams(seed, len(labels)))]


def expected_probe_signature(label: HyperBellLabel) -> ProbeSignature:
    """Shift pattern of the printed probe table: F parity, S parity, F phase."""
    t, z = ProbeOutcome.THETA, ProbeOutcome.ZERO
    return ProbeSignature(
        t if label.f.parity is Parity.PSI else z,
        t if label.s.parity is Parity.PSI else z,
        t if label.f.phase is Phase.MINUS else z,
    )


_TABLE2_GROUPS = {
    ("+", "+", "+"): 1,
    ("+", "-", "+"): 2,
    ("-", "+", "+"): 3,
    ("-", "-", "+"): 4,
    ("+", "+", "-"): 5,
    ("+", "-", "-"): 6,
    ("-", "+", "-"): 7,
    ("-", "-", "-"): 8,
}


def table2_group(label: HyperBellLabel) -> int:
    """Group 1..8 keyed by the (P, F, S) phase signs."""
    return _TABLE2_GROUPS[(label.p.phase.value, label.f.phase.value, label.s.phase.value)]


def parity_class_support(label: HyperBellLabel, pair: Sequence[PhotonId] = DEFAULT_PAIR) -> set[tuple[bool, bool, bool]]:
    """Distinct detector parity triples over every nonzero-probability outcome (ideal probes)."""
    state = hyper_bell_state(label, pair)
    sig, signal = probe_stage(state, pair, HomodyneModel.ideal(), np.random.default_rng(0))
    signal = elements.stage_c(signal, pair)
    return {
        DetectionSignature(*clicks).parity_classes()
        for clicks, p in outcome_support(signal, list(pair))
        if p > ATOL
    }
