"""Dense state vectors over a register of photonic DOF qubits.

Every photon carries up to three binary degrees of freedom: polarization
(P: H=0, V=1), the first longitudinal momentum (F: E=0, I=1) and the second
longitudinal momentum (S: r=0, l=1).  A :class:`PureState` stores its
amplitudes as a flat vector of length ``2**n``; reshaped to ``(2,) * n`` the
tensor axis ``k`` is the qubit at register position ``k`` (position 0 is the
most significant bit of the flat index).
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

ATOL = 1e-12

SQRT1_2 = 1.0 / np.sqrt(2.0)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


class PhotonId(enum.Enum):
    A = "A"
    B = "B"
    X = "X"


class Dof(enum.Enum):
    P = "P"
    F = "F"
    S = "S"


DOFS = (Dof.P, Dof.F, Dof.S)

# symbols for bit values 0/1 per DOF
BASIS_SYMBOLS = {Dof.P: ("H", "V"), Dof.F: ("E", "I"), Dof.S: ("r", "l")}


class QubitAddress(NamedTuple):
    photon: PhotonId
    dof: Dof

    def __str__(self) -> str:
        return f"{self.photon.value}.{self.dof.value}"


def photon_register(photon: PhotonId) -> tuple[QubitAddress, ...]:
    return tuple(QubitAddress(photon, d) for d in DOFS)


class Parity(enum.Enum):
    PHI = "phi"
    PSI = "psi"


class Phase(enum.Enum):
    PLUS = "+"
    MINUS = "-"


class BellLabel(NamedTuple):
    parity: Parity
    phase: Phase

    def __str__(self) -> str:
        return f"{self.parity.value}{self.phase.value}"

    @classmethod
    def parse(cls, text: str) -> "BellLabel":
        text = text.strip()
        for label in BELL_LABELS:
            if str(label) == text:
                return label
        raise ValueError(f"not a Bell label: {text!r}")


BELL_LABELS = tuple(
    BellLabel(par, ph) for par in (Parity.PHI, Parity.PSI) for ph in (Phase.PLUS, Phase.MINUS)
)
PHI_PLUS, PHI_MINUS, PSI_PLUS, PSI_MINUS = BELL_LABELS


class HyperBellLabel(NamedTuple):
    p: BellLabel
    f: BellLabel
    s: BellLabel

    def __str__(self) -> str:
        return f"{self.p},{self.f},{self.s}"

    @classmethod
    def parse(cls, text: str) -> "HyperBellLabel":
        """Parse ``"phi+,psi-,phi+"`` (P, F, S order)."""
        parts = text.split(",")
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated Bell labels, got {text!r}")
        return cls(*(BellLabel.parse(part) for part in parts))

    def by_dof(self, dof: Dof) -> BellLabel:
        return {Dof.P: self.p, Dof.F: self.f, Dof.S: self.s}[dof]


def all_hyper_bell_labels() -> list[HyperBellLabel]:
    """The 64 labels in canonical order (P slowest, S fastest)."""
    return [HyperBellLabel(*t) for t in itertools.product(BELL_LABELS, repeat=3)]


@dataclass(frozen=True, eq=False)
class PureState:
    register: tuple[QubitAddress, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        register = tuple(self.register)
        if len(set(register)) != len(register):
            raise ValueError(f"duplicate qubit addresses in register {register}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(register):
            raise ValueError(
                f"{amps.size} amplitudes do not fit a register of {len(register)} qubits"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return len(self.register)

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def position(self, addr: QubitAddress) -> int:
        try:
            return self.register.index(addr)
        except ValueError:
            raise ValueError(f"qubit {addr} not in register") from None

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def photons(self) -> set[PhotonId]:
        return {addr.photon for addr in self.register}

    def with_amplitudes(self, amplitudes: np.ndarray) -> "PureState":
        return PureState(self.register, amplitudes)

    def __repr__(self) -> str:
        return f"PureState(register=[{', '.join(map(str, self.register))}], nnz={np.count_nonzero(np.abs(self.amplitudes) > ATOL)})"

    def ket_string(self, tol: float = 1e-9) -> str:
        """Human-readable expansion such as ``0.707|HH> + 0.707|VV>``."""
        terms = []
        for index, amp in enumerate(self.amplitudes):
            if abs(amp) <= tol:
                continue
            bits = index_to_bits(index, self.n_qubits)
            ket = "".join(BASIS_SYMBOLS[a.dof][b] for a, b in zip(self.register, bits))
            terms.append(f"({amp:.4g})|{ket}>")
        return " + ".join(terms) or "0"


def index_to_bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def bits_to_index(bits: Sequence[int]) -> int:
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    return index


def basis_state(register: Sequence[QubitAddress], bits: Sequence[int]) -> PureState:
    register = tuple(register)
    if len(bits) != len(register):
        raise ValueError("one bit per register qubit is required")
    amps = np.zeros(2 ** len(register), dtype=complex)
    amps[bits_to_index(bits)] = 1.0
    return PureState(register, amps)


def _check_pair(pair: Sequence[PhotonId]) -> tuple[PhotonId, PhotonId]:
    if len(pair) != 2:
        raise ValueError("a pair needs exactly two photon ids")
    first, second = pair
    if first == second:
        raise ValueError(f"pair photons must be distinct, got {first} twice")
    return first, second


def bell_state(label: BellLabel, dof: Dof, pair: Sequence[PhotonId]) -> PureState:
    """Two-qubit Bell state; the phase sign sits on the second branch."""
    first, second = _check_pair(pair)
    amps = np.zeros(4, dtype=complex)
    sign = 1.0 if label.phase is Phase.PLUS else -1.0
    if label.parity is Parity.PHI:
        amps[0b00], amps[0b11] = SQRT1_2, sign * SQRT1_2
    else:
        amps[0b01], amps[0b10] = SQRT1_2, sign * SQRT1_2
    return PureState((QubitAddress(first, dof), QubitAddress(second, dof)), amps)


def tensor(a: PureState, b: PureState) -> PureState:
    overlap = set(a.register) & set(b.register)
    if overlap:
        raise ValueError(f"registers overlap on {sorted(map(str, overlap))}")
    return PureState(a.register + b.register, np.kron(a.amplitudes, b.amplitudes))


def tensor_all(states: Iterable[PureState]) -> PureState:
    states = list(states)
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def reorder(state: PureState, register: Sequence[QubitAddress]) -> PureState:
    """Same physical state, amplitudes permuted to follow ``register``."""
    register = tuple(register)
    if sorted(map(str, register)) != sorted(map(str, state.register)):
        raise ValueError("target register must be a permutation of the state's register")
    perm = [state.position(addr) for addr in register]
    return PureState(register, np.transpose(state.tensor_view(), perm).reshape(-1))


def canonical_pair_register(pair: Sequence[PhotonId]) -> tuple[QubitAddress, ...]:
    first, second = _check_pair(pair)
    return photon_register(first) + photon_register(second)


def hyper_bell_state(label: HyperBellLabel, pair: Sequence[PhotonId]) -> PureState:
    """Product of one Bell pair per DOF, in canonical (photon, then P, F, S) order."""
    return _hyper_bell_cached(label, *_check_pair(pair))


@functools.lru_cache(maxsize=None)
def _hyper_bell_cached(label: HyperBellLabel, first: PhotonId, second: PhotonId) -> PureState:
    product = tensor_all(bell_state(label.by_dof(d), d, (first, second)) for d in DOFS)
    return reorder(product, canonical_pair_register((first, second)))


def inner(a: PureState, b: PureState) -> complex:
    """<a|b>, after aligning b to a's register order."""
    if a.register != b.register:
        b = reorder(b, a.register)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _is_unitary(u: np.ndarray) -> bool:
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()) <= ATOL


def apply_unitary(state: PureState, addrs: Sequence[QubitAddress], u: np.ndarray) -> PureState:
    """Apply a ``2**k x 2**k`` unitary to the listed qubits (first = most significant)."""
    u = np.asarray(u, dtype=complex)
    k = len(addrs)
    if u.shape != (2**k, 2**k):
        raise ValueError(f"matrix shape {u.shape} does not act on {k} qubit(s)")
    if not _is_unitary(u):
        raise ValueError("matrix is not unitary")
    positions = [state.position(a) for a in addrs]
    if len(set(positions)) != k:
        raise ValueError("target qubits must be distinct")
    psi = state.tensor_view()
    gate = u.reshape((2,) * (2 * k))
    out = np.tensordot(gate, psi, axes=(list(range(k, 2 * k)), positions))
    out = np.moveaxis(out, list(range(k)), positions)
    return state.with_amplitudes(out.reshape(-1))


def apply_one_qubit(state: PureState, addr: QubitAddress, u: np.ndarray) -> PureState:
    return apply_unitary(state, [addr], u)


def normalize_global_phase(amplitudes: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Rotate so the first amplitude with magnitude above ``tol`` is positive real."""
    amps = np.asarray(amplitudes, dtype=complex)
    nz = np.flatnonzero(np.abs(amps) > tol)
    if nz.size == 0:
        return amps.copy()
    lead = amps[nz[0]]
    return amps * (abs(lead) / lead)


def equal_up_to_global_phase(a: PureState, b: PureState, atol: float = ATOL) -> bool:
    if a.register != b.register:
        b = reorder(b, a.register)
    return np.allclose(
        normalize_global_phase(a.amplitudes), normalize_global_phase(b.amplitudes), atol=atol, rtol=0
    )


def decompose_hyper_bell(state: PureState, pair: Sequence[PhotonId]) -> dict[HyperBellLabel, complex]:
    """Amplitudes of ``state`` in the 64-element hyper-Bell basis of ``pair``."""
    register = canonical_pair_register(pair)
    if set(state.register) != set(register) or state.n_qubits != 6:
        raise ValueError("state register must be exactly the six qubits of the pair")
    aligned = reorder(state, register)
    return {
        label: complex(np.vdot(hyper_bell_state(label, pair).amplitudes, aligned.amplitudes))
        for label in all_hyper_bell_labels()
    }


def compose_hyper_bell(coefficients: dict[HyperBellLabel, complex], pair: Sequence[PhotonId]) -> PureState:
    """Inverse of :func:`decompose_hyper_bell`."""
    register = canonical_pair_register(pair)
    amps = np.zeros(64, dtype=complex)
    for label, c in coefficients.items():
        amps += c * hyper_bell_state(label, pair).amplitudes
    return PureState(register, amps)


def project_onto(state: PureState, target: PureState) -> PureState:
    """Contract ``state`` with <target| on target's qubits; returns the unnormalized remainder.

    The remainder keeps the rest of the register in its original order.
    """
    positions = [state.position(a) for a in target.register]
    rest = tuple(a for a in state.register if a not in target.register)
    psi = state.tensor_view()
    bra = target.tensor_view().conj()
    out = np.tensordot(bra, psi, axes=(list(range(target.n_qubits)), positions))
    return PureState(rest, out.reshape(-1))


def normalized(state: PureState) -> PureState:
    n = state.norm()
    if n <= ATOL:
        raise ValueError("cannot normalize a zero vector")
    return state.with_amplitudes(state.amplitudes / np.sqrt(n))


def reduced_density_matrix(state: PureState, keep: Sequence[QubitAddress]) -> np.ndarray:
    keep_pos = [state.position(a) for a in keep]
    rest = [k for k in range(state.n_qubits) if k not in keep_pos]
    psi = np.transpose(state.tensor_view(), keep_pos + rest).reshape(2 ** len(keep_pos), -1)
    return psi @ psi.conj().T


def fidelity(state: PureState, target: PureState) -> float:
    """<target| rho |target> where rho is ``state`` reduced to target's qubits."""
    rho = reduced_density_matrix(state, target.register)
    t = target.amplitudes
    return float(np.real(np.vdot(t, rho @ t)))


# --- detection -------------------------------------------------------------


class Click(NamedTuple):
    """Single-photon detector result: polarization in the +/- basis, F and S modes."""

    pol: str
    f: str
    s: str

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "Click":
        return cls("+-"[bits[0]], BASIS_SYMBOLS[Dof.F][bits[1]], BASIS_SYMBOLS[Dof.S][bits[2]])

    def as_dict(self) -> dict[str, str]:
        return {"pol": self.pol, "f": self.f, "s": self.s}


def _detection_frame(state: PureState, photons: Sequence[PhotonId]) -> PureState:
    # H maps |+>,|-> to |0>,|1>, so the P qubit is read in the computational basis afterwards
    for photon in photons:
        for addr in photon_register(photon):
            state.position(addr)
        state = apply_one_qubit(state, QubitAddress(photon, Dof.P), HADAMARD)
    return state


def outcome_support(
    state: PureState, photons: Sequence[PhotonId], tol: float = ATOL
) -> list[tuple[tuple[Click, ...], float]]:
    """Every joint detection outcome of ``photons`` with nonzero Born probability."""
    photons = list(photons)
    if len(set(photons)) != len(photons):
        raise ValueError("photons must be distinct")
    frame = _detection_frame(state, photons)
    addrs = [a for ph in photons for a in photon_register(ph)]
    rho_diag = np.abs(
        np.transpose(
            frame.tensor_view(),
            [frame.position(a) for a in addrs]
            + [k for k in range(frame.n_qubits) if frame.register[k] not in addrs],
        ).reshape(2 ** len(addrs), -1)
    ) ** 2
    probs = rho_diag.sum(axis=1) / frame.norm()
    out = []
    for index, p in enumerate(probs):
        if p > tol:
            bits = index_to_bits(index, len(addrs))
            clicks = tuple(Click.from_bits(bits[3 * i : 3 * i + 3]) for i in range(len(photons)))
            out.append((clicks, float(p)))
    return out


def _click_bits(click: Click) -> tuple[int, int, int]:
    return ("+-".index(click.pol), BASIS_SYMBOLS[Dof.F].index(click.f), BASIS_SYMBOLS[Dof.S].index(click.s))


def project_click(state: PureState, photon: PhotonId, click: Click) -> tuple[float, PureState]:
    """Probability of ``click`` and the renormalized post-measurement state."""
    frame = _detection_frame(state, [photon])
    bits = _click_bits(click)
    amps = frame.tensor_view().copy()
    for addr, bit in zip(photon_register(photon), bits):
        index = [slice(None)] * frame.n_qubits
        index[frame.position(addr)] = 1 - bit
        amps[tuple(index)] = 0.0
    prob = float(np.vdot(amps, amps).real) / frame.norm()
    if prob <= ATOL:
        raise ValueError(f"outcome {click} has zero probability")
    post = frame.with_amplitudes(amps.reshape(-1) / np.sqrt(prob * frame.norm()))
    post = apply_one_qubit(post, QubitAddress(photon, Dof.P), HADAMARD)
    return prob, post


def measure_photon(
    state: PureState, photon: PhotonId, rng: np.random.Generator
) -> tuple[Click, float, PureState]:
    """Detect one photon: polarization behind a 45-degree PBS, F and S by which-mode."""
    support = outcome_support(state, [photon])
    probs = np.array([p for _, p in support])
    choice = rng.choice(len(support), p=probs / probs.sum())
    (click,), _ = support[choice]
    prob, post = project_click(state, photon, click)
    return click, prob, post
