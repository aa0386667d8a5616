"""Single-photon two-qubit state space.

A photon carries a spatial qubit (path a or b) and a polarization qubit
(H or V).  States are 4-vectors over the fixed ordering (aH, aV, bH, bV).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-9
SQRT_HALF = 1.0 / np.sqrt(2.0)


class SpatialMode(enum.Enum):
    A = 0
    B = 1


class Polarization(enum.Enum):
    H = 0
    V = 1


class BellLabel(enum.Enum):
    PsiPlus = 0
    PsiMinus = 1
    PhiPlus = 2
    PhiMinus = 3


class BPrimeLabel(enum.Enum):
    SPlus45 = 0
    APlus45 = 1
    SMinus45 = 2
    AMinus45 = 3


class ProductLabel(enum.Enum):
    """Product basis in the receiver's B ordering: aV, aH, bV, bH."""

    aV = 0
    aH = 1
    bV = 2
    bH = 3

    @property
    def mode(self) -> SpatialMode:
        return SpatialMode.A if self.name[0] == "a" else SpatialMode.B

    @property
    def pol(self) -> Polarization:
        return Polarization[self.name[1]]


class AlphabetLabel(enum.Enum):
    """Superposition product alphabet |a,+45>, |b,-45>, |S,V>, |A,H>."""

    aPlus45 = 0
    bMinus45 = 1
    SV = 2
    AH = 3


def index_of(mode: SpatialMode, pol: Polarization) -> int:
    return 2 * mode.value + pol.value


@dataclass(frozen=True, eq=False)
class PhotonState:
    """Immutable pure state; ``amp`` is a read-only complex array of length 4."""

    amp: np.ndarray

    def __post_init__(self):
        a = np.array(self.amp, dtype=complex).reshape(4)
        a.setflags(write=False)
        object.__setattr__(self, "amp", a)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amp) ** 2)))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm - 1.0) <= tol

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amp) ** 2

    def __repr__(self) -> str:
        body = ", ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in self.amp)
        return f"PhotonState([{body}])"


def _spatial(sign: int) -> np.ndarray:
    return SQRT_HALF * np.array([1.0, sign])


def _polar(sign: int) -> np.ndarray:
    return SQRT_HALF * np.array([1.0, sign])


def product_state(spatial: np.ndarray, pol: np.ndarray) -> PhotonState:
    """Tensor product of a spatial 2-vector (a, b) and a polarization 2-vector (H, V)."""
    return PhotonState(np.kron(np.asarray(spatial, complex), np.asarray(pol, complex)))


def make_basis_state(mode: SpatialMode, pol: Polarization) -> PhotonState:
    amp = np.zeros(4, dtype=complex)
    amp[index_of(mode, pol)] = 1.0
    return PhotonState(amp)


def product_basis_state(label: ProductLabel) -> PhotonState:
    return make_basis_state(label.mode, label.pol)


_BELL = {
    BellLabel.PsiPlus: (0, 3, +1),
    BellLabel.PsiMinus: (0, 3, -1),
    BellLabel.PhiPlus: (1, 2, +1),
    BellLabel.PhiMinus: (1, 2, -1),
}


def bell_state(label: BellLabel) -> PhotonState:
    """Psi(+-) = (|a,H> +- |b,V>)/sqrt2, Phi(+-) = (|a,V> +- |b,H>)/sqrt2."""
    first, second, sign = _BELL[BellLabel(label)]
    amp = np.zeros(4, dtype=complex)
    amp[first] = SQRT_HALF
    amp[second] = sign * SQRT_HALF
    return PhotonState(amp)


_BPRIME = {
    BPrimeLabel.SPlus45: (+1, +1),
    BPrimeLabel.APlus45: (-1, +1),
    BPrimeLabel.SMinus45: (+1, -1),
    BPrimeLabel.AMinus45: (-1, -1),
}


def bprime_state(label: BPrimeLabel) -> PhotonState:
    """|S/A> (x) |+-45> with S, A = (|a> +- |b>)/sqrt2 and +-45 = (|H> +- |V>)/sqrt2."""
    spatial_sign, pol_sign = _BPRIME[BPrimeLabel(label)]
    return product_state(_spatial(spatial_sign), _polar(pol_sign))


_H = np.array([1.0, 0.0])
_V = np.array([0.0, 1.0])
_a = np.array([1.0, 0.0])
_b = np.array([0.0, 1.0])

_ALPHABET = {
    AlphabetLabel.aPlus45: (_a, _polar(+1)),
    AlphabetLabel.bMinus45: (_b, _polar(-1)),
    AlphabetLabel.SV: (_spatial(+1), _V),
    AlphabetLabel.AH: (_spatial(-1), _H),
}


def sender_alphabet_state(label: AlphabetLabel) -> PhotonState:
    spatial, pol = _ALPHABET[AlphabetLabel(label)]
    return product_state(spatial, pol)


def named_state(label) -> PhotonState:
    """Dispatch on any of the four label enums."""
    if isinstance(label, BellLabel):
        return bell_state(label)
    if isinstance(label, BPrimeLabel):
        return bprime_state(label)
    if isinstance(label, AlphabetLabel):
        return sender_alphabet_state(label)
    if isinstance(label, ProductLabel):
        return product_basis_state(label)
    raise TypeError(f"not a state label: {label!r}")


ALL_LABELS = (
    tuple(BellLabel) + tuple(BPrimeLabel) + tuple(AlphabetLabel) + tuple(ProductLabel)
)


def inner_product(x: PhotonState, y: PhotonState) -> complex:
    """<x|y>, conjugate-linear in the first argument."""
    return complex(np.vdot(x.amp, y.amp))


def fidelity(x: PhotonState, y: PhotonState) -> float:
    f = abs(inner_product(x, y)) ** 2
    return float(min(max(f, 0.0), 1.0))


def nearest_named_state(s: PhotonState, tol: float = NORM_TOL):
    """Return the first named label whose state matches ``s`` up to global phase, else None."""
    for label in ALL_LABELS:
        if fidelity(s, named_state(label)) > 1.0 - tol:
            return label
    return None


def gram_matrix(states) -> np.ndarray:
    m = np.array([s.amp for s in states])
    return m.conj() @ m.T
