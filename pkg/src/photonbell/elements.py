"""Linear-optical elements as 4x4 unitaries on the (aH, aV, bH, bV) space."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .states import PhotonState, SpatialMode

UNITARY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class OpticalElement:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex).reshape(4, 4)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return np.allclose(self.matrix.conj().T @ self.matrix, np.eye(4), rtol=0, atol=tol)

    def __matmul__(self, other: "OpticalElement") -> "OpticalElement":
        # self after other
        return OpticalElement(self.matrix @ other.matrix, f"{self.label}*{other.label}")


def identity() -> OpticalElement:
    return OpticalElement(np.eye(4), "I")


def _on_mode(mode: SpatialMode, block: np.ndarray) -> np.ndarray:
    m = np.eye(4, dtype=complex)
    i = 2 * mode.value
    m[i : i + 2, i : i + 2] = block
    return m


def hwp_jones(theta_deg: float) -> np.ndarray:
    """Half-wave plate Jones matrix [[cos2t, sin2t], [sin2t, -cos2t]]."""
    t = np.deg2rad(2.0 * theta_deg)
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, s], [s, -c]])


def rotation_jones(alpha_deg: float) -> np.ndarray:
    """Passive polarization rotation by ``alpha_deg`` (not a wave plate)."""
    t = np.deg2rad(alpha_deg)
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s], [s, c]])


def hwp(mode: SpatialMode, theta: float) -> OpticalElement:
    """Half-wave plate at ``theta`` degrees in one path; identity on the other."""
    mode = SpatialMode(mode)
    return OpticalElement(_on_mode(mode, hwp_jones(theta)), f"HWP[{mode.name}]@{theta:g}deg")


def rotator(mode: SpatialMode, alpha: float) -> OpticalElement:
    mode = SpatialMode(mode)
    return OpticalElement(_on_mode(mode, rotation_jones(alpha)), f"R[{mode.name}]@{alpha:g}deg")


def phase_shifter(mode: SpatialMode, phi: float) -> OpticalElement:
    """Multiply both polarization amplitudes of one path by exp(i*phi)."""
    mode = SpatialMode(mode)
    return OpticalElement(_on_mode(mode, np.exp(1j * phi) * np.eye(2)), f"PS[{mode.name}]@{phi:g}rad")


_PBS = np.zeros((4, 4))
# H keeps its path, V swaps path; no reflection phase.
for _src, _dst in ((0, 0), (2, 2), (1, 3), (3, 1)):
    _PBS[_dst, _src] = 1.0


def pbs() -> OpticalElement:
    return OpticalElement(_PBS, "PBS")


def compose(elements: Sequence[OpticalElement]) -> OpticalElement:
    """Single element equivalent to applying ``elements`` in list order (first listed acts first)."""
    elements = list(elements)
    if not elements:
        raise ValueError("compose needs at least one element")
    m = np.eye(4, dtype=complex)
    for e in elements:
        m = e.matrix @ m
    return OpticalElement(m, " -> ".join(e.label for e in elements))


def apply(element: OpticalElement, state: PhotonState) -> PhotonState:
    return PhotonState(element.matrix @ state.amp)
