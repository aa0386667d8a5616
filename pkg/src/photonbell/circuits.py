"""Preparation circuit, Bell-basis analyzer, B-basis analyzer and B' receiver.

The preparation stage and each analyzer together form one equal-path
Mach-Zehnder interferometer.  Analyzers end in a per-path H/V split, so a
detector port is identified with a product-basis index (aH, aV, bH, bV)
after the analyzer unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .elements import OpticalElement, apply, compose, hwp, identity, pbs, phase_shifter
from .states import (
    ALL_LABELS,
    AlphabetLabel,
    BellLabel,
    BPrimeLabel,
    NORM_TOL,
    PhotonState,
    Polarization,
    ProductLabel,
    SpatialMode,
    make_basis_state,
    named_state,
)

PORT_NAMES = ("aH", "aV", "bH", "bV")


@dataclass(frozen=True)
class PrepSettings:
    """Knobs of the preparation stage.

    ``prep_hwp`` is the plate before the splitting PBS (degrees), ``phi`` the
    spatial phase on path a (radians).  ``flip_a``/``flip_b`` insert a plate in
    the corresponding path; its angle is ``theta_a``/``theta_b`` (45 deg flips
    H and V).  An absent plate is omitted from the circuit, never hwp(m, 0).
    """

    prep_hwp: float = 22.5
    phi: float = 0.0
    flip_a: bool = False
    flip_b: bool = False
    theta_a: float = 45.0
    theta_b: float = 45.0

    def elements(self) -> list[OpticalElement]:
        out = [hwp(SpatialMode.A, self.prep_hwp), pbs(), phase_shifter(SpatialMode.A, self.phi)]
        if self.flip_a:
            out.append(hwp(SpatialMode.A, self.theta_a))
        if self.flip_b:
            out.append(hwp(SpatialMode.B, self.theta_b))
        return out


def prepare(settings: PrepSettings) -> PhotonState:
    """Send the heralded photon |a,H> through the preparation stage."""
    herald = make_basis_state(SpatialMode.A, Polarization.H)
    return apply(compose(settings.elements()), herald)


_PI = math.pi

_SETTINGS = {
    BellLabel.PsiPlus: PrepSettings(22.5, 0.0),
    BellLabel.PsiMinus: PrepSettings(22.5, _PI),
    BellLabel.PhiPlus: PrepSettings(22.5, 0.0, True, True),
    BellLabel.PhiMinus: PrepSettings(22.5, _PI, True, True),
    ProductLabel.aH: PrepSettings(0.0),
    ProductLabel.aV: PrepSettings(0.0, 0.0, True, False),
    ProductLabel.bV: PrepSettings(45.0),
    ProductLabel.bH: PrepSettings(45.0, 0.0, False, True),
    AlphabetLabel.aPlus45: PrepSettings(0.0, 0.0, True, False, theta_a=22.5),
    AlphabetLabel.bMinus45: PrepSettings(45.0, 0.0, False, True, theta_b=22.5),
    AlphabetLabel.SV: PrepSettings(22.5, 0.0, True, False),
    AlphabetLabel.AH: PrepSettings(22.5, _PI, False, True),
    BPrimeLabel.SPlus45: PrepSettings(22.5, 0.0, True, True, theta_a=22.5, theta_b=67.5),
    BPrimeLabel.APlus45: PrepSettings(22.5, _PI, True, True, theta_a=22.5, theta_b=67.5),
    BPrimeLabel.SMinus45: PrepSettings(22.5, 0.0, True, True, theta_a=-22.5, theta_b=22.5),
    BPrimeLabel.AMinus45: PrepSettings(22.5, _PI, True, True, theta_a=-22.5, theta_b=22.5),
}


def settings_for(target) -> PrepSettings:
    """Preparation settings reaching ``target`` (any named state label) up to global phase."""
    try:
        return _SETTINGS[target]
    except KeyError:
        raise ValueError(f"no preparation settings for {target!r}") from None


BELL_PREP = tuple(settings_for(label) for label in BellLabel)


@dataclass(frozen=True)
class OutcomeDistribution:
    probs: np.ndarray
    labels: tuple

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(4)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        if np.any(p < -NORM_TOL) or abs(p.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"invalid outcome distribution {p}")

    def __getitem__(self, label) -> float:
        return float(self.probs[self.labels.index(label)])

    def as_dict(self) -> dict:
        return {_label_name(lab): float(p) for lab, p in zip(self.labels, self.probs)}


def _label_name(label) -> str:
    return getattr(label, "name", str(label))


def port_bijection(unitary: np.ndarray, basis: dict, tol: float = 1e-12) -> tuple:
    """Label each output port by the unique basis state that reaches it with probability 1.

    ``basis`` maps labels to PhotonStates.  Raises ValueError if the routing is
    not a deterministic one-to-one map.
    """
    labels = [None] * 4
    for label, state in basis.items():
        p = np.abs(unitary @ state.amp) ** 2
        port = int(np.argmax(p))
        if abs(p[port] - 1.0) > tol or labels[port] is not None:
            raise ValueError(f"{label!r} is not routed deterministically to a free port: {p}")
        labels[port] = label
    return tuple(labels)


@dataclass(frozen=True, eq=False)
class Analyzer:
    """Unitary followed by the four-port H/V split of both paths."""

    name: str
    element: OpticalElement
    basis: tuple

    @cached_property
    def unitary(self) -> np.ndarray:
        return self.element.matrix

    @cached_property
    def labels(self) -> tuple:
        return port_bijection(self.unitary, {lab: named_state(lab) for lab in self.basis})

    @cached_property
    def port_of(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def probs(self, s: PhotonState) -> OutcomeDistribution:
        if not s.is_normalized():
            raise ValueError(f"analyzer input is not normalized (norm={s.norm!r})")
        p = np.abs(self.unitary @ s.amp) ** 2
        return OutcomeDistribution(p, self.labels)

    def batch_probs(self, amps: np.ndarray) -> np.ndarray:
        """Port probabilities for a stack of amplitude rows, shape (n, 4)."""
        return np.abs(amps @ self.unitary.T) ** 2


BELL_ANALYZER = Analyzer(
    "bell",
    compose([pbs(), hwp(SpatialMode.A, 22.5), hwp(SpatialMode.B, 22.5)]),
    tuple(BellLabel),
)

B_ANALYZER = Analyzer("B", identity(), tuple(ProductLabel))

BPRIME_RECEIVER = Analyzer(
    "B'",
    compose([hwp(SpatialMode.A, 22.5), hwp(SpatialMode.B, 67.5), BELL_ANALYZER.element]),
    tuple(BPrimeLabel),
)


def bell_analyzer_probs(s: PhotonState) -> OutcomeDistribution:
    return BELL_ANALYZER.probs(s)


def b_basis_probs(s: PhotonState) -> OutcomeDistribution:
    return B_ANALYZER.probs(s)


def bprime_receiver_probs(s: PhotonState) -> OutcomeDistribution:
    return BPRIME_RECEIVER.probs(s)


def bprime_port_table() -> list[tuple[str, str]]:
    """(B' state, Bell-analyzer port it lands on) for documentation output."""
    return [
        (_label_name(b), _label_name(bell))
        for b, bell in zip(BPRIME_RECEIVER.labels, BELL_ANALYZER.labels)
    ]


__all__ = [
    "ALL_LABELS",
    "PORT_NAMES",
    "PrepSettings",
    "prepare",
    "settings_for",
    "BELL_PREP",
    "OutcomeDistribution",
    "port_bijection",
    "Analyzer",
    "BELL_ANALYZER",
    "B_ANALYZER",
    "BPRIME_RECEIVER",
    "bell_analyzer_probs",
    "b_basis_probs",
    "bprime_receiver_probs",
    "bprime_port_table",
]
