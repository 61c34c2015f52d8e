"""Multidirectional ring pointing task: difficulty math, layouts, ordering.

Targets sit on a circle of diameter `amplitude_px`; trials hop across the
ring so successive movements are near-diametric, per the ISO 9241-9
multidirectional tapping arrangement. Index of difficulty uses the
Shannon formulation ID = log2(A/W + 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

DEFAULT_WIDTH_PX = 50.0
DEFAULT_N_TARGETS = 9
DEFAULT_N_TRIALS = 22


def index_of_difficulty(amplitude_px: float, width_px: float) -> float:
    """ID in bits, log2(A/W + 1). Both arguments must be positive."""
    if amplitude_px <= 0:
        raise ValueError("amplitude must be positive")
    if width_px <= 0:
        raise ValueError("width must be positive")
    return math.log2(amplitude_px / width_px + 1.0)


@dataclass(frozen=True)
class RingLayout:
    amplitude_px: float
    width_px: float
    n_targets: int = DEFAULT_N_TARGETS
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.width_px <= 0:
            raise ValueError("width must be positive")
        if self.amplitude_px <= self.width_px:
            raise ValueError("amplitude must exceed width")
        if self.n_targets < 3 or self.n_targets % 2 == 0:
            raise ValueError("n_targets must be odd and >= 3")

    @property
    def id_bits(self) -> float:
        return index_of_difficulty(self.amplitude_px, self.width_px)

    def target_positions(self) -> list[tuple[float, float]]:
        """Centers of the ring targets, equally spaced, first at 12 o'clock."""
        cx, cy = self.center
        r = self.amplitude_px / 2.0
        out = []
        for k in range(self.n_targets):
            theta = -math.pi / 2.0 + 2.0 * math.pi * k / self.n_targets
            out.append((cx + r * math.cos(theta), cy + r * math.sin(theta)))
        return out


def layout_for_id(id_bits: float, width_px: float = DEFAULT_WIDTH_PX,
                  n_targets: int = DEFAULT_N_TARGETS) -> RingLayout:
    """Invert the ID formula: A = W * (2^ID - 1). Rejects ID <= 1 (A <= W)."""
    if width_px <= 0:
        raise ValueError("width must be positive")
    amplitude = width_px * (2.0 ** id_bits - 1.0)
    if amplitude <= width_px:
        raise ValueError("ID %g gives amplitude %g <= width %g" % (id_bits, amplitude, width_px))
    return RingLayout(amplitude_px=amplitude, width_px=width_px, n_targets=n_targets)


@dataclass(frozen=True)
class TrialPlan:
    layout: RingLayout
    order: tuple[int, ...] = field(default=())

    @property
    def n_trials(self) -> int:
        return len(self.order)


def trial_sequence(layout: RingLayout, n_trials: int = DEFAULT_N_TRIALS) -> TrialPlan:
    """Cross-ring target order: position j is (j * ceil(n/2)) mod n.

    With odd n the stride is coprime to n, so any n consecutive trials
    visit every target exactly once.
    """
    if n_trials < 1:
        raise ValueError("need at least one trial")
    n = layout.n_targets
    stride = math.ceil(n / 2)
    order = tuple((j * stride) % n for j in range(n_trials))
    return TrialPlan(layout=layout, order=order)
