"""Single-photon subtraction on the idler arm of a two-mode squeezed vacuum.

The idler passes a beam splitter of transmittance ``t`` and the event is
kept when exactly one photon appears in the reflected port.  Everything
is closed form: with ``a2 = (1-lam**2)(1-t)/t`` and ``b2 = lam**2 t`` the
heralded state is ``sqrt(a2/b2) * sum_l b**l sqrt(l) |l, l-1>``, giving

    P1 = a2 b2 / (1 - b2)**2
    x  = (3 + b2) / (1 - b2)        (Alice keeps the extra photon)
    y  = (1 + 3 b2) / (1 - b2)
    z  = 4 sqrt(b2) / (1 - b2)

and x*y - z**2 = 3 identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .catalysis import SourceParams, TwoModeCovariance


@dataclass(frozen=True)
class SubtractionConfig:
    """Transmittance of the tap beam splitter, strictly inside (0, 1)."""

    t: float

    def __post_init__(self) -> None:
        if not 0.0 < self.t < 1.0:
            raise ValueError(f"transmittance t={self.t} outside (0, 1)")


def _squares(cfg: SubtractionConfig, src: SourceParams) -> tuple[float, float]:
    lam2 = src.lam**2
    return (1.0 - lam2) * (1.0 - cfg.t) / cfg.t, lam2 * cfg.t


def success_probability(cfg: SubtractionConfig, src: SourceParams) -> float:
    """Probability of tapping off exactly one photon."""
    a2, b2 = _squares(cfg, src)
    return a2 * b2 / (1.0 - b2) ** 2


def p1_and_covariance(cfg: SubtractionConfig, src: SourceParams) -> tuple[float, TwoModeCovariance]:
    """Success probability and covariance of the subtracted state."""
    if src.lam == 0.0:
        raise ValueError("photon subtraction cannot herald on a vacuum source")
    a2, b2 = _squares(cfg, src)
    p1 = a2 * b2 / (1.0 - b2) ** 2
    one = 1.0 - b2
    cov = TwoModeCovariance(
        x=(3.0 + b2) / one,
        y=(1.0 + 3.0 * b2) / one,
        z=4.0 * math.sqrt(b2) / one,
    )
    return p1, cov


def output_covariance(cfg: SubtractionConfig, src: SourceParams) -> TwoModeCovariance:
    """Covariance of the photon-subtracted state (x > y: Alice's side is hotter)."""
    return p1_and_covariance(cfg, src)[1]
