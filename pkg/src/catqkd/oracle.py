"""Brute-force Fock-space cross-checks for the heralded sources.

Everything here is independent of the series pipeline: states are
expanded in the photon-number basis up to a cutoff and beam splitters
act through their exact matrix elements.  The closed forms elsewhere in
the package are tested against these simulations; nothing in here is
used for production sweeps.

Beam-splitter convention: ``sign=-1`` (default) maps ``b -> sqrt(t) b -
sqrt(1-t) c`` and ``c -> sqrt(1-t) b + sqrt(t) c``, so ``<0,1|B|1,0> =
-sqrt(1-t)``; ``sign=+1`` selects the mirrored convention with the minus
on the other reflected component.  Both are unitary and all heralded
observables must agree between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalysis import CatalysisConfig, SchmidtSpectrum, SourceParams, TwoModeCovariance
from .errors import CutoffError
from .subtraction import SubtractionConfig

_TAIL_MASS_LIMIT = 1e-8


def bs_fock_amplitude(t: float, in_b: int, in_c: int, out_b: int, out_c: int,
                      sign: float = -1.0) -> float:
    """Matrix element <out_b, out_c|B(t)|in_b, in_c> of a beam splitter.

    Photon number is conserved, so the amplitude vanishes unless
    ``in_b + in_c == out_b + out_c``.  The binomial sum runs in log space
    to stay finite for photon numbers far past the range of factorials
    in double precision.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmittance {t} outside [0, 1]")
    if sign not in (-1.0, 1.0):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if min(in_b, in_c, out_b, out_c) < 0:
        raise ValueError("photon numbers must be non-negative")
    if in_b + in_c != out_b + out_c:
        return 0.0
    j, k, p, q = in_b, in_c, out_b, out_c
    log_t = math.log(t) if t > 0.0 else -math.inf
    log_r = math.log(1.0 - t) if t < 1.0 else -math.inf
    base = 0.5 * (
        math.lgamma(p + 1) + math.lgamma(q + 1) - math.lgamma(j + 1) - math.lgamma(k + 1)
    )
    logs: list[float] = []
    signs: list[float] = []
    for a in range(max(0, p - k), min(j, p) + 1):
        e_t = 2 * a + k - p       # power of sqrt(t)
        e_r = j + p - 2 * a       # power of sqrt(1-t)
        if (e_t > 0 and log_t == -math.inf) or (e_r > 0 and log_r == -math.inf):
            continue
        log_term = (
            base
            + math.lgamma(j + 1) - math.lgamma(a + 1) - math.lgamma(j - a + 1)
            + math.lgamma(k + 1) - math.lgamma(p - a + 1) - math.lgamma(k - p + a + 1)
        )
        if e_t:
            log_term += 0.5 * e_t * log_t
        if e_r:
            log_term += 0.5 * e_r * log_r
        logs.append(log_term)
        parity = (j - a) if sign < 0 else (p - a)
        signs.append(-1.0 if parity % 2 else 1.0)
    if not logs:
        return 0.0
    peak = max(logs)
    acc = sum(s * math.exp(lg - peak) for s, lg in zip(signs, logs))
    return acc * math.exp(peak)


def adaptive_cutoff(lam: float, tail: float = 1e-12) -> int:
    """Fock cutoff keeping the source's weight-sum tail below ``tail``.

    Chosen so that ``sqrt(1-lam**2) * lam**(c+1) / (1-lam) < tail``, which
    bounds the truncation error of every reported quantity including the
    absolute Schmidt sum, not just the probability mass.
    """
    if lam <= 0.0:
        return 60
    bound = math.log(tail * (1.0 - lam) / math.sqrt(1.0 - lam**2))
    return max(60, math.ceil(bound / math.log(lam)))


def _check_tail(lam: float, cutoff: int, what: str) -> None:
    # Discarded probability mass of the geometric photon distribution.
    tail_mass = lam ** (2 * (cutoff + 1))
    if tail_mass > _TAIL_MASS_LIMIT:
        raise CutoffError(
            f"cutoff too small: {what} at cutoff {cutoff} leaves tail mass {tail_mass:.3g}"
        )


@dataclass(frozen=True)
class HeraldedSimulation:
    """Output of a Fock-space heralding simulation."""

    p_success: float
    spectrum: SchmidtSpectrum
    cov: TwoModeCovariance
    log_negativity: float


def simulate_catalysis(cfg: CatalysisConfig, src: SourceParams,
                       cutoff: int | None = None, sign: float = -1.0) -> HeraldedSimulation:
    """Exact Fock-basis simulation of two-arm photon catalysis.

    Catalysis is diagonal in the twin-Fock basis: the |l, l> component is
    multiplied by the amplitude of each arm's catalyser returning its
    ancilla photons, so the heralded state stays in Schmidt form.
    """
    lam = src.lam
    if cutoff is None:
        cutoff = adaptive_cutoff(lam)
    _check_tail(lam, cutoff, f"catalysis with lam={lam:.4f}")
    ls = np.arange(cutoff + 1)
    g1 = np.array([bs_fock_amplitude(cfg.t1, l, cfg.m, l, cfg.m, sign) for l in ls])
    g2 = np.array([bs_fock_amplitude(cfg.t2, l, cfg.n, l, cfg.n, sign) for l in ls])
    amps = math.sqrt(1.0 - lam**2) * lam**ls * g1 * g2
    pd = float(amps @ amps)
    weights = amps / math.sqrt(pd)
    nbar = float(ls @ (weights * weights))
    corr = float(np.sum(weights[:-1] * weights[1:] * (ls[:-1] + 1)))
    cov = TwoModeCovariance(x=2.0 * nbar + 1.0, y=2.0 * nbar + 1.0, z=2.0 * corr)
    return HeraldedSimulation(
        p_success=pd,
        spectrum=SchmidtSpectrum(weights=weights, tail_bound=float(lam ** (2 * (cutoff + 1)))),
        cov=cov,
        log_negativity=2.0 * math.log2(float(np.abs(weights).sum())),
    )


def simulate_subtraction(cfg: SubtractionConfig, src: SourceParams,
                         cutoff: int | None = None, sign: float = -1.0) -> HeraldedSimulation:
    """Exact Fock-basis simulation of single-photon subtraction.

    The heralded state is ``sum_l u_l |l, l-1>`` with Alice holding the
    larger photon number; ``spectrum`` stores u_l indexed by Alice's l
    (u_0 = 0).
    """
    lam = src.lam
    if lam == 0.0:
        raise ValueError("photon subtraction cannot herald on a vacuum source")
    if cutoff is None:
        cutoff = adaptive_cutoff(lam * math.sqrt(cfg.t))
    _check_tail(lam * math.sqrt(cfg.t), cutoff, f"subtraction with lam={lam:.4f}")
    ls = np.arange(cutoff + 1)
    taps = np.array([bs_fock_amplitude(cfg.t, l, 0, l - 1, 1, sign) if l else 0.0 for l in ls])
    amps = math.sqrt(1.0 - lam**2) * lam**ls * taps
    p1 = float(amps @ amps)
    u = amps / math.sqrt(p1)
    a_mean = float(ls @ (u * u))
    b_mean = float(np.maximum(ls - 1, 0) @ (u * u))
    corr = float(np.sum(u[1:-1] * u[2:] * np.sqrt((ls[1:-1] + 1) * ls[1:-1])))
    cov = TwoModeCovariance(x=2.0 * a_mean + 1.0, y=2.0 * b_mean + 1.0, z=2.0 * corr)
    return HeraldedSimulation(
        p_success=p1,
        spectrum=SchmidtSpectrum(weights=u, tail_bound=float((lam**2 * cfg.t) ** (cutoff + 1))),
        cov=cov,
        log_negativity=2.0 * math.log2(float(np.abs(u).sum())),
    )


def two_mode_symplectic_numeric(matrix: np.ndarray) -> tuple[float, float]:
    """Symplectic eigenvalues of a 4x4 covariance matrix via |eig(i Omega V)|.

    Independent of the closed-form route used by the key-rate module.
    """
    omega = np.array([
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ])
    nus = np.sort(np.abs(np.linalg.eigvals(1j * omega @ matrix)))[::-1]
    return float(0.5 * (nus[0] + nus[1])), float(0.5 * (nus[2] + nus[3]))
