"""Multiphoton catalysis on the arms of a two-mode squeezed vacuum.

An EPR source with squeezing parameter ``lam`` feeds one or both arms
into a beam splitter whose ancillary port carries a Fock state; the
event is kept only when the same photon number leaves the ancillary
output port.  The heralded state is again a superposition of twin Fock
pairs, so its reduced state is thermal-like and the whole security
analysis only needs the success probability, the 2x2-block covariance
matrix and the Schmidt coefficients.

All three are mixed partial derivatives of a rational generating
function of up to four bookkeeping variables (one pair per catalysed
arm), which this module evaluates exactly with truncated Taylor jets
(:mod:`catqkd.series`).  Symmetric catalysis on both arms with equal
photon number and transmittance is called BSQC below; catalysis on the
idler arm only (the other beam splitter removed, transmittance one) is
SSQC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError
from .series import Jet, jet_const, jet_div, jet_mul, mixed_partial_at_zero

MAX_PHOTONS = 5

# Bookkeeping variable layout for the four-variable generating function:
# (tau, gamma) differentiate the signal-arm kernel, (tau1, gamma1) the
# idler-arm kernel.
_TAU, _GAMMA, _TAU1, _GAMMA1 = range(4)


@dataclass(frozen=True)
class SourceParams:
    """Two-mode squeezed vacuum source.

    ``alpha`` is the squeezing amplitude; the Schmidt parameter is
    ``lam = alpha / sqrt(1 + alpha**2)`` and the quadrature variance in
    shot-noise units is ``V = 2*alpha**2 + 1``.
    """

    alpha: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha < math.inf):
            raise ValueError(f"alpha must be a finite non-negative real, got {self.alpha}")

    @property
    def lam(self) -> float:
        return self.alpha / math.sqrt(1.0 + self.alpha**2)

    @property
    def variance(self) -> float:
        return 2.0 * self.alpha**2 + 1.0

    @classmethod
    def from_variance(cls, variance: float) -> "SourceParams":
        if variance < 1.0:
            raise ValueError(f"quadrature variance must be >= 1, got {variance}")
        return cls(alpha=math.sqrt((variance - 1.0) / 2.0))


@dataclass(frozen=True)
class CatalysisConfig:
    """Photon numbers and beam-splitter transmittances of the catalysers.

    ``m``/``t1`` act on the signal arm kept by Alice, ``n``/``t2`` on the
    idler arm sent to Bob.  ``t = 1`` makes an arm's catalyser a no-op.
    """

    m: int
    n: int
    t1: float
    t2: float

    def __post_init__(self) -> None:
        for label, value in (("m", self.m), ("n", self.n)):
            if not isinstance(value, int) or not 0 <= value <= MAX_PHOTONS:
                raise ValueError(f"photon number {label}={value!r} outside 0..{MAX_PHOTONS}")
        for label, value in (("t1", self.t1), ("t2", self.t2)):
            if not 0.0 < value <= 1.0:
                raise ValueError(f"transmittance {label}={value} outside (0, 1]")

    @classmethod
    def bsqc(cls, n: int, t: float) -> "CatalysisConfig":
        """Symmetric catalysis: n photons at transmittance t on both arms."""
        return cls(m=n, n=n, t1=t, t2=t)

    @classmethod
    def ssqc(cls, n: int, t: float) -> "CatalysisConfig":
        """Single-arm catalysis on the idler; the signal arm is untouched."""
        return cls(m=0, n=n, t1=1.0, t2=t)


@dataclass(frozen=True)
class TwoModeCovariance:
    """Standard-form two-mode covariance matrix diag blocks (x, y, z).

    The full matrix is ``[[x I, z sigma_z], [z sigma_z, y I]]`` in
    shot-noise units.  Physicality (x, y >= 1 and x*y - z**2 >= 1) is
    enforced at construction.
    """

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        tol = 1e-9
        ok = (
            math.isfinite(self.x)
            and math.isfinite(self.y)
            and math.isfinite(self.z)
            and self.x >= 1.0 - tol
            and self.y >= 1.0 - tol
            and self.x * self.y - self.z**2 >= 1.0 - tol
        )
        if not ok:
            raise ConsistencyError(
                f"unphysical covariance: x={self.x}, y={self.y}, z={self.z}"
            )

    def as_matrix(self) -> np.ndarray:
        """4x4 matrix in (xA, pA, xB, pB) quadrature ordering."""
        return np.array(
            [
                [self.x, 0.0, self.z, 0.0],
                [0.0, self.x, 0.0, -self.z],
                [self.z, 0.0, self.y, 0.0],
                [0.0, -self.z, 0.0, self.y],
            ]
        )


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Signed Schmidt coefficients w_l of a heralded twin-Fock state.

    ``weights[l]`` multiplies the ``|l, l>`` pair; ``tail_bound`` is an
    estimate of the squared mass discarded past the stored cutoff.
    """

    weights: np.ndarray
    tail_bound: float

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float)
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def cutoff(self) -> int:
        return len(self.weights) - 1

    @property
    def squared_sum(self) -> float:
        return float(self.weights @ self.weights)


def _affine(orders: tuple[int, ...], c0: float, var: int, c1: float) -> Jet:
    # c0 + c1 * x_var; the linear term drops when that variable is
    # truncated at order 0 (no derivative taken in it).
    coeffs = np.zeros(tuple(o + 1 for o in orders))
    coeffs.flat[0] = c0
    if orders[var] >= 1:
        pos = [0] * len(orders)
        pos[var] = 1
        coeffs[tuple(pos)] = c1
    return Jet(orders, coeffs)


def _kernel(cfg: CatalysisConfig, lam: float, orders: tuple[int, ...],
            tau: int, gamma: int) -> Jet:
    # One arm's generating kernel
    #   lam (t2 - gamma)(t1 - tau) / (sqrt(t1 t2) (1 - gamma)(1 - tau)).
    num = jet_mul(_affine(orders, cfg.t2, gamma, -1.0), _affine(orders, cfg.t1, tau, -1.0))
    den = jet_mul(_affine(orders, 1.0, gamma, -1.0), _affine(orders, 1.0, tau, -1.0))
    return jet_div(num * lam, den * math.sqrt(cfg.t1 * cfg.t2))


def _herald_scale(cfg: CatalysisConfig, lam: float) -> float:
    # Squared prefactor of the heralded (unnormalised) amplitude series.
    fact = math.factorial(cfg.m) * math.factorial(cfg.n)
    return cfg.t1**cfg.m * cfg.t2**cfg.n * (1.0 - lam**2) / fact**2


def _generating_moments(cfg: CatalysisConfig, src: SourceParams) -> tuple[float, float, float]:
    """Success probability and unnormalised second moments.

    Returns ``(pd, s_var, s_cor)`` where ``2*s_var/pd - 1`` is the
    quadrature variance of either mode and ``2*s_cor/pd`` the cross
    correlation.
    """
    orders = (cfg.m, cfg.n, cfg.m, cfg.n)
    derivs = orders
    lam = src.lam
    w = _kernel(cfg, lam, orders, _TAU, _GAMMA)
    w1 = _kernel(cfg, lam, orders, _TAU1, _GAMMA1)
    pi = jet_const(1.0, orders)
    for var in range(4):
        pi = jet_mul(pi, _affine(orders, 1.0, var, -1.0))
    pi = jet_div(jet_const(1.0, orders), pi)
    resolvent = jet_div(jet_const(1.0, orders), 1.0 - jet_mul(w1, w))

    first = jet_mul(pi, resolvent)
    second = jet_mul(first, resolvent)
    scale = _herald_scale(cfg, lam)
    pd = scale * mixed_partial_at_zero(first, derivs)
    s_var = scale * mixed_partial_at_zero(second, derivs)
    s_cor = scale * mixed_partial_at_zero(jet_mul(second, w), derivs)
    if not 0.0 < pd <= 1.0 + 1e-9:
        raise ConsistencyError(f"success probability {pd} outside (0, 1]")
    return pd, s_var, s_cor


def success_probability(cfg: CatalysisConfig, src: SourceParams) -> float:
    """Probability that both catalysers herald the target photon number."""
    return _generating_moments(cfg, src)[0]


def pd_and_covariance(cfg: CatalysisConfig, src: SourceParams) -> tuple[float, TwoModeCovariance]:
    """Success probability and covariance of the heralded state."""
    pd, s_var, s_cor = _generating_moments(cfg, src)
    x = 2.0 * s_var / pd - 1.0
    z = 2.0 * s_cor / pd
    return pd, TwoModeCovariance(x=x, y=x, z=z)


def output_covariance(cfg: CatalysisConfig, src: SourceParams) -> TwoModeCovariance:
    """Covariance matrix of the heralded state (x = y by symmetry)."""
    return pd_and_covariance(cfg, src)[1]


def schmidt_spectrum(cfg: CatalysisConfig, src: SourceParams,
                     tol: float = 1e-20, max_terms: int = 512) -> SchmidtSpectrum:
    """Schmidt coefficients of the heralded state.

    ``w_l`` is a two-variable mixed partial of ``kernel**l`` divided by
    ``(1 - tau)(1 - gamma)``; the loop reuses the running kernel power and
    stops once the estimated discarded squared mass drops below ``tol``.
    The coefficients keep their sign; only the normalisation is checked.
    """
    m, n = cfg.m, cfg.n
    orders = (m, n)
    lam = src.lam
    pd = success_probability(cfg, src)
    scale = math.sqrt(cfg.t1**m * cfg.t2**n * (1.0 - lam**2)) \
        / (math.factorial(m) * math.factorial(n)) / math.sqrt(pd)
    kernel = _kernel(cfg, lam, orders, 0, 1)
    base = jet_div(
        jet_const(1.0, orders),
        jet_mul(_affine(orders, 1.0, 0, -1.0), _affine(orders, 1.0, 1, -1.0)),
    )
    rho = lam * math.sqrt(cfg.t1 * cfg.t2)  # asymptotic weight ratio
    window = m + n + 2
    min_terms = 10 + m + n
    weights: list[float] = []
    power = jet_const(1.0, orders)
    tail = math.inf
    for l in range(max_terms + 1):
        weights.append(scale * mixed_partial_at_zero(jet_mul(base, power), orders))
        power = jet_mul(power, kernel)
        if l < min_terms:
            continue
        peak = max(abs(v) for v in weights[-window:])
        ratio = rho
        if weights[-2] != 0.0 and weights[-1] != 0.0:
            ratio = max(rho, min(abs(weights[-1] / weights[-2]), 0.9999))
        # Factor 4 absorbs the polynomial prefactor of the true tail.
        tail = 4.0 * peak**2 * ratio**2 / (1.0 - ratio**2)
        if tail < tol:
            break
    else:
        raise ConsistencyError(
            f"Schmidt spectrum did not converge within {max_terms} terms (tail {tail:g})"
        )
    spectrum = SchmidtSpectrum(weights=np.array(weights), tail_bound=tail)
    if abs(spectrum.squared_sum - 1.0) > 1e-8:
        raise ConsistencyError(
            f"Schmidt weights sum to {spectrum.squared_sum}, expected 1"
        )
    return spectrum


def log_negativity(spectrum: SchmidtSpectrum) -> float:
    """Logarithmic negativity 2 log2 sum_l |w_l| of a Schmidt-form state."""
    return 2.0 * math.log2(float(np.abs(spectrum.weights).sum()))


def log_negativity_tmsv(src: SourceParams) -> float:
    """Log negativity of the bare source, log2((1+lam)/(1-lam))."""
    lam = src.lam
    return math.log2((1.0 + lam) / (1.0 - lam))


def log_negativity_tmsv_closed_form(src: SourceParams) -> float:
    """Alternative closed form -log2(1+alpha**2) - 2 log2(sqrt(1+alpha**2) - alpha).

    Algebraically this equals ``2 log2(1 + lam)`` and so undercounts
    :func:`log_negativity_tmsv` by ``log2(1 - lam)``; both are kept so the
    discrepancy stays visible in sweeps.
    """
    a2 = src.alpha**2
    return -math.log2(1.0 + a2) - 2.0 * math.log2(math.sqrt(1.0 + a2) - src.alpha)


def tmsv_covariance(src: SourceParams) -> TwoModeCovariance:
    """Covariance of the bare two-mode squeezed vacuum."""
    v = src.variance
    return TwoModeCovariance(x=v, y=v, z=math.sqrt(v**2 - 1.0))
