"""Branch potentials of the hybrid SQUID and their Fourier harmonics.

The circuit element modeled here is a SQUID with a serial double tunnel
junction in one arm and a gated multi-channel nanowire junction in the
other. Both arms contribute 2pi-periodic potentials whose cosine Fourier
amplitudes interfere as a function of the external flux; at half flux
quantum the odd harmonics of the two arms subtract while the even ones
add, which is the knob this package is built around.

Conventions used throughout:

* energies are in GHz (implicitly GHz * h),
* phases and the reduced flux are in radians,
* ``u[0]``, ``v[0]``, ``c[0]`` store the mean value of the potential;
  coefficients with k >= 1 are full cosine amplitudes, i.e.
  ``U(phi) = c[0] + sum_k c[k] cos(k phi) + s[k] sin(k phi)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import minimize_scalar

__all__ = [
    "CircuitParams",
    "NanowireChannels",
    "FluxBias",
    "HarmonicSpectrum",
    "ParitySums",
    "Regime",
    "RegimeLabel",
    "RegimeThresholds",
    "BOValidity",
    "sissis_potential",
    "bo_correction",
    "sns_potential",
    "total_potential",
    "fourier_u",
    "fourier_v",
    "combine_harmonics",
    "parity_sums",
    "find_phi_min",
    "locate_minimum",
    "classify_regime",
    "internal_mode_freq",
    "validate_bo",
    "write_harmonics_csv",
]

#: |c[k_max]| / max_k |c[k]| above which a spectrum is flagged unconverged.
CONVERGENCE_RATIO = 1e-4

#: |c_odd| below this (GHz) makes the even/odd ratio report +inf.
ODD_SUM_FLOOR = 1e-6


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class CircuitParams:
    """Global device constants, all in GHz.

    Parameters
    ----------
    ej1, ej2:
        Josephson energies of the two serial tunnel junctions.
    ecj:
        Charging energy of the junctions (sets the internal mode).
    ec:
        Charging energy of the qubit island.
    gap:
        Superconducting gap entering the nanowire-arm potential.
    """

    ej1: float
    ej2: float
    ecj: float
    ec: float
    gap: float

    def __post_init__(self) -> None:
        for name in ("ej1", "ej2", "ecj", "ec", "gap"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def ej_sigma(self) -> float:
        """Sum of the two junction energies."""
        return self.ej1 + self.ej2

    @property
    def lam(self) -> float:
        """Effective transmission 4*ej1*ej2/(ej1+ej2)^2 of the double junction."""
        return 4.0 * self.ej1 * self.ej2 / (self.ej1 + self.ej2) ** 2


@dataclass(frozen=True)
class NanowireChannels:
    """Ordered channel transmissions of the nanowire arm.

    Stored sorted descending; permutations of the same multiset are one
    physical configuration. An empty tuple models an open (pinched-off)
    nanowire arm.
    """

    transmissions: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        values = tuple(float(t) for t in self.transmissions)
        for t in values:
            if not math.isfinite(t) or t < 0.0 or t > 1.0:
                raise ValueError(f"transmission {t!r} outside [0, 1]")
        object.__setattr__(self, "transmissions", tuple(sorted(values, reverse=True)))

    def __len__(self) -> int:
        return len(self.transmissions)

    def __iter__(self) -> Iterator[float]:
        return iter(self.transmissions)

    @classmethod
    def of(cls, values: Iterable[float]) -> "NanowireChannels":
        return cls(tuple(values))


@dataclass(frozen=True)
class FluxBias:
    """Reduced external flux phi_e = 2*pi*Phi_e/Phi_0, canonical in [-pi, pi)."""

    phi_e: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.phi_e):
            raise ValueError(f"phi_e must be finite, got {self.phi_e!r}")
        wrapped = (self.phi_e + math.pi) % (2.0 * math.pi) - math.pi
        object.__setattr__(self, "phi_e", wrapped)

    @classmethod
    def from_phi0(cls, flux_in_phi0: float) -> "FluxBias":
        """Build from flux in units of the flux quantum."""
        return cls(2.0 * math.pi * flux_in_phi0)

    @property
    def phi0_units(self) -> float:
        return self.phi_e / (2.0 * math.pi)


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Truncated Fourier content of the total potential at one flux bias.

    ``u`` holds the double-junction-arm cosine amplitudes (including the
    internal-mode correction unless it was disabled), ``v`` the
    nanowire-arm amplitudes at zero flux, and ``c``/``s`` the combined
    cosine/sine amplitudes at the stored flux.
    """

    k_max: int
    u: np.ndarray
    v: np.ndarray
    c: np.ndarray
    s: np.ndarray
    phi_e: float = 0.0

    def __post_init__(self) -> None:
        for name in ("u", "v", "c", "s"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.k_max + 1,):
                raise ValueError(
                    f"{name} must have length k_max+1={self.k_max + 1}, got {arr.shape}"
                )
            object.__setattr__(self, name, arr)

    @classmethod
    def from_cosine(cls, c: Sequence[float], s: Sequence[float] | None = None) -> "HarmonicSpectrum":
        """Synthetic spectrum from explicit cosine (and optional sine) amplitudes."""
        c_arr = np.asarray(c, dtype=float)
        s_arr = np.zeros_like(c_arr) if s is None else np.asarray(s, dtype=float)
        if s_arr.shape != c_arr.shape:
            raise ValueError("c and s must have the same length")
        return cls(k_max=len(c_arr) - 1, u=c_arr.copy(), v=np.zeros_like(c_arr), c=c_arr, s=s_arr)

    @property
    def converged(self) -> bool:
        """True when the truncation tail is negligible against the largest harmonic."""
        if self.k_max < 1:
            return True
        scale = float(np.max(np.abs(self.c[1:])))
        if scale == 0.0:
            return True
        return abs(float(self.c[self.k_max])) <= CONVERGENCE_RATIO * scale

    def potential(self, phi: np.ndarray | float) -> np.ndarray | float:
        """Evaluate the truncated series (constant term included)."""
        phi = np.asarray(phi, dtype=float)
        k = np.arange(1, self.k_max + 1)
        phases = np.multiply.outer(phi, k)
        out = self.c[0] + np.cos(phases) @ self.c[1:] + np.sin(phases) @ self.s[1:]
        return out if out.shape else float(out)


class Regime(Enum):
    """Which harmonic parity shapes the potential minimum."""

    ODD_DOMINATED = "OddDominated"
    MIXED = "Mixed"
    EVEN_DOMINATED = "EvenDominated"


@dataclass(frozen=True)
class RegimeThresholds:
    """Bands on phi_min used to assign a regime; overridable per run."""

    odd_max: float = 0.1
    even_halfwidth: float = 0.35


@dataclass(frozen=True)
class RegimeLabel:
    regime: Regime
    phi_min: float


@dataclass(frozen=True)
class ParitySums:
    """Signed sums of even-k and odd-k cosine amplitudes (k >= 1)."""

    c_even: float
    c_odd: float
    ratio: float


@dataclass(frozen=True)
class BOValidity:
    """Checks for the internal-mode elimination behind the double-junction arm."""

    charge_hierarchy_ok: bool
    junction_ratio_ok: bool
    internal_mode_clear: bool | None
    internal_mode_freq: float
    junction_ratio: float

    @property
    def all_ok(self) -> bool:
        return (
            self.charge_hierarchy_ok
            and self.junction_ratio_ok
            and self.internal_mode_clear is not False
        )


# ---------------------------------------------------------------------------
# branch potentials


def sissis_potential(phi: np.ndarray | float, params: CircuitParams) -> np.ndarray | float:
    """Potential of the serial double tunnel junction.

    ``-E_Jsigma * sqrt(1 - lam * sin^2(phi/2))`` with the total Josephson
    energy and effective transmission taken from ``params``. Even in phi
    and 2pi-periodic.
    """
    phi = np.asarray(phi, dtype=float)
    out = -params.ej_sigma * np.sqrt(1.0 - params.lam * np.sin(phi / 2.0) ** 2)
    return out if out.shape else float(out)


def bo_correction(phi: np.ndarray | float, params: CircuitParams) -> np.ndarray | float:
    """Zero-point energy of the internal mode of the double junction.

    ``E_Jsigma * sqrt((E_CJ/E_Jsigma) * sqrt(1 - lam * sin^2(phi/2)))``;
    nonnegative, even, 2pi-periodic. Valid while the internal mode sits
    well above the qubit levels, see :func:`validate_bo`.
    """
    phi = np.asarray(phi, dtype=float)
    root = np.sqrt(1.0 - params.lam * np.sin(phi / 2.0) ** 2)
    out = params.ej_sigma * np.sqrt((params.ecj / params.ej_sigma) * root)
    return out if out.shape else float(out)


def sns_potential(
    phi: np.ndarray | float,
    channels: NanowireChannels,
    gap: float,
    flux: FluxBias = FluxBias(0.0),
) -> np.ndarray | float:
    """Nanowire-arm potential ``-gap * sum_i sqrt(1 - T_i sin^2((phi - phi_e)/2))``.

    Each term is the phase dispersion of one bound-state channel; an empty
    channel list gives identically zero.
    """
    phi = np.asarray(phi, dtype=float)
    s2 = np.sin((phi - flux.phi_e) / 2.0) ** 2
    out = np.zeros_like(s2)
    for t in channels:
        out -= gap * np.sqrt(1.0 - t * s2)
    return out if out.shape else float(out)


def total_potential(
    phi: np.ndarray | float,
    params: CircuitParams,
    channels: NanowireChannels,
    flux: FluxBias,
    *,
    include_bo: bool = True,
) -> np.ndarray | float:
    """Sum of the two arm potentials (internal-mode correction optional).

    The ``include_bo=False`` switch evaluates the double-junction arm in
    the vanishing-junction-capacitance limit; it exists so analytic
    closed forms stay reachable for validation.
    """
    out = np.asarray(sissis_potential(phi, params), dtype=float)
    if include_bo:
        out = out + bo_correction(phi, params)
    out = out + sns_potential(phi, channels, params.gap, flux)
    return out if out.shape else float(out)


# ---------------------------------------------------------------------------
# quadrature backend
#
# Two routes, picked per integrand:
#  * periodic trapezoid (FFT) for strictly sub-unity transmissions, where
#    the integrand is analytic and the rule converges spectrally;
#  * adaptive Gauss-Kronrod on [0, pi] when the effective transmission is
#    at (or within 1e-6 of) unity and the integrand has a |cos(phi/2)|
#    cusp at phi = pi.
# Both deliver ~1e-13 of the leading coefficient, comfortably below the
# 1e-10 relative contract of fourier_u / fourier_v.

_CUSP_EDGE = 1.0 - 1e-6
_TRAP_MIN = 4096
_TRAP_MAX = 1 << 17


def _trapezoid_samples(sharpness: float) -> int:
    """Sample count for spectral accuracy given the branch transmission."""
    if sharpness <= 0.0:
        return _TRAP_MIN
    # Fourier amplitudes decay as exp(-eta k); eta from the complex
    # singularity of sqrt(1 - sharpness sin^2(phi/2)).
    eta = 2.0 * math.acosh(1.0 / math.sqrt(sharpness)) if sharpness < 1.0 else 0.0
    if eta <= 0.0:
        return _TRAP_MAX
    n = 2 ** math.ceil(math.log2(max(60.0 / eta, 1.0)))
    return min(max(n, _TRAP_MIN), _TRAP_MAX)


def _trapezoid_cosine(fn: Callable[[np.ndarray], np.ndarray], k_max: int, n: int) -> np.ndarray:
    phi = -math.pi + 2.0 * math.pi * np.arange(n) / n
    y = np.asarray(fn(phi), dtype=float)
    spectrum = np.fft.rfft(y)
    coef = np.empty(k_max + 1)
    coef[0] = spectrum[0].real / n
    k = np.arange(1, k_max + 1)
    coef[1:] = (2.0 / n) * ((-1.0) ** k) * spectrum[1 : k_max + 1].real
    return coef


def _quad_cosine(fn: Callable[[float], float], k_max: int) -> np.ndarray:
    coef = np.empty(k_max + 1)
    with warnings.catch_warnings():
        # tolerances sit at the roundoff floor on purpose; QUADPACK
        # reports that as a warning while still returning ~1e-13 accuracy
        warnings.simplefilter("ignore", IntegrationWarning)
        for k in range(k_max + 1):
            val, _ = quad(
                lambda p: fn(p) * math.cos(k * p),
                0.0,
                math.pi,
                epsabs=1e-13,
                epsrel=1e-12,
                limit=400,
            )
            coef[k] = (2.0 / math.pi) * val if k >= 1 else val / math.pi
    return coef


def _cosine_coefficients(
    fn: Callable[[np.ndarray], np.ndarray], k_max: int, sharpness: float
) -> np.ndarray:
    """Cosine amplitudes of an even 2pi-periodic function.

    ``sharpness`` is the effective transmission of the branch; it decides
    between the spectral trapezoid rule and the cusp-safe adaptive rule.
    """
    if sharpness < _CUSP_EDGE:
        return _trapezoid_cosine(fn, k_max, _trapezoid_samples(sharpness))
    return _quad_cosine(lambda p: float(fn(np.asarray(p))), k_max)


# ---------------------------------------------------------------------------
# Fourier decomposition


def fourier_u(params: CircuitParams, k_max: int, *, include_bo: bool = True) -> np.ndarray:
    """Cosine amplitudes of the double-junction arm.

    Index 0 stores the mean value; indices k >= 1 are the full amplitudes
    of cos(k phi).

    Parameters
    ----------
    params:
        Device constants; the arm shape depends on ej1, ej2 and ecj.
    k_max:
        Truncation order, must be >= 1.
    include_bo:
        Include the internal-mode correction (the default; disable only
        to compare against closed forms).
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")

    def branch(phi: np.ndarray) -> np.ndarray:
        out = np.asarray(sissis_potential(phi, params), dtype=float)
        if include_bo:
            out = out + bo_correction(phi, params)
        return out

    return _cosine_coefficients(branch, k_max, params.lam)


def fourier_v(channels: NanowireChannels, gap: float, k_max: int) -> np.ndarray:
    """Cosine amplitudes of the nanowire arm at zero flux offset.

    Channels are decomposed one at a time so each integrand gets the
    quadrature route matching its own transmission.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    coef = np.zeros(k_max + 1)
    for t in channels:
        coef += _cosine_coefficients(
            lambda phi, t=t: -gap * np.sqrt(1.0 - t * np.sin(phi / 2.0) ** 2),
            k_max,
            t,
        )
    return coef


def combine_harmonics(u: np.ndarray, v: np.ndarray, flux: FluxBias) -> HarmonicSpectrum:
    """Interfere the two arms at a flux bias.

    ``c[k] = u[k] + cos(k phi_e) v[k]`` and ``s[k] = sin(k phi_e) v[k]``;
    at half flux quantum the sine content vanishes and odd-k cosine
    amplitudes become differences of the two arms.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"u and v must be 1-d arrays of equal length, got {u.shape} vs {v.shape}")
    k = np.arange(len(u))
    c = u + np.cos(k * flux.phi_e) * v
    s = np.sin(k * flux.phi_e) * v
    return HarmonicSpectrum(k_max=len(u) - 1, u=u, v=v, c=c, s=s, phi_e=flux.phi_e)


def parity_sums(spec: HarmonicSpectrum, *, odd_floor: float = ODD_SUM_FLOOR) -> ParitySums:
    """Signed even-k and odd-k sums of the cosine amplitudes (k >= 1).

    The constant term is excluded. The even/odd magnitude ratio reports
    ``inf`` once |c_odd| falls below ``odd_floor``, where the ratio
    formally diverges.
    """
    c_even = float(np.sum(spec.c[2::2]))
    c_odd = float(np.sum(spec.c[1::2]))
    ratio = math.inf if abs(c_odd) < odd_floor else abs(c_even / c_odd)
    return ParitySums(c_even=c_even, c_odd=c_odd, ratio=ratio)


# ---------------------------------------------------------------------------
# minima and regimes


def locate_minimum(
    potential: Callable[[np.ndarray], np.ndarray],
    *,
    tol: float = 1e-6,
    grid_points: int = 4097,
) -> float:
    """Global minimizer of an even periodic potential over [0, pi].

    Dense grid bracketing followed by a bounded scalar polish; the result
    snaps to the landmark points {0, pi/2, pi} when within ``tol`` so the
    symmetric cases come out exact.
    """
    grid = np.linspace(0.0, math.pi, grid_points)
    values = np.asarray(potential(grid), dtype=float)
    best = int(np.argmin(values))
    h = grid[1] - grid[0]
    lo = max(grid[best] - h, 0.0)
    hi = min(grid[best] + h, math.pi)
    result = minimize_scalar(
        lambda p: float(potential(np.asarray(p))),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": tol * 1e-3},
    )
    x = float(result.x)
    fx = float(potential(np.asarray(x)))
    if values[best] < fx:
        x, fx = float(grid[best]), float(values[best])
    scale = 1.0 + abs(fx)
    for landmark in (0.0, math.pi / 2.0, math.pi):
        if abs(x - landmark) <= tol and float(potential(np.asarray(landmark))) <= fx + 1e-9 * scale:
            return landmark
    return x


def classify_regime(phi_min: float, thresholds: RegimeThresholds | None = None) -> Regime:
    """Assign the parity regime from the location of the potential minimum."""
    th = thresholds or RegimeThresholds()
    if phi_min < th.odd_max:
        return Regime.ODD_DOMINATED
    if abs(phi_min - math.pi / 2.0) < th.even_halfwidth:
        return Regime.EVEN_DOMINATED
    return Regime.MIXED


def find_phi_min(
    params: CircuitParams,
    channels: NanowireChannels,
    flux: FluxBias,
    *,
    include_bo: bool = True,
    thresholds: RegimeThresholds | None = None,
    tol: float = 1e-6,
) -> RegimeLabel:
    """Locate the total-potential minimum and classify the parity regime.

    Minima come in +/- pairs; the nonnegative representative in [0, pi]
    is reported. The landscape is the exact branch sum, not its truncated
    Fourier series, so shallow features near the junction cusps are kept.
    """
    phi_min = locate_minimum(
        lambda phi: total_potential(phi, params, channels, flux, include_bo=include_bo),
        tol=tol,
    )
    return RegimeLabel(regime=classify_regime(phi_min, thresholds), phi_min=phi_min)


# ---------------------------------------------------------------------------
# internal-mode validity


def internal_mode_freq(params: CircuitParams) -> float:
    """Lowest internal-mode transition of the double junction, sqrt(4*E_CJ*E_Jsigma)."""
    return math.sqrt(4.0 * params.ecj * params.ej_sigma)


def validate_bo(
    params: CircuitParams,
    *,
    ratio_threshold: float = 10.0,
    max_transition_freq: float | None = None,
) -> BOValidity:
    """Check the assumptions behind the internal-mode correction.

    Three conditions: the junction charging energy exceeds the island
    charging energy, the junction arm is deep in the phase regime
    (``E_Jsigma / E_CJ`` above ``ratio_threshold``), and the internal
    mode lies above the largest transition frequency the caller intends
    to use (skipped when not supplied).
    """
    f_int = internal_mode_freq(params)
    ratio = params.ej_sigma / params.ecj
    clear: bool | None
    if max_transition_freq is None:
        clear = None
    else:
        clear = f_int > max_transition_freq
    return BOValidity(
        charge_hierarchy_ok=params.ecj > params.ec,
        junction_ratio_ok=ratio >= ratio_threshold,
        internal_mode_clear=clear,
        internal_mode_freq=f_int,
        junction_ratio=ratio,
    )


# ---------------------------------------------------------------------------
# export


def write_harmonics_csv(spec: HarmonicSpectrum, path: str) -> None:
    """Write the harmonic table as CSV with columns k, u_k, v_k, c_k, s_k (GHz)."""
    lines = ["k,u_k,v_k,c_k,s_k"]
    for k in range(spec.k_max + 1):
        lines.append(
            f"{k},{spec.u[k]:.12g},{spec.v[k]:.12g},{spec.c[k]:.12g},{spec.s[k]:.12g}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
