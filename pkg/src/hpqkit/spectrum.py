"""Charge-basis Hamiltonian, spectra, and charge-parity structure.

The island Hamiltonian is ``4 E_C (n - n_g)^2`` plus the periodic
potential given by a :class:`~hpqkit.potentials.HarmonicSpectrum`. In the
Cooper-pair number basis each cos(k phi) harmonic couples charge states
k apart with strength c_k/2 and each sin(k phi) adds an antisymmetric
imaginary coupling of magnitude s_k/2, so the matrix is Hermitian and
banded with bandwidth k_max.
"""

from __future__ import annotations

import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .potentials import (
    CircuitParams,
    FluxBias,
    HarmonicSpectrum,
    NanowireChannels,
    combine_harmonics,
    fourier_u,
    fourier_v,
)

__all__ = [
    "ChargeBasisConfig",
    "ParityWeights",
    "TransitionTable",
    "SolverError",
    "build_hamiltonian",
    "eigensolve",
    "parse_transition_label",
    "transition_frequencies",
    "charge_matrix_element",
    "parity_weights",
    "spectrum_vs_flux",
]

logger = logging.getLogger(__name__)

#: energies closer than this (GHz) count as degenerate for state labeling
DEGENERACY_TOL = 1e-9

_LABEL_RE = re.compile(r"^f(\d)(\d)(?:/(\d))?$")


class SolverError(RuntimeError):
    """Eigensolver failure, annotated with whatever context is available."""


@dataclass(frozen=True)
class ChargeBasisConfig:
    """Charge-basis truncation: states n = -n_cut .. +n_cut."""

    n_cut: int = 30
    n_g: float = 0.0
    n_levels: int = 6

    def __post_init__(self) -> None:
        if self.n_cut < 0:
            raise ValueError(f"n_cut must be >= 0, got {self.n_cut}")
        if not 1 <= self.n_levels <= 2 * self.n_cut + 1:
            raise ValueError(
                f"n_levels must be in [1, {2 * self.n_cut + 1}], got {self.n_levels}"
            )

    @property
    def dim(self) -> int:
        return 2 * self.n_cut + 1

    @property
    def charges(self) -> np.ndarray:
        return np.arange(-self.n_cut, self.n_cut + 1)


@dataclass(frozen=True)
class ParityWeights:
    even_weight: float
    odd_weight: float


def build_hamiltonian(spec: HarmonicSpectrum, ec: float, cfg: ChargeBasisConfig) -> np.ndarray:
    """Assemble the charge-basis Hamiltonian for one harmonic spectrum.

    The constant term ``c[0]`` is dropped (pure energy offset). The basis
    must leave headroom beyond the coupling range: ``n_cut >= k_max + 5``.
    """
    if spec.k_max >= 1 and cfg.n_cut < spec.k_max + 5:
        raise ValueError(
            f"n_cut={cfg.n_cut} too small for k_max={spec.k_max}; need n_cut >= k_max + 5"
        )
    dim = cfg.dim
    n = cfg.charges
    complex_needed = bool(np.any(spec.s[1:] != 0.0))
    h = np.zeros((dim, dim), dtype=complex if complex_needed else float)
    h[np.diag_indices(dim)] = 4.0 * ec * (n - cfg.n_g) ** 2
    for k in range(1, spec.k_max + 1):
        if k >= dim:
            break
        rows = np.arange(dim - k)
        upper = spec.c[k] / 2.0
        if complex_needed:
            upper = upper + 1j * spec.s[k] / 2.0
        h[rows, rows + k] += upper
        h[rows + k, rows] += np.conj(upper)
    return h


def _degeneracy_reorder(
    energies: np.ndarray, vectors: np.ndarray, n_cut: int
) -> tuple[np.ndarray, np.ndarray]:
    """Order states inside degenerate clusters by descending even weight."""
    order = np.arange(len(energies))
    start = 0
    even_mask = np.arange(-n_cut, n_cut + 1) % 2 == 0
    while start < len(energies):
        stop = start + 1
        while stop < len(energies) and energies[stop] - energies[stop - 1] < DEGENERACY_TOL:
            stop += 1
        if stop - start > 1:
            weights = [
                float(np.sum(np.abs(vectors[even_mask, i]) ** 2)) for i in order[start:stop]
            ]
            order[start:stop] = order[start:stop][np.argsort(weights)[::-1]]
        start = stop
    return energies[order], vectors[:, order]


def eigensolve(h: np.ndarray, n_levels: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowest eigenpairs of a Hermitian charge-basis matrix.

    Returns energies ascending and orthonormal eigenvectors as columns.
    States degenerate within 1e-9 GHz are ordered by descending
    even-charge weight so labeling stays deterministic.
    """
    dim = h.shape[0]
    if h.shape != (dim, dim):
        raise ValueError(f"expected a square matrix, got {h.shape}")
    if not 1 <= n_levels <= dim:
        raise ValueError(f"n_levels must be in [1, {dim}], got {n_levels}")
    try:
        energies, vectors = scipy.linalg.eigh(h, subset_by_index=(0, n_levels - 1))
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"dense Hermitian solve failed for dim={dim}: {exc}") from exc
    return _degeneracy_reorder(energies, vectors, (dim - 1) // 2)


def parse_transition_label(label: str) -> tuple[int, int, int]:
    """Split a transition label into (i, j, divisor).

    ``f01`` means the 0->1 frequency; ``f02/2`` the two-photon variant
    (E_2 - E_0)/2.
    """
    match = _LABEL_RE.match(label)
    if not match:
        raise ValueError(f"bad transition label {label!r}; expected e.g. 'f01' or 'f02/2'")
    i, j = int(match.group(1)), int(match.group(2))
    divisor = int(match.group(3)) if match.group(3) else 1
    if j <= i:
        raise ValueError(f"label {label!r} must have j > i")
    if divisor < 1:
        raise ValueError(f"label {label!r} has a zero divisor")
    return i, j, divisor


def transition_frequencies(energies: np.ndarray, labels: tuple[str, ...]) -> dict[str, float]:
    """Transition frequencies (GHz) for the requested labels."""
    out: dict[str, float] = {}
    for label in labels:
        i, j, divisor = parse_transition_label(label)
        if j >= len(energies):
            raise ValueError(f"label {label!r} needs level {j}, only {len(energies)} solved")
        out[label] = (float(energies[j]) - float(energies[i])) / divisor
    return out


def charge_matrix_element(vec_i: np.ndarray, vec_j: np.ndarray, n_g: float = 0.0) -> float:
    """``|<i| n - n_g |j>|`` in the charge basis (dimensionless)."""
    if vec_i.shape != vec_j.shape or vec_i.ndim != 1 or len(vec_i) % 2 == 0:
        raise ValueError("eigenvectors must be equal-length odd-dimension 1-d arrays")
    n_cut = (len(vec_i) - 1) // 2
    n = np.arange(-n_cut, n_cut + 1) - n_g
    return abs(complex(np.vdot(vec_i, n * vec_j)))


def parity_weights(vec: np.ndarray) -> ParityWeights:
    """Even/odd Cooper-pair-number weights of a normalized eigenvector."""
    vec = np.asarray(vec)
    if vec.ndim != 1 or len(vec) % 2 == 0:
        raise ValueError("expected an odd-dimension 1-d eigenvector")
    norm = float(np.sum(np.abs(vec) ** 2))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"eigenvector not normalized: |psi|^2 = {norm!r}")
    n_cut = (len(vec) - 1) // 2
    even_mask = np.arange(-n_cut, n_cut + 1) % 2 == 0
    even = float(np.sum(np.abs(vec[even_mask]) ** 2))
    return ParityWeights(even_weight=even, odd_weight=norm - even)


# ---------------------------------------------------------------------------
# flux sweeps


@dataclass
class TransitionTable:
    """Spectra tabulated on a flux grid.

    ``frequencies[label]`` and ``matrix_elements[(i, j)]`` are aligned
    with ``flux_radians``; failed points carry NaN rows.
    """

    flux_radians: np.ndarray
    energies: np.ndarray
    frequencies: dict[str, np.ndarray]
    matrix_elements: dict[tuple[int, int], np.ndarray]
    labels: tuple[str, ...]
    me_pairs: tuple[tuple[int, int], ...]
    failed: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def __post_init__(self) -> None:
        if self.failed.size == 0:
            self.failed = np.zeros(len(self.flux_radians), dtype=bool)

    @property
    def flux_phi0(self) -> np.ndarray:
        return self.flux_radians / (2.0 * math.pi)

    def to_csv(self, path: str) -> None:
        """CSV with flux in flux-quantum units, one column per label, then matrix elements."""
        header = ["flux_phi0"] + list(self.labels) + [f"n{i}{j}" for i, j in self.me_pairs]
        lines = [",".join(header)]
        for row in range(len(self.flux_radians)):
            cells = [f"{self.flux_phi0[row]:.12g}"]
            cells += [f"{self.frequencies[lab][row]:.12g}" for lab in self.labels]
            cells += [f"{self.matrix_elements[p][row]:.12g}" for p in self.me_pairs]
            lines.append(",".join(cells))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def _solve_point(
    u: np.ndarray,
    v: np.ndarray,
    phi_e: float,
    ec: float,
    cfg: ChargeBasisConfig,
    labels: tuple[str, ...],
    me_pairs: tuple[tuple[int, int], ...],
) -> tuple[np.ndarray, dict[str, float], dict[tuple[int, int], float]]:
    spec = combine_harmonics(u, v, FluxBias(phi_e))
    h = build_hamiltonian(spec, ec, cfg)
    energies, vectors = eigensolve(h, cfg.n_levels)
    freqs = transition_frequencies(energies, labels)
    mes = {
        (i, j): charge_matrix_element(vectors[:, i], vectors[:, j], cfg.n_g)
        for i, j in me_pairs
    }
    return energies, freqs, mes


def spectrum_vs_flux(
    params: CircuitParams,
    channels: NanowireChannels,
    flux_values: np.ndarray,
    cfg: ChargeBasisConfig,
    *,
    k_max: int = 10,
    include_bo: bool = True,
    labels: tuple[str, ...] = ("f01", "f12", "f02"),
    me_pairs: tuple[tuple[int, int], ...] = ((0, 1), (1, 2)),
    threads: int | None = None,
    strict: bool = False,
) -> TransitionTable:
    """Tabulate eigenenergies, transitions, and matrix elements over flux.

    The arm Fourier amplitudes are flux independent and computed once;
    each grid point only re-interferes them, rebuilds the matrix, and
    solves. Points are independent, so evaluation parallelizes across a
    thread pool (LAPACK releases the GIL) with results kept in grid
    order. A failed point raises when ``strict``, otherwise it logs a
    warning and leaves a NaN row.
    """
    flux_values = np.asarray(flux_values, dtype=float)
    u = fourier_u(params, k_max, include_bo=include_bo)
    v = fourier_v(channels, params.gap, k_max)
    n_points = len(flux_values)

    energies = np.full((n_points, cfg.n_levels), np.nan)
    freqs = {lab: np.full(n_points, np.nan) for lab in labels}
    mes = {pair: np.full(n_points, np.nan) for pair in me_pairs}
    failed = np.zeros(n_points, dtype=bool)

    def run(idx: int) -> None:
        try:
            e, f, m = _solve_point(u, v, flux_values[idx], params.ec, cfg, labels, me_pairs)
        except SolverError as exc:
            if strict:
                raise SolverError(
                    f"flux point {idx} (phi_e={flux_values[idx]!r}): {exc}"
                ) from exc
            logger.warning("flux point %d (phi_e=%g) failed: %s", idx, flux_values[idx], exc)
            failed[idx] = True
            return
        energies[idx] = e
        for lab in labels:
            freqs[lab][idx] = f[lab]
        for pair in me_pairs:
            mes[pair][idx] = m[pair]

    if threads is not None and threads > 1 and n_points > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(n_points)))
    else:
        for idx in range(n_points):
            run(idx)

    return TransitionTable(
        flux_radians=flux_values,
        energies=energies,
        frequencies=freqs,
        matrix_elements=mes,
        labels=tuple(labels),
        me_pairs=tuple(me_pairs),
        failed=failed,
    )
