"""Anchor-direction grids and exhaustive codebook selection.

Each synchronization time-slot is represented by one anchor direction; the
slot's beams are chosen by maximizing the worst-case SQNR lower bound at that
anchor, either over single full-array codewords or over all per-subarray
codeword combinations (exact enumeration, no pruning).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .beamforming import BeamSet, Codebook, composite_beam_gain
from .channel import ArrayGeometry, steering_vector
from .sqnr import sqnr_lower_bound_single


@dataclass(frozen=True)
class SectorRanges:
    """Angular coverage in radians; ``elevation`` of None means azimuth-only."""

    azimuth: tuple[float, float] = (-math.pi / 3, math.pi / 3)
    elevation: tuple[float, float] | None = (-math.pi / 4, math.pi / 4)

    def __post_init__(self):
        if self.azimuth[0] >= self.azimuth[1]:
            raise ValueError("empty azimuth sector")
        if self.elevation is not None and self.elevation[0] >= self.elevation[1]:
            raise ValueError("empty elevation sector")


@dataclass(frozen=True)
class AnchorGrid:
    """One anchor (azimuth, elevation) per synchronization time-slot."""

    t_bs: int
    anchors: np.ndarray  # (t_bs, 2)
    grid_shape: tuple[int, int]


@dataclass(frozen=True)
class BoundParams:
    """Worst-case parameters of the selection objective.

    ``lambda_max`` is the worst-case inverse SNR (linear), ``xi_max`` the
    worst-case quantization MSE.  ``noise_var`` defaults to 1 so the bound is
    evaluated in noise-normalized units.
    """

    lambda_max: float
    xi_max: float
    noise_var: float = 1.0


@dataclass(frozen=True)
class BeamSelection:
    """Chosen codeword indices for one slot plus search bookkeeping."""

    indices: tuple[int, ...]
    objective: float
    iteration_count: int
    anchor: tuple[float, float]


def _slice_centers(lo: float, hi: float, n: int) -> np.ndarray:
    """Centers of n equal slices of [lo, hi]; n = 1 gives the sector center."""
    edges = np.linspace(lo, hi, n + 1)
    return 0.5 * (edges[:-1] + edges[1:])


def _factor_grid(t_bs: int) -> tuple[int, int]:
    """Split t_bs as n_az * n_el with n_el the largest divisor <= sqrt(t_bs)."""
    n_el = 1
    for d in range(int(math.isqrt(t_bs)), 0, -1):
        if t_bs % d == 0:
            n_el = d
            break
    return t_bs // n_el, n_el


def build_anchor_grid(t_bs: int, sector: SectorRanges) -> AnchorGrid:
    """Uniform slice-center lattice over the sector, azimuth-major ordering."""
    if t_bs < 1:
        raise ValueError("t_bs must be >= 1")
    if sector.elevation is None:
        n_az, n_el = t_bs, 1
        el = np.zeros(1)
    else:
        n_az, n_el = _factor_grid(t_bs)
        el = _slice_centers(*sector.elevation, n_el)
    az = _slice_centers(*sector.azimuth, n_az)
    anchors = np.array([(a, e) for a in az for e in el])
    return AnchorGrid(t_bs=t_bs, anchors=anchors, grid_shape=(n_az, n_el))


def select_single_beam(
    codebook: Codebook,
    geometry: ArrayGeometry,
    anchor: tuple[float, float],
    bound: BoundParams,
) -> BeamSelection:
    """Best single full-array codeword at the anchor under the bound objective.

    Ties resolve to the lowest codeword index; iteration count is the
    codebook size.
    """
    if codebook.n_beam < 1:
        raise ValueError("empty codebook")
    a_tx = steering_vector(geometry, anchor[0], anchor[1])
    gains = np.abs(np.conj(a_tx) @ codebook.codewords.T) ** 2
    objectives = sqnr_lower_bound_single(gains, bound.lambda_max, bound.xi_max, bound.noise_var)
    best = int(np.argmax(objectives))
    return BeamSelection(
        indices=(best,),
        objective=float(objectives[best]),
        iteration_count=codebook.n_beam,
        anchor=tuple(anchor),
    )


def select_multi_beam(
    codebook: Codebook,
    n_rf: int,
    geometry: ArrayGeometry,
    anchor: tuple[float, float],
    bound: BoundParams,
    budget: int = 2**20,
) -> BeamSelection:
    """Exhaustive search over all (n_beam)^n_rf per-subarray codeword tuples.

    The objective is the worst-case bound evaluated on the composite gain
    |h|^2 of each candidate set; ties resolve to the lexicographically
    smallest index tuple.
    """
    n_beam = codebook.n_beam
    iterations = n_beam**n_rf
    if iterations > budget:
        raise ValueError(
            f"exhaustive search needs (n_beam)^n_rf = {n_beam}^{n_rf} = {iterations} "
            f"iterations, above the configured budget {budget}"
        )
    a_tx = steering_vector(geometry, anchor[0], anchor[1])
    if a_tx.shape[0] != n_rf * codebook.n_a:
        raise ValueError(
            f"geometry has {a_tx.shape[0]} elements, need n_rf*n_a = {n_rf * codebook.n_a}"
        )
    blocks = np.conj(a_tx).reshape(n_rf, codebook.n_a)
    c = blocks @ codebook.codewords.T  # (n_rf, n_beam) per-subarray gains
    # candidate tuple (q_0..q_{n_rf-1}) maps to C-order flat index with q_0 most
    # significant, so first-occurrence argmax is the lexicographically smallest tie
    h = reduce(np.add.outer, c)
    objectives = sqnr_lower_bound_single(
        np.abs(h) ** 2, bound.lambda_max, bound.xi_max, bound.noise_var
    )
    flat = int(np.argmax(objectives))
    indices = tuple(int(i) for i in np.unravel_index(flat, (n_beam,) * n_rf))
    # store the objective as the scalar re-evaluation of the chosen set
    beam_set = BeamSet(codebook=codebook, indices=indices)
    gain = abs(composite_beam_gain(beam_set, a_tx)) ** 2
    objective = sqnr_lower_bound_single(gain, bound.lambda_max, bound.xi_max, bound.noise_var)
    return BeamSelection(
        indices=indices,
        objective=float(objective),
        iteration_count=iterations,
        anchor=tuple(anchor),
    )


def selection_beam_set(selection: BeamSelection, codebook: Codebook) -> BeamSet:
    return BeamSet(codebook=codebook, indices=selection.indices)


@dataclass(frozen=True)
class ComplexityReport:
    """Operation counts for the beam search and the UE correlator."""

    bs_iterations_single_stream: int
    bs_iterations_multi_beam: int
    ue_complex_multiplications: int
    ue_complex_additions: int


def complexity_report(
    t_bs: int,
    n_beam: int,
    n_rf: int,
    n_triggers: int,
    n: int,
    t_ue: int,
    m_tot: int,
) -> ComplexityReport:
    """Search iteration counts and per-synchronization-period UE operation counts.

    BS: n_triggers * t_bs * n_beam single-stream iterations versus
    n_triggers * t_bs * n_beam^n_rf for the multi-beam search.  UE: the
    sliding correlation costs m_tot * n * (n+1) * (t_ue-1) complex multiplies
    and m_tot * n * (n-1) * (t_ue-1) complex additions, independent of the
    transmit-side method.
    """
    if min(t_bs, n_beam, n_rf, n_triggers, n, t_ue, m_tot) < 1:
        raise ValueError("all complexity inputs must be positive")
    return ComplexityReport(
        bs_iterations_single_stream=n_triggers * t_bs * n_beam,
        bs_iterations_multi_beam=n_triggers * t_bs * n_beam**n_rf,
        ue_complex_multiplications=m_tot * n * (n + 1) * (t_ue - 1),
        ue_complex_additions=m_tot * n * (n - 1) * (t_ue - 1),
    )
