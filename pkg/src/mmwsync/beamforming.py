"""Analog beam codebooks, block-diagonal subarray precoding, composite beams.

Each RF chain drives a contiguous subarray of ``n_a`` elements through one
codeword; transmitting a common signal on all chains synthesizes a composite
effective beam whose gain toward a direction is the sum of per-subarray inner
products against the matching blocks of the transmit steering vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Codebook:
    """Set of unit-per-element-power analog codewords (rows)."""

    codewords: np.ndarray  # (n_beam, n_a)
    oversampling: int
    kind: str = "dft"

    @property
    def n_beam(self) -> int:
        return self.codewords.shape[0]

    @property
    def n_a(self) -> int:
        return self.codewords.shape[1]


def dft_codebook(n_a: int, oversampling: int) -> Codebook:
    """Oversampled DFT codebook: codeword q element a is exp(-j*2*pi*a*q/n_beam)/sqrt(n_a)."""
    if n_a < 1 or oversampling < 1:
        raise ValueError("n_a and oversampling must be >= 1")
    n_beam = n_a * oversampling
    a = np.arange(n_a)[None, :]
    q = np.arange(n_beam)[:, None]
    cw = np.exp(-2j * np.pi * a * q / n_beam) / np.sqrt(n_a)
    return Codebook(codewords=cw, oversampling=oversampling)


@dataclass(frozen=True)
class BeamSet:
    """Ordered selection of one codeword per RF chain."""

    codebook: Codebook
    indices: tuple[int, ...]

    def __post_init__(self):
        if len(self.indices) < 1:
            raise ValueError("beam set must hold at least one codeword")
        if any(not 0 <= i < self.codebook.n_beam for i in self.indices):
            raise ValueError("codeword index out of range")

    @property
    def n_rf(self) -> int:
        return len(self.indices)

    @property
    def vectors(self) -> np.ndarray:
        """(n_rf, n_a) stacked codewords."""
        return self.codebook.codewords[list(self.indices)]


@dataclass(frozen=True)
class PrecodingMatrix:
    """Block-diagonal analog precoder, one codeword per subarray column."""

    matrix: np.ndarray  # (n_rf * n_a, n_rf)
    n_a: int
    n_rf: int


def composite_beam_gain(beam_set: BeamSet, tx_steering: np.ndarray, n_a: int | None = None) -> complex:
    """Sum of per-subarray inner products conj(a_tx)[block_j] . p_j.

    ``tx_steering`` must have length n_rf * n_a; block j covers elements
    j*n_a .. (j+1)*n_a - 1.
    """
    if n_a is None:
        n_a = beam_set.codebook.n_a
    n_rf = beam_set.n_rf
    tx_steering = np.asarray(tx_steering)
    if tx_steering.shape[0] != n_rf * n_a:
        raise ValueError(
            f"steering length {tx_steering.shape[0]} != n_rf*n_a = {n_rf * n_a}"
        )
    blocks = np.conj(tx_steering).reshape(n_rf, n_a)
    return complex(np.sum(blocks * beam_set.vectors))


def assemble_precoder(beam_set: BeamSet) -> PrecodingMatrix:
    """Place codeword j on the j-th diagonal block; off-block entries exactly zero."""
    n_rf, n_a = beam_set.n_rf, beam_set.codebook.n_a
    p = np.zeros((n_rf * n_a, n_rf), dtype=np.complex128)
    vecs = beam_set.vectors
    for j in range(n_rf):
        p[j * n_a : (j + 1) * n_a, j] = vecs[j]
    return PrecodingMatrix(matrix=p, n_a=n_a, n_rf=n_rf)


def effective_tx_vector(beam_set: BeamSet) -> np.ndarray:
    """Common-signal transmit vector P @ 1 / sqrt(n_rf); unit total power."""
    p = assemble_precoder(beam_set)
    return p.matrix.sum(axis=1) / np.sqrt(beam_set.n_rf)
