"""Thermal states of the engine and the which-side measurement."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from ..errors import DimensionMismatchError, LeakyProjectorError, TruncationError
from ..hilbert import DensityOperator, von_neumann_entropy
from ..tolerances import DEFAULT_TOLS, Tolerances
from .config import EngineConfig
from .spectrum import BoxSpectrum, SplitSpectrum

__all__ = [
    "MeasurementOutcome",
    "thermal_state",
    "z_boltzmann_gas",
    "split_partition_function",
    "barrier_thermal_state",
    "measure_side",
]


def thermal_state(spec: BoxSpectrum, temperature: float, kb: float = 1.0,
                  tols: Tolerances = DEFAULT_TOLS) -> tuple[DensityOperator, float]:
    """Gibbs state over the bare-box levels and its partition sum.

    Z is the direct sum of the retained Boltzmann weights.  The dropped
    tail is bounded by the Gaussian integral past the last level; if the
    bound is not below 1e-12 of Z the truncation is rejected.
    """
    beta = 1.0 / (kb * temperature)
    energies = spec.energies
    weights = np.exp(-beta * energies)
    z = float(np.sum(weights))
    n_last = spec.levels[-1][0]
    t = beta * spec.epsilon
    tail = 0.5 * math.sqrt(math.pi / t) * erfc(n_last * math.sqrt(t))
    if tail / z >= 1e-12:
        raise TruncationError(
            f"Boltzmann tail bound {tail / z:.3e} of Z exceeds 1e-12; raise n_trunc")
    rho = DensityOperator(np.diag(weights / z).astype(np.complex128), tols)
    return rho, z


def z_boltzmann_gas(eps_beta: float) -> float:
    """High-temperature closed form (pi / (eps*beta))^(1/2) / 2."""
    return 0.5 * math.sqrt(math.pi / eps_beta)


def split_partition_function(split: SplitSpectrum, beta: float) -> float:
    """Z of the doublet spectrum: sum over 2 exp(-beta E_k) cosh(beta Delta_k)."""
    e = split.centers()
    d = split.deltas()
    return float(np.sum(2.0 * np.exp(-beta * e) * np.cosh(beta * d)))


def barrier_thermal_state(split: SplitSpectrum, temperature: float,
                          basis: str = "energy", kb: float = 1.0,
                          tols: Tolerances = DEFAULT_TOLS) -> DensityOperator:
    """Gibbs state of the split box in the requested basis.

    basis "energy" orders each doublet as (psi+, psi-) with weights
    exp(-beta(E_k +- Delta_k))/Z.  basis "LR" carries cosh(beta Delta_k) on
    the diagonal and sinh(beta Delta_k) between L_k and R_k, the two being
    related by the exact doublet rotation; as Delta -> 0 the off-diagonal
    blocks vanish and the state commutes with the which-side projectors.
    """
    beta = 1.0 / (kb * temperature)
    e = split.centers()
    d = split.deltas()
    z = split_partition_function(split, beta)
    n = split.count
    if basis == "energy":
        diag = np.empty(2 * n)
        diag[0::2] = np.exp(-beta * (e + d))  # psi+ slots
        diag[1::2] = np.exp(-beta * (e - d))  # psi- slots
        matrix = np.diag(diag / z)
    elif basis == "LR":
        matrix = np.zeros((2 * n, 2 * n))
        for k in range(n):
            w = math.exp(-beta * e[k]) / z
            ch = w * math.cosh(beta * d[k])
            sh = w * math.sinh(beta * d[k])
            matrix[2 * k: 2 * k + 2, 2 * k: 2 * k + 2] = [[ch, sh], [sh, ch]]
    else:
        raise ValueError(f"unknown basis {basis!r}")
    return DensityOperator(matrix.astype(np.complex128), tols)


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    """One branch of the which-side measurement.

    post_state is None for an outcome that never occurs (probability below
    float resolution), where the conditional state is undefined.
    """

    side: str
    probability: float
    post_state: DensityOperator | None

    def entropy(self) -> float:
        if self.post_state is None:
            raise ValueError(f"outcome {self.side} has no post state (p = 0)")
        return von_neumann_entropy(self.post_state)


def measure_side(rho: DensityOperator, n_pairs: int | None = None,
                 cfg: EngineConfig | None = None,
                 leak_tol: float = 1e-6) -> tuple[MeasurementOutcome, MeasurementOutcome]:
    """Project a state in the L/R block layout onto left and right.

    The projectors sum |L_k><L_k| and |R_k><R_k| over the first n_pairs
    doublets (all of them by default, in which case they resolve the
    identity on the truncated space exactly).  When a config is supplied
    the doublet count must satisfy N^2 * eps * beta >= 20, the regime in
    which the projectors distinguish the sides.  Outcome probabilities are
    Tr(P rho P); post states are renormalized projections.
    """
    dim = rho.dim
    if dim % 2 != 0:
        raise DimensionMismatchError("L/R block layout needs an even dimension")
    total_pairs = dim // 2
    if n_pairs is None:
        n_pairs = total_pairs
    if not 1 <= n_pairs <= total_pairs:
        raise DimensionMismatchError(
            f"n_pairs must lie in 1..{total_pairs}, got {n_pairs}")
    if cfg is not None and n_pairs**2 * cfg.eps_beta < 20.0:
        raise ValueError(
            f"projector rank {n_pairs} violates N^2*eps*beta >= 20 "
            f"(got {n_pairs**2 * cfg.eps_beta:.3g})")

    left_idx = np.arange(0, 2 * n_pairs, 2)
    right_idx = np.arange(1, 2 * n_pairs, 2)
    covered = float(np.sum(np.real(np.diagonal(rho.matrix)[: 2 * n_pairs])))
    if covered < 1.0 - leak_tol:
        raise LeakyProjectorError(
            f"projectors cover only {covered:.9f} of the state; increase n_pairs")

    def project(idx: np.ndarray, side: str) -> MeasurementOutcome:
        p = float(np.sum(np.real(np.diagonal(rho.matrix)[idx])))
        if p < 1e-15:
            return MeasurementOutcome(side, p, None)
        post = np.zeros_like(rho.matrix)
        post[np.ix_(idx, idx)] = rho.matrix[np.ix_(idx, idx)]
        post = post / p
        return MeasurementOutcome(side, p, DensityOperator(post, rho.tols))

    return project(left_idx, "L"), project(right_idx, "R")
