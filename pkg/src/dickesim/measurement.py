"""Dicke-basis measurement: probabilities, shot sampling, expectation values
and Husimi grids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import parallel_map
from .dicke import (
    CollectiveOperator,
    CollectiveState,
    css_amplitudes,
    op_jminus,
    op_jplus,
    op_jx,
    op_jy,
    op_jz,
)
from .errors import DomainError, NumericError

__all__ = [
    "ProbTable",
    "ShotCounts",
    "OBSERVABLES",
    "probabilities",
    "sample",
    "expval",
    "husimi_grid",
    "prob_table_csv",
    "shot_counts_csv",
    "husimi_csv",
]

_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class ProbTable:
    """P(j, m) rows in ledger order (descending j, then descending m)."""

    entries: tuple[tuple[float, float, float], ...]

    def total(self) -> float:
        return float(sum(p for _, _, p in self.entries))

    def as_dict(self) -> dict[tuple[float, float], float]:
        return {(j, m): p for j, m, p in self.entries}


@dataclass(frozen=True)
class ShotCounts:
    shots: int
    counts: dict[tuple[float, float], int]
    seed: int


def probabilities(state: CollectiveState) -> ProbTable:
    """Block diagonals as exact outcome probabilities; inactive blocks are
    omitted, tiny negative floating-point residue is clamped to zero."""
    entries = []
    for j, rho in state.items():
        diag = rho.diagonal().real
        if diag.min() < -_CLAMP_TOL:
            raise NumericError(
                f"negative probability {diag.min():.3e} in block j = {j}"
            )
        ms = state.ledger.m_values(j)
        for m, p in zip(ms, np.maximum(diag, 0.0)):
            entries.append((j, float(m), float(p)))
    return ProbTable(tuple(entries))


def sample(state: CollectiveState, shots: int, seed: int) -> ShotCounts:
    """Inverse-CDF sampling over the probability table, seeded and
    deterministic (PCG64)."""
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    table = probabilities(state)
    p = np.array([row[2] for row in table.entries])
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    idx = np.searchsorted(cdf, rng.random(shots), side="right")
    idx = np.minimum(idx, len(p) - 1)
    hits = np.bincount(idx, minlength=len(p))
    counts = {
        (j, m): int(c) for (j, m, _), c in zip(table.entries, hits)
    }
    return ShotCounts(shots=shots, counts=counts, seed=seed)


def _square(builder):
    return lambda ledger: builder(ledger).square()


OBSERVABLES = {
    "Jx": op_jx,
    "Jy": op_jy,
    "Jz": op_jz,
    "J_plus": op_jplus,
    "J_minus": op_jminus,
    "Jx2": _square(op_jx),
    "Jy2": _square(op_jy),
    "Jz2": _square(op_jz),
    "J_plus2": _square(op_jplus),
    "J_minus2": _square(op_jminus),
}

_HERMITIAN_OBS = {"Jx", "Jy", "Jz", "Jx2", "Jy2", "Jz2"}


def expval(state: CollectiveState, observable: str) -> complex | float:
    """<O> = sum_j tr(rho_j O_j); real (asserted) for Hermitian observables."""
    try:
        builder = OBSERVABLES[observable]
    except KeyError:
        raise DomainError(
            f"unknown observable {observable!r}; choose from {sorted(OBSERVABLES)}"
        ) from None
    op: CollectiveOperator = builder(state.ledger)
    value = op.expectation(state)
    if observable in _HERMITIAN_OBS:
        # an algebra bug gives an O(1) residue; accumulated roundoff from a
        # deep circuit with renormalized conditional branches can reach ~1e-10
        assert abs(value.imag) < 1e-8, f"<{observable}> has imaginary residue {value.imag}"
        return float(value.real)
    return value


def husimi_grid(
    state: CollectiveState,
    theta_points: np.ndarray,
    phi_points: np.ndarray,
    workers: int = 1,
) -> np.ndarray:
    """Q(theta, phi) = sum_j <theta,phi; j| rho_j |theta,phi; j> over active
    blocks, with |theta,phi; j> the spin-j coherent state.  Returns a grid of
    shape (len(theta_points), len(phi_points)) with values in [0, 1]."""
    thetas = np.atleast_1d(np.asarray(theta_points, dtype=float))
    phis = np.atleast_1d(np.asarray(phi_points, dtype=float))
    if thetas.size == 0 or phis.size == 0:
        raise DomainError("husimi grid axes must be nonempty")
    blocks = list(state.items())

    def row(theta: float) -> np.ndarray:
        q = np.zeros(phis.size)
        for j, rho in blocks:
            twoj = int(round(2 * j))
            radial = css_amplitudes(twoj, theta, 0.0).real
            k = np.arange(twoj + 1)  # j - m
            # Coherent amplitudes factorize over phi: c_m = r_m(theta) e^{+i phi (j-m)}.
            # The +i phase labels grid points by the physical Bloch direction, so a
            # state whose mean spin points along (theta0, phi0) peaks at that cell.
            v = radial[:, None] * np.exp(1j * np.outer(k, phis))
            q += np.einsum("ip,ij,jp->p", v.conj(), rho, v).real
        return q

    grid = np.array(parallel_map(row, list(thetas), workers))
    if grid.min() < -1e-10:
        raise NumericError(f"husimi value {grid.min()} below zero; state not PSD")
    return np.clip(grid, 0.0, 1.0)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def prob_table_csv(table: ProbTable) -> str:
    lines = ["j,m,p"]
    lines += [f"{_fmt(j)},{_fmt(m)},{_fmt(p)}" for j, m, p in table.entries]
    return "\n".join(lines) + "\n"


def shot_counts_csv(counts: ShotCounts) -> str:
    lines = ["j,m,count"]
    lines += [f"{_fmt(j)},{_fmt(m)},{c}" for (j, m), c in counts.counts.items()]
    return "\n".join(lines) + "\n"


def husimi_csv(thetas: np.ndarray, phis: np.ndarray, grid: np.ndarray) -> str:
    lines = ["theta,phi,q"]
    for it, theta in enumerate(thetas):
        for ip, phi in enumerate(phis):
            lines.append(f"{_fmt(theta)},{_fmt(phi)},{_fmt(grid[it, ip])}")
    return "\n".join(lines) + "\n"
