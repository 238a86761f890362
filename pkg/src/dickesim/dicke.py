"""Collective Hilbert space for N two-level particles.

An ensemble of N spin-1/2 particles restricted to collective (permutation
symmetric) processes decomposes into irreducible blocks labelled by the total
angular momentum j, with j running from N/2 down to 0 (even N) or 1/2 (odd N)
in unit steps.  Each block is a (2j+1)-dimensional spin-j space appearing with
multiplicity d_N^j; the multiplicity copies are never told apart by collective
dynamics, so they are folded into effective amplitudes and only the counts are
stored.  A state is then a block-diagonal density matrix rho = (+)_j rho_j of
total side (N+2)^2/4 (even N) or (N+3)(N+1)/4 (odd N) instead of 2^N.

Conventions used throughout:

* within a block, rows/columns are ordered by m descending (j, j-1, ..., -j),
  so the fully excited state sits at the top-left of the j = N/2 block and the
  ground state at the bottom-right;
* block matrices are immutable (read-only numpy arrays); every operation
  returns fresh objects, so values are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

__all__ = [
    "Block",
    "BlockLedger",
    "CollectiveOperator",
    "CollectiveState",
    "degeneracy",
    "build_ledger",
    "collective_dimension",
    "op_jz",
    "op_jplus",
    "op_jminus",
    "op_jx",
    "op_jy",
    "ground_state",
    "excited_state",
    "ghz_state",
    "css_state",
    "css_amplitudes",
]


def _twoj(j: float) -> int:
    """Validate that j is a half-integer and return 2j as an exact int."""
    twoj = 2.0 * j
    if twoj < 0 or twoj != round(twoj):
        raise DomainError(f"j = {j} is not a nonnegative half-integer")
    return int(round(twoj))


def degeneracy(n_particles: int, j: float) -> int:
    """Multiplicity d_N^j of the spin-j block for N particles.

    Computed exactly in integer arithmetic as N!(2j+1) / [(N/2-j)! (N/2+j+1)!];
    the factorial ratio overflows 64-bit floats at modest N, so no
    floating-point intermediate is ever formed.
    """
    n = int(n_particles)
    if n < 1:
        raise DomainError(f"need at least one particle, got {n_particles}")
    twoj = _twoj(j)
    if twoj > n or (n - twoj) % 2 != 0:
        raise DomainError(f"j = {j} is not a valid block label for N = {n}")
    a = (n - twoj) // 2          # N/2 - j
    b = (n + twoj) // 2 + 1      # N/2 + j + 1
    num = factorial(n) * (twoj + 1)
    den = factorial(a) * factorial(b)
    if num % den:
        raise DomainError(f"degeneracy({n}, {j}) is not an integer")
    return num // den


@dataclass(frozen=True)
class Block:
    """One spin-j block: side 2j+1, multiplicity d_N^j, offset in the
    concatenated block-diagonal ordering."""

    j: float
    dim: int
    degeneracy: int
    offset: int


@dataclass(frozen=True)
class BlockLedger:
    """Ordered block structure of the collective space for N particles.

    Blocks are ordered by descending j from N/2 down to 0 or 1/2.
    """

    n_particles: int
    blocks: tuple[Block, ...]

    @property
    def j_max(self) -> float:
        return self.blocks[0].j

    @property
    def j_min(self) -> float:
        return self.blocks[-1].j

    @property
    def dim(self) -> int:
        """Total collective dimension, sum of block sides."""
        last = self.blocks[-1]
        return last.offset + last.dim

    @property
    def js(self) -> tuple[float, ...]:
        return tuple(b.j for b in self.blocks)

    def block_index(self, j: float) -> int:
        """Position of block j in the descending-j ordering."""
        idx = int(round(self.j_max - j))
        if not 0 <= idx < len(self.blocks) or self.blocks[idx].j != j:
            raise DomainError(f"no block j = {j} for N = {self.n_particles}")
        return idx

    def has_block(self, j: float) -> bool:
        idx = int(round(self.j_max - j))
        return 0 <= idx < len(self.blocks) and self.blocks[idx].j == j

    def m_values(self, j: float) -> np.ndarray:
        """m labels of block j in storage (descending) order."""
        return j - np.arange(self.blocks[self.block_index(j)].dim)


@lru_cache(maxsize=64)
def build_ledger(n_particles: int) -> BlockLedger:
    """Build the block ledger for N particles (N >= 1)."""
    n = int(n_particles)
    if n < 1:
        raise DomainError(f"need at least one particle, got {n_particles}")
    blocks = []
    offset = 0
    for twoj in range(n, n % 2 - 1, -2):
        j = twoj / 2.0
        dim = twoj + 1
        blocks.append(Block(j=j, dim=dim, degeneracy=degeneracy(n, j), offset=offset))
        offset += dim
    return BlockLedger(n_particles=n, blocks=tuple(blocks))


def collective_dimension(n_particles: int) -> int:
    """Sum of block sides: (N+2)^2/4 for even N, (N+3)(N+1)/4 for odd N."""
    return build_ledger(n_particles).dim


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=complex)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class CollectiveOperator:
    """Block-diagonal operator (+)_j O_j; one matrix per ledger block."""

    ledger: BlockLedger
    blocks: tuple[np.ndarray, ...]
    hermitian: bool

    def block(self, j: float) -> np.ndarray:
        return self.blocks[self.ledger.block_index(j)]

    def _binary(self, other: "CollectiveOperator", fn, hermitian: bool) -> "CollectiveOperator":
        if other.ledger != self.ledger:
            raise DomainError("operator ledgers differ")
        mats = tuple(_freeze(fn(a, b)) for a, b in zip(self.blocks, other.blocks))
        return CollectiveOperator(self.ledger, mats, hermitian)

    def __add__(self, other: "CollectiveOperator") -> "CollectiveOperator":
        return self._binary(other, np.add, self.hermitian and other.hermitian)

    def __sub__(self, other: "CollectiveOperator") -> "CollectiveOperator":
        return self._binary(other, np.subtract, self.hermitian and other.hermitian)

    def __matmul__(self, other: "CollectiveOperator") -> "CollectiveOperator":
        # A @ B is Hermitian only in special cases the caller must assert.
        return self._binary(other, np.matmul, False)

    def __mul__(self, scalar: complex) -> "CollectiveOperator":
        herm = self.hermitian and complex(scalar).imag == 0.0
        return CollectiveOperator(
            self.ledger, tuple(_freeze(scalar * b) for b in self.blocks), herm
        )

    __rmul__ = __mul__

    def __neg__(self) -> "CollectiveOperator":
        return self * (-1.0)

    def square(self) -> "CollectiveOperator":
        """A @ A, Hermitian whenever A is."""
        mats = tuple(_freeze(b @ b) for b in self.blocks)
        return CollectiveOperator(self.ledger, mats, self.hermitian)

    def dagger(self) -> "CollectiveOperator":
        mats = tuple(_freeze(b.conj().T) for b in self.blocks)
        return CollectiveOperator(self.ledger, mats, self.hermitian)

    def expectation(self, state: "CollectiveState") -> complex:
        """tr(rho O), summed over the state's active blocks."""
        total = 0.0 + 0.0j
        for j, rho in state.items():
            total += np.trace(rho @ self.block(j))
        return complex(total)


class CollectiveState:
    """Block-diagonal density matrix with lazy block activation.

    Only blocks that carry weight are stored; absent blocks are exactly zero.
    ``conditional`` marks states that went through a non-unitary ladder gate
    (R_plus / R_minus) and were renormalized, i.e. post-selected evolution.
    """

    __slots__ = ("ledger", "_blocks", "conditional")

    def __init__(
        self,
        ledger: BlockLedger,
        blocks: Mapping[float, np.ndarray],
        conditional: bool = False,
    ):
        by_index: dict[int, np.ndarray] = {}
        for j, mat in blocks.items():
            idx = ledger.block_index(j)
            mat = np.asarray(mat, dtype=complex)
            want = ledger.blocks[idx].dim
            if mat.shape != (want, want):
                raise DomainError(
                    f"block j = {j} must be {want}x{want}, got {mat.shape}"
                )
            by_index[idx] = _freeze(mat)
        self.ledger = ledger
        self._blocks = {idx: by_index[idx] for idx in sorted(by_index)}
        self.conditional = bool(conditional)

    @property
    def n_particles(self) -> int:
        return self.ledger.n_particles

    @property
    def active_js(self) -> tuple[float, ...]:
        return tuple(self.ledger.blocks[i].j for i in self._blocks)

    def block(self, j: float) -> np.ndarray | None:
        return self._blocks.get(self.ledger.block_index(j))

    def items(self) -> Iterable[tuple[float, np.ndarray]]:
        """(j, rho_j) pairs in descending-j order."""
        for idx, mat in self._blocks.items():
            yield self.ledger.blocks[idx].j, mat

    def trace(self) -> float:
        return float(sum(np.trace(m).real for m in self._blocks.values()))

    def to_dense(self) -> np.ndarray:
        """Full collective-dimension matrix, blocks on the diagonal."""
        out = np.zeros((self.ledger.dim, self.ledger.dim), dtype=complex)
        for idx, mat in self._blocks.items():
            b = self.ledger.blocks[idx]
            out[b.offset : b.offset + b.dim, b.offset : b.offset + b.dim] = mat
        return out


def _ladder_elements(j: float) -> np.ndarray:
    """sqrt((j-m)(j+m+1)) for the raising transitions m -> m+1, evaluated at
    the source m = j-1, ..., -j (storage indices 1..2j)."""
    m = j - np.arange(1, _twoj(j) + 1)
    return np.sqrt((j - m) * (j + m + 1))


@lru_cache(maxsize=32)
def op_jz(ledger: BlockLedger) -> CollectiveOperator:
    """J_z: diagonal m per block (storage order is m descending)."""
    mats = tuple(
        _freeze(np.diag(ledger.m_values(b.j).astype(complex))) for b in ledger.blocks
    )
    return CollectiveOperator(ledger, mats, hermitian=True)


@lru_cache(maxsize=32)
def op_jplus(ledger: BlockLedger) -> CollectiveOperator:
    """J_+: raises m by one, coefficient sqrt((j-m)(j+m+1))."""
    mats = []
    for b in ledger.blocks:
        mat = np.zeros((b.dim, b.dim), dtype=complex)
        if b.dim > 1:
            elems = _ladder_elements(b.j)
            mat[np.arange(b.dim - 1), np.arange(1, b.dim)] = elems
        mats.append(_freeze(mat))
    return CollectiveOperator(ledger, tuple(mats), hermitian=False)


@lru_cache(maxsize=32)
def op_jminus(ledger: BlockLedger) -> CollectiveOperator:
    return op_jplus(ledger).dagger()


@lru_cache(maxsize=32)
def op_jx(ledger: BlockLedger) -> CollectiveOperator:
    op = (op_jplus(ledger) + op_jminus(ledger)) * 0.5
    return CollectiveOperator(ledger, op.blocks, hermitian=True)


@lru_cache(maxsize=32)
def op_jy(ledger: BlockLedger) -> CollectiveOperator:
    op = (op_jplus(ledger) - op_jminus(ledger)) * (-0.5j)
    return CollectiveOperator(ledger, op.blocks, hermitian=True)


def _pure_top_block_state(n_particles: int, amplitudes: np.ndarray) -> CollectiveState:
    ledger = build_ledger(n_particles)
    amp = np.asarray(amplitudes, dtype=complex)
    return CollectiveState(ledger, {ledger.j_max: np.outer(amp, amp.conj())})


def ground_state(n_particles: int) -> CollectiveState:
    """|N/2, -N/2>: all particles down; bottom-right of the j = N/2 block."""
    amp = np.zeros(n_particles + 1)
    amp[-1] = 1.0
    return _pure_top_block_state(n_particles, amp)


def excited_state(n_particles: int) -> CollectiveState:
    """|N/2, +N/2>: all particles up."""
    amp = np.zeros(n_particles + 1)
    amp[0] = 1.0
    return _pure_top_block_state(n_particles, amp)


def ghz_state(n_particles: int) -> CollectiveState:
    """(|N/2, N/2> + |N/2, -N/2>) / sqrt(2)."""
    amp = np.zeros(n_particles + 1)
    amp[0] = amp[-1] = 1.0 / np.sqrt(2.0)
    return _pure_top_block_state(n_particles, amp)


def css_amplitudes(twoj: int, theta: float, phi: float) -> np.ndarray:
    """Spin-j coherent state amplitudes over m = j, j-1, ..., -j.

    c_m = sqrt(C(2j, j+m)) cos(theta/2)^(j+m) (sin(theta/2) e^{-i phi})^(j-m),
    evaluated in log space so binomials stay finite up to very large j.
    """
    j = twoj / 2.0
    m = j - np.arange(twoj + 1)
    kc = np.rint(j + m).astype(int)  # cos-half exponent
    ks = np.rint(j - m).astype(int)  # sin-half exponent
    ln_binom = gammaln(twoj + 1) - gammaln(kc + 1) - gammaln(ks + 1)
    ch = np.cos(theta / 2.0)
    sh = np.sin(theta / 2.0)
    ln_mag = 0.5 * ln_binom
    alive = np.ones(twoj + 1, dtype=bool)
    for base, expo in ((ch, kc), (sh, ks)):
        if base == 0.0:
            alive &= expo == 0  # 0^0 = 1, 0^k = 0
        else:
            ln_mag = ln_mag + expo * np.log(base)
    amp = np.where(alive, np.exp(ln_mag), 0.0) * np.exp(-1j * phi * ks)
    return amp / np.linalg.norm(amp)


def css_state(n_particles: int, theta: float, phi: float) -> CollectiveState:
    """Coherent spin state |theta, phi>: all spins aligned along the
    (theta, phi) direction; a binomial superposition in the j = N/2 block."""
    if not 0.0 <= theta <= np.pi:
        raise DomainError(f"theta must be in [0, pi], got {theta}")
    if not 0.0 <= phi < 2.0 * np.pi:
        raise DomainError(f"phi must be in [0, 2*pi), got {phi}")
    n = int(n_particles)
    if n < 1:
        raise DomainError(f"need at least one particle, got {n_particles}")
    return _pure_top_block_state(n, css_amplitudes(n, theta, phi))
