"""Collective gate catalog: generator construction, per-block exponentials,
and application to block-diagonal states.

Every gate is K = exp(-i * angle * G) for a generator G built from the
collective operators:

    RX/RY/RZ(t)      G = J_x / J_y / J_z
    RN(t, phi)       G = -(J_x sin phi - J_y cos phi)   (rotation about the
                     in-plane axis n = (-sin phi, cos phi, 0), so RN(-t, phi)
                     turns the ground state into the coherent state |t, phi>)
    R_PLUS/R_MINUS(t)  G = J_+ / J_-  (non-Hermitian; see apply_gate)
    RX2/RY2/RZ2(t)   G = J_x^2 / J_y^2 / J_z^2
    OAT(t, a)        G = J_a^2,                a in {x, y, z}
    TAT(t, ab)       G = J_a^2 - J_b^2,        a, b in {x, y, z, plus, minus}
    TNT(t, L, ab)    G = J_a^2 - (N/L) J_b
    GMS(t, phi)      G = (J_x cos phi + J_y sin phi)^2

Hermitian generators are exponentiated by per-block eigendecomposition;
non-Hermitian ones (any gate touching J_+/J_-) go through scipy's Pade
scaling-and-squaring, and the conjugated state is renormalized to unit trace
and flagged ``conditional`` (the map is not trace preserving).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .dicke import (
    BlockLedger,
    CollectiveOperator,
    CollectiveState,
    build_ledger,
    op_jminus,
    op_jplus,
    op_jx,
    op_jy,
    op_jz,
)
from .errors import CircuitParseError, DomainError, NumericError

__all__ = [
    "GateSpec",
    "Circuit",
    "GATE_KINDS",
    "generator",
    "exponentiate",
    "apply_gate",
    "apply_circuit",
    "circuit_from_json",
    "circuit_to_json",
]

# kind -> (number of params, axes arity: 0, 1 or 2)
GATE_KINDS: dict[str, tuple[int, int]] = {
    "RX": (1, 0),
    "RY": (1, 0),
    "RZ": (1, 0),
    "RN": (2, 0),
    "R_PLUS": (1, 0),
    "R_MINUS": (1, 0),
    "RX2": (1, 0),
    "RY2": (1, 0),
    "RZ2": (1, 0),
    "OAT": (1, 1),
    "TAT": (1, 2),
    "TNT": (2, 2),
    "GMS": (2, 0),
}

_SINGLE_AXES = ("x", "y", "z")
_ALL_AXES = ("x", "y", "z", "plus", "minus")


def _parse_axes(text: str) -> tuple[str, ...]:
    """Tokenize an axis tag: 'zx', 'z,plus', 'z+', 'plusminus' all work."""
    tokens: list[str] = []
    for part in text.lower().split(","):
        part = part.strip()
        i = 0
        while i < len(part):
            if part.startswith("plus", i):
                tokens.append("plus")
                i += 4
            elif part.startswith("minus", i):
                tokens.append("minus")
                i += 5
            elif part[i] in "xyz":
                tokens.append(part[i])
                i += 1
            elif part[i] == "+":
                tokens.append("plus")
                i += 1
            elif part[i] == "-":
                tokens.append("minus")
                i += 1
            else:
                raise DomainError(f"unknown axis tag {text!r}")
    return tuple(tokens)


@dataclass(frozen=True)
class GateSpec:
    """One catalog gate: kind, parameters, optional axes and noise strength."""

    kind: str
    params: tuple[float, ...]
    axes: tuple[str, ...] | None = None
    noise: float | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in GATE_KINDS:
            raise DomainError(f"unknown gate kind {self.kind!r}")
        n_params, axes_arity = GATE_KINDS[kind]
        params = tuple(float(p) for p in self.params)
        if len(params) != n_params:
            raise DomainError(f"{kind} takes {n_params} parameter(s), got {len(params)}")
        axes = self.axes
        if isinstance(axes, str):
            axes = _parse_axes(axes)
        if axes_arity == 0:
            if axes:
                raise DomainError(f"{kind} takes no axes")
            axes = None
        else:
            if axes is None or len(axes) != axes_arity:
                raise DomainError(f"{kind} needs {axes_arity} axis tag(s)")
            allowed = _SINGLE_AXES if kind == "OAT" else _ALL_AXES
            for a in axes:
                if a not in allowed:
                    raise DomainError(f"{kind} axis must be one of {allowed}, got {a!r}")
        if kind == "TNT" and params[1] == 0.0:
            raise DomainError("TNT coupling must be nonzero")
        noise = self.noise
        if noise is not None:
            noise = float(noise)
            if not 0.0 <= noise <= 1.0:
                raise DomainError(f"noise must lie in [0, 1], got {noise}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "noise", noise)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list acting on an N-particle register."""

    n_particles: int
    instructions: tuple[GateSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))


def _sq(op):
    return op @ op


def _recipe(spec: GateSpec, n_particles: int) -> tuple[Callable, float, bool]:
    """(builder over an axis->operator map, gate angle, generator Hermitian?).

    Shared by the collective engine and the full-space oracle: the builder only
    uses +, -, scalar * and @, so it composes block operators and dense
    matrices alike.
    """
    kind, params, axes = spec.kind, spec.params, spec.axes
    if kind in ("RX", "RY", "RZ"):
        ax = kind[1].lower()
        return (lambda o: o[ax]), params[0], True
    if kind == "RN":
        theta, phi = params
        c, s = np.cos(phi), np.sin(phi)
        return (lambda o: o["y"] * c - o["x"] * s), theta, True
    if kind in ("R_PLUS", "R_MINUS"):
        ax = "plus" if kind == "R_PLUS" else "minus"
        return (lambda o: o[ax]), params[0], False
    if kind in ("RX2", "RY2", "RZ2"):
        ax = kind[1].lower()
        return (lambda o: _sq(o[ax])), params[0], True
    if kind == "OAT":
        ax = axes[0]
        return (lambda o: _sq(o[ax])), params[0], True
    if kind == "TAT":
        a, b = axes
        herm = a in _SINGLE_AXES and b in _SINGLE_AXES
        return (lambda o: _sq(o[a]) - _sq(o[b])), params[0], herm
    if kind == "TNT":
        theta, coupling = params
        a, b = axes
        herm = a in _SINGLE_AXES and b in _SINGLE_AXES
        w = n_particles / coupling
        return (lambda o: _sq(o[a]) - w * o[b]), theta, herm
    if kind == "GMS":
        theta, phi = params
        c, s = np.cos(phi), np.sin(phi)
        return (lambda o: _sq(o["x"] * c + o["y"] * s)), theta, True
    raise DomainError(f"unknown gate kind {kind!r}")


def generator(spec: GateSpec, ledger: BlockLedger) -> tuple[CollectiveOperator, float]:
    """Generator G and angle t with gate K = exp(-i t G)."""
    build, angle, herm = _recipe(spec, ledger.n_particles)
    ops = {
        "x": op_jx(ledger),
        "y": op_jy(ledger),
        "z": op_jz(ledger),
        "plus": op_jplus(ledger),
        "minus": op_jminus(ledger),
    }
    raw = build(ops)
    return CollectiveOperator(ledger, raw.blocks, hermitian=herm), angle


def _exp_block(g: np.ndarray, angle: float, hermitian: bool, j: float) -> np.ndarray:
    if hermitian:
        try:
            w, v = np.linalg.eigh(g)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"eigendecomposition failed in block j = {j}") from exc
        return (v * np.exp(-1j * angle * w)) @ v.conj().T
    return expm(-1j * angle * g)


def exponentiate(
    operator: CollectiveOperator, angle: float, js: tuple[float, ...] | None = None
) -> dict[float, np.ndarray]:
    """Per-block exp(-i * angle * G_j); restricted to blocks ``js`` if given."""
    if js is None:
        js = operator.ledger.js
    return {
        j: _exp_block(operator.block(j), angle, operator.hermitian, j) for j in js
    }


def apply_gate(state: CollectiveState, spec: GateSpec) -> CollectiveState:
    """rho -> K rho K^dag per active block, then the optional noise channel.

    Unitary gates leave the active block set unchanged; a noise step may
    activate neighboring blocks.  Non-Hermitian generators give a non-unitary
    K, so the result is renormalized to unit trace and flagged conditional.
    """
    gen, angle = generator(spec, state.ledger)
    kmats = exponentiate(gen, angle, js=state.active_js)
    blocks = {j: kmats[j] @ rho @ kmats[j].conj().T for j, rho in state.items()}
    conditional = state.conditional
    if not gen.hermitian:
        total = sum(np.trace(b).real for b in blocks.values())
        if not np.isfinite(total) or total <= 0.0:
            raise NumericError(f"{spec.kind} produced an unnormalizable state")
        blocks = {j: b / total for j, b in blocks.items()}
        conditional = True
    out = CollectiveState(state.ledger, blocks, conditional)
    if spec.noise is not None and spec.noise > 0.0:
        from .noise import depolarize

        out = depolarize(out, spec.noise)
    return out


def apply_circuit(circuit: Circuit, initial: CollectiveState) -> CollectiveState:
    """Left fold of apply_gate over the instruction list."""
    if initial.ledger.n_particles != circuit.n_particles:
        raise DomainError(
            f"circuit is for N = {circuit.n_particles}, "
            f"state has N = {initial.ledger.n_particles}"
        )
    state = initial
    for spec in circuit.instructions:
        state = apply_gate(state, spec)
    return state


def circuit_from_json(text: str) -> Circuit:
    """Parse {"n": int, "gates": [{"kind", "params", "axes"?, "noise"?}]}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise CircuitParseError("top level must be an object")
    try:
        n = doc["n"]
        gates = doc["gates"]
    except KeyError as exc:
        raise CircuitParseError(f"missing required key {exc.args[0]!r}") from None
    if not isinstance(n, int) or n < 1:
        raise CircuitParseError(f'"n" must be a positive integer, got {n!r}')
    if not isinstance(gates, list):
        raise CircuitParseError('"gates" must be a list')
    specs = []
    for pos, entry in enumerate(gates, start=1):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise CircuitParseError(f'gate #{pos} must be an object with a "kind"')
        params = entry.get("params", [])
        if not isinstance(params, list) or not all(
            isinstance(p, (int, float)) and not isinstance(p, bool) for p in params
        ):
            raise CircuitParseError(f'gate #{pos}: "params" must be a list of numbers')
        try:
            specs.append(
                GateSpec(
                    kind=str(entry["kind"]),
                    params=tuple(params),
                    axes=entry.get("axes"),
                    noise=entry.get("noise"),
                )
            )
        except DomainError as exc:
            raise CircuitParseError(f"gate #{pos}: {exc}") from None
    return Circuit(n_particles=n, instructions=tuple(specs))


def circuit_to_json(circuit: Circuit) -> str:
    gates = []
    for spec in circuit.instructions:
        entry: dict = {"kind": spec.kind, "params": list(spec.params)}
        if spec.axes:
            entry["axes"] = ",".join(spec.axes)
        if spec.noise is not None:
            entry["noise"] = spec.noise
        gates.append(entry)
    return json.dumps({"n": circuit.n_particles, "gates": gates}, indent=2)
