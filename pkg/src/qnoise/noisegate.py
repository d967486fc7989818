"""Stochastic gate construction on the (system x ancilla) space.

One time step of the open dynamics is realized by the random unitary

    N(dt) = U(dt) * prod_k exp(sqrt(gamma_k) S_k(dt)),

where S_k is a matrix-valued Ito integral of the interaction-picture
coupling J_k(s) = kron(L_k(s), sigma+) - kron(L_k(s)^dag, sigma-)
against a Wiener path, sampled on an M-node left-endpoint grid.  The
ancilla is the last tensor factor, so a full index decomposes as
sys*2 + anc.

`expected_channel` evaluates the noise-average of the gate conjugation
(after tracing the ancilla) deterministically, on the same grid.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .model import SIGMA_MINUS, SIGMA_PLUS, LindbladModel, total_hamiltonian

TROTTER_MODES = ("exact", "order-1", "order-2")


def closed_propagator(model: LindbladModel, t: float, trotter: str = "exact") -> np.ndarray:
    """Closed-system propagator over duration t on the system space.

    `exact` exponentiates the full Hamiltonian; `order-1` and `order-2`
    are first-order and symmetric Trotter-Suzuki products over the
    Hamiltonian terms.
    """
    d = model.dim
    if trotter not in TROTTER_MODES:
        raise ValueError(f"unknown trotter mode {trotter!r}, expected one of {TROTTER_MODES}")
    if not model.hamiltonian_terms or t == 0.0:
        return np.eye(d, dtype=complex)
    if trotter == "exact":
        return linalg.matexp(-1j * t * total_hamiltonian(model))
    factors = [linalg.matexp(-1j * t * term.matrix()) for term in model.hamiltonian_terms]
    if trotter == "order-1":
        u = np.eye(d, dtype=complex)
        for f in factors:
            u = f @ u
        return u
    # order-2: symmetric product with half-steps
    halves = [linalg.matexp(-0.5j * t * term.matrix()) for term in model.hamiltonian_terms]
    u = np.eye(d, dtype=complex)
    for f in halves:
        u = f @ u
    for f in reversed(halves):
        u = f @ u
    return u


def interaction_picture_L(
    model: LindbladModel, k: int, s: float, trotter: str = "exact"
) -> np.ndarray:
    """L_k conjugated into the interaction picture: U(s)^dag L_k U(s)."""
    u = closed_propagator(model, s, trotter)
    return u.conj().T @ model.lindblad_terms[k].operator @ u


def coupling_operator(L_s: np.ndarray) -> np.ndarray:
    """J(s) = kron(L(s), sigma+) - kron(L(s)^dag, sigma-); anti-Hermitian."""
    return linalg.kron(L_s, SIGMA_PLUS) - linalg.kron(L_s.conj().T, SIGMA_MINUS)


@dataclass(frozen=True)
class NoiseGatePlan:
    """Per-step precomputation shared by all trajectories.

    j_nodes[k] has shape (M+1, 2d, 2d): the coupling operator J_k
    tabulated at nodes s_r = r*dt/M, r = 0..M.  The sampler and the
    expected channel both use the left endpoints r = 0..M-1.
    """

    dt: float
    trotter: str
    m_nodes: int                       # M
    nodes: np.ndarray                  # (M+1,) times in [0, dt]
    rates: np.ndarray                  # (K,) gamma_k
    j_nodes: tuple[np.ndarray, ...]    # K stacks, each (M+1, 2d, 2d)
    u_full: np.ndarray                 # kron(U(dt), I_2), shape (2d, 2d)
    system_dim: int

    @property
    def n_channels(self) -> int:
        return len(self.rates)


def build_plan(
    model: LindbladModel, dt: float, trotter: str = "exact", M: int = 8
) -> NoiseGatePlan:
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    nodes = np.linspace(0.0, dt, M + 1)
    # One propagator per node, reused across all Lindblad channels.
    props = [closed_propagator(model, s, trotter) for s in nodes]
    j_nodes = []
    for term in model.lindblad_terms:
        stack = np.empty((M + 1, 2 * model.dim, 2 * model.dim), dtype=complex)
        for r, u in enumerate(props):
            stack[r] = coupling_operator(u.conj().T @ term.operator @ u)
        j_nodes.append(stack)
    u_full = linalg.kron(closed_propagator(model, dt, trotter), np.eye(2))
    return NoiseGatePlan(
        dt=dt,
        trotter=trotter,
        m_nodes=M,
        nodes=nodes,
        rates=np.array([t.rate for t in model.lindblad_terms]),
        j_nodes=tuple(j_nodes),
        u_full=u_full,
        system_dim=model.dim,
    )


def sample_increments(plan: NoiseGatePlan, rng: np.random.Generator, size=()) -> np.ndarray:
    """Wiener increments dW_r ~ Normal(0, dt/M), shape size + (K, M)."""
    shape = tuple(size) + (plan.n_channels, plan.m_nodes)
    return rng.normal(0.0, np.sqrt(plan.dt / plan.m_nodes), size=shape)


def sample_Sk(plan: NoiseGatePlan, k: int, rng: np.random.Generator) -> np.ndarray:
    """One draw of the Ito integral S_k = sum_r J_k(s_r) dW_r."""
    dw = rng.normal(0.0, np.sqrt(plan.dt / plan.m_nodes), size=plan.m_nodes)
    return np.einsum("m,mij->ij", dw, plan.j_nodes[k][: plan.m_nodes])


def gates_from_increments(plan: NoiseGatePlan, increments: np.ndarray) -> np.ndarray:
    """Batched gate assembly from pre-drawn increments.

    increments has shape (..., K, M); the result is a (..., 2d, 2d)
    stack of unitaries U(dt) * prod_k exp(sqrt(gamma_k) S_k), with the
    product taken in ascending channel index.
    """
    increments = np.asarray(increments)
    batch = increments.shape[:-2]
    d2 = 2 * plan.system_dim
    gate = np.broadcast_to(plan.u_full, batch + (d2, d2)).copy()
    for k in range(plan.n_channels):
        if plan.rates[k] == 0.0:
            continue
        s_k = np.einsum(
            "...m,mij->...ij", increments[..., k, :], plan.j_nodes[k][: plan.m_nodes]
        )
        gate = gate @ linalg.matexp_antihermitian(np.sqrt(plan.rates[k]) * s_k)
    return gate


@dataclass(frozen=True)
class NoiseGateRealization:
    matrix: np.ndarray       # (2d, 2d) unitary
    increments: np.ndarray   # (K, M) Wiener increments that produced it


def sample_gate(
    plan: NoiseGatePlan, model: LindbladModel, rng: np.random.Generator
) -> NoiseGateRealization:
    """Draw one stochastic gate N(dt); increments are kept for audit."""
    dw = sample_increments(plan, rng)
    return NoiseGateRealization(matrix=gates_from_increments(plan, dw), increments=dw)


def dissipator_integral(
    model: LindbladModel, dt: float, trotter: str = "exact", M: int = 8
) -> list[tuple[float, np.ndarray]]:
    """(weight, L_k(s_r)) pairs realizing int_0^dt D(s) ds on the grid."""
    h = dt / M
    out = []
    props = [closed_propagator(model, r * h, trotter) for r in range(M)]
    for term in model.lindblad_terms:
        if term.rate == 0.0:
            continue
        for u in props:
            out.append((term.rate * h, u.conj().T @ term.operator @ u))
    return out


def expected_channel(
    model: LindbladModel, dt: float, trotter: str = "exact", M: int = 8
) -> Callable[[np.ndarray], np.ndarray]:
    """Deterministic noise-average of the gate: rho -> U(rho + int D(s) rho ds) U^dag.

    The integral uses the same M-node left-endpoint grid as the sampler,
    so the channel is exactly the mean of the sampled conjugations to
    O((gamma dt)^2).
    """
    pieces = dissipator_integral(model, dt, trotter, M)
    u = closed_propagator(model, dt, trotter)

    def channel(rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        acc = rho.copy()
        for w, L in pieces:
            LdL = L.conj().T @ L
            acc += w * (L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL))
        return u @ acc @ u.conj().T

    return channel
