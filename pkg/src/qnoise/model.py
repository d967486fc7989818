"""Lindblad problem description: Hamiltonian terms, dissipator terms, locality.

Units: model files carry SI pairs (seconds for times, rad/s for
frequencies, 1/s for rates).  Internally hbar = 1, so only the
dimensionless products omega*dt and gamma*dt matter; dimensionless
models simply use rate/frequency values with an implied unit time scale.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import linalg

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)   # |1><0|
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


class ModelParseError(ValueError):
    """Model document rejected; ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, e.g. 'XY' on two qubits."""

    letters: str

    def __post_init__(self):
        if not self.letters or any(c not in PAULI for c in self.letters):
            raise ValueError(f"invalid Pauli string {self.letters!r}")

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return sum(1 for c in self.letters if c != "I")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.letters) if c != "I")

    def matrix(self) -> np.ndarray:
        m = np.array([[1.0]], dtype=complex)
        for c in self.letters:
            m = np.kron(m, PAULI[c])
        return m


@dataclass(frozen=True)
class HamiltonianTerm:
    coefficient: float          # rad/s
    operator: np.ndarray        # dimensionless Hermitian operator
    locality: int
    label: str = ""

    def __post_init__(self):
        if not linalg.is_hermitian(self.operator, 1e-12):
            raise ValueError(f"Hamiltonian term {self.label!r} is not Hermitian")

    def matrix(self) -> np.ndarray:
        return self.coefficient * self.operator


@dataclass(frozen=True)
class LindbladTerm:
    rate: float                 # 1/s
    operator: np.ndarray
    locality: int
    support: tuple[int, ...] = ()
    label: str = ""

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"Lindblad term {self.label!r} has negative rate {self.rate}")


@dataclass(frozen=True)
class LindbladModel:
    n: int
    hamiltonian_terms: tuple[HamiltonianTerm, ...]
    lindblad_terms: tuple[LindbladTerm, ...]
    # hbar is fixed to 1; frequencies are absorbed into coefficients.

    def __post_init__(self):
        d = self.dim
        for t in self.hamiltonian_terms:
            if t.operator.shape != (d, d):
                raise ValueError(f"Hamiltonian term {t.label!r} has wrong dimension")
        for t in self.lindblad_terms:
            if t.operator.shape != (d, d):
                raise ValueError(f"Lindblad term {t.label!r} has wrong dimension")

    @property
    def dim(self) -> int:
        return 2 ** self.n

    def dissipator_supports(self) -> set[tuple[int, ...]]:
        """Distinct qubit supports among the dissipator terms."""
        supports = set()
        for t in self.lindblad_terms:
            supports.add(t.support if t.support else tuple(range(self.n)))
        return supports

    @property
    def k_local(self) -> int:
        """Number of distinct m-qubit supports among dissipator terms (K)."""
        return len(self.dissipator_supports())

    @property
    def max_locality(self) -> int:
        """Largest dissipator locality m."""
        if not self.lindblad_terms:
            return 0
        return max(t.locality for t in self.lindblad_terms)


def total_hamiltonian(model: LindbladModel) -> np.ndarray:
    h = np.zeros((model.dim, model.dim), dtype=complex)
    for t in model.hamiltonian_terms:
        h += t.matrix()
    return h


def dissipator(model: LindbladModel, rho: np.ndarray) -> np.ndarray:
    """Action of the dissipator sum_k gamma_k (L rho L^dag - 1/2 {L^dag L, rho})."""
    out = np.zeros_like(rho, dtype=complex)
    for t in model.lindblad_terms:
        if t.rate == 0.0:
            continue
        L = t.operator
        LdL = L.conj().T @ L
        out += t.rate * (L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL))
    return out


def liouvillian(model: LindbladModel) -> np.ndarray:
    """Superoperator matrix acting on column-vectorized density matrices."""
    d = model.dim
    eye = np.eye(d, dtype=complex)
    h = total_hamiltonian(model)
    gen = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for t in model.lindblad_terms:
        if t.rate == 0.0:
            continue
        L = t.operator
        LdL = L.conj().T @ L
        gen += t.rate * (
            np.kron(L.conj(), L)
            - 0.5 * np.kron(eye, LdL)
            - 0.5 * np.kron(LdL.T, eye)
        )
    return gen


def k_local_count(n: int, m: int) -> int:
    """Number of m-qubit supports among n qubits, C(n, m)."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    return math.comb(n, m)


# ---------------------------------------------------------------------------
# Model files
#
# JSON schema:
#   {
#     "n": <int>,
#     "hamiltonian": [ {"pauli": "X", "coeff": 1.0, "label": "..."} |
#                      {"matrix": [[[re, im], ...], ...], "coeff": 1.0,
#                       "support": [0, 1]} , ... ],
#     "lindblad":    [ {"pauli": "Z", "rate": 0.1} |
#                      {"matrix": ..., "rate": 0.1, "support": [0]} , ... ],
#     "units": {"time": "s", "rate": "1/s"}          # optional, fixed values
#   }
# ---------------------------------------------------------------------------


def _parse_complex_matrix(obj, path: str, dim: int) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelParseError(path, f"not a numeric array: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ModelParseError(
            path, f"expected a square matrix of [re, im] pairs, got shape {arr.shape}"
        )
    if arr.shape[0] != dim:
        raise ModelParseError(path, f"matrix dim {arr.shape[0]} != model dim {dim}")
    return arr[..., 0] + 1j * arr[..., 1]


def _matrix_to_json(m: np.ndarray) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _parse_operator(entry: dict, path: str, n: int) -> tuple[np.ndarray, int, tuple[int, ...]]:
    if "pauli" in entry and "matrix" in entry:
        raise ModelParseError(path, "give either 'pauli' or 'matrix', not both")
    if "pauli" in entry:
        letters = entry["pauli"]
        if not isinstance(letters, str) or len(letters) != n:
            raise ModelParseError(
                f"{path}.pauli", f"expected a string of {n} Pauli letters, got {letters!r}"
            )
        try:
            ps = PauliString(letters)
        except ValueError as exc:
            raise ModelParseError(f"{path}.pauli", str(exc)) from None
        return ps.matrix(), max(ps.weight, 1), ps.support or (0,)
    if "matrix" in entry:
        op = _parse_complex_matrix(entry["matrix"], f"{path}.matrix", 2 ** n)
        support = entry.get("support")
        if support is not None:
            if not isinstance(support, list) or not all(
                isinstance(q, int) and 0 <= q < n for q in support
            ):
                raise ModelParseError(f"{path}.support", f"invalid qubit list {support!r}")
            support = tuple(sorted(support))
        else:
            support = tuple(range(n))
        return op, len(support), support
    raise ModelParseError(path, "missing operator: need 'pauli' or 'matrix'")


def load_model(source) -> LindbladModel:
    """Build a LindbladModel from a JSON document, file path, or dict."""
    if isinstance(source, (str, Path)):
        try:
            doc = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ModelParseError("<document>", f"invalid JSON: {exc}") from None
    else:
        doc = source
    if not isinstance(doc, dict):
        raise ModelParseError("<document>", "model document must be a JSON object")

    n = doc.get("n")
    if not isinstance(n, int) or n < 1:
        raise ModelParseError("n", f"expected a positive integer, got {n!r}")

    units = doc.get("units")
    if units is not None and units != {"time": "s", "rate": "1/s"}:
        raise ModelParseError("units", f'only {{"time": "s", "rate": "1/s"}} is supported, got {units!r}')

    h_terms = []
    for i, entry in enumerate(doc.get("hamiltonian", [])):
        path = f"hamiltonian[{i}]"
        if not isinstance(entry, dict):
            raise ModelParseError(path, "expected an object")
        coeff = entry.get("coeff")
        if not isinstance(coeff, (int, float)):
            raise ModelParseError(f"{path}.coeff", f"expected a number, got {coeff!r}")
        op, locality, _ = _parse_operator(entry, path, n)
        try:
            h_terms.append(
                HamiltonianTerm(float(coeff), op, locality, entry.get("label", f"H{i}"))
            )
        except ValueError as exc:
            raise ModelParseError(path, str(exc)) from None

    l_terms = []
    for i, entry in enumerate(doc.get("lindblad", [])):
        path = f"lindblad[{i}]"
        if not isinstance(entry, dict):
            raise ModelParseError(path, "expected an object")
        rate = entry.get("rate")
        if not isinstance(rate, (int, float)) or rate < 0:
            raise ModelParseError(f"{path}.rate", f"expected a number >= 0, got {rate!r}")
        op, locality, support = _parse_operator(entry, path, n)
        l_terms.append(
            LindbladTerm(float(rate), op, locality, support, entry.get("label", f"L{i}"))
        )

    return LindbladModel(n, tuple(h_terms), tuple(l_terms))


def model_to_json(model: LindbladModel) -> dict:
    """Inverse of load_model, used to echo configs into result metadata."""
    return {
        "n": model.n,
        "hamiltonian": [
            {"matrix": _matrix_to_json(t.operator), "coeff": t.coefficient, "label": t.label}
            for t in model.hamiltonian_terms
        ],
        "lindblad": [
            {
                "matrix": _matrix_to_json(t.operator),
                "rate": t.rate,
                "support": list(t.support),
                "label": t.label,
            }
            for t in model.lindblad_terms
        ],
        "units": {"time": "s", "rate": "1/s"},
    }
