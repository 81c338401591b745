"""Dense complex linear algebra for small Hilbert spaces.

Everything here works on plain ``numpy`` arrays: operators are square
complex matrices, states are complex unit vectors.  The module provides
the handful of constructions the measurement protocols need -- tensor
products, expectation values, the two-element projective decomposition of
an involutory observable, controlled unitaries built from a projective
partition of the control space, and completeness checking for measurement
operator sets.

Qubit 0 is always the leftmost tensor factor and the most significant
index bit, so ``tensor(a, b)`` places ``a`` outermost.

All operator identities are verified with absolute entrywise tolerance
``ATOL`` (1e-12); matrices never exceed 64x64 here, so accumulated
floating-point error stays orders of magnitude below that.
"""

from __future__ import annotations

import math
import os
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ATOL",
    "I2",
    "X",
    "Y",
    "Z",
    "max_tensor_dim",
    "dag",
    "is_hermitian",
    "is_unitary",
    "basis",
    "ket_plus",
    "bell_singlet",
    "ghz_state",
    "projector",
    "tensor",
    "expectation",
    "Pvm",
    "involutory_pvm",
    "MeasurementOperatorSet",
    "check_completeness",
    "controlled_unitary",
]

#: Absolute entrywise tolerance for every operator identity in the package.
ATOL = 1e-12

_DEFAULT_MAX_DIM = 2**12

#: Environment variable overriding the tensor-product dimension cap.
MAX_DIM_ENV = "TYPICALITY_LAB_MAX_DIM"


def max_tensor_dim() -> int:
    """Largest total dimension ``tensor`` will produce (default 4096)."""
    raw = os.environ.get(MAX_DIM_ENV)
    if raw is None or not raw.strip():
        return _DEFAULT_MAX_DIM
    value = int(raw)
    if value < 1:
        raise ValueError(f"{MAX_DIM_ENV} must be a positive integer, got {raw!r}")
    return value


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_operator(a) -> np.ndarray:
    """Coerce to a square, finite complex matrix (read-only copy)."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        raise ValueError("operator must be non-empty")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("operator entries must be finite")
    return _frozen(m)


def as_state(v) -> np.ndarray:
    """Coerce to a finite complex unit vector (read-only copy)."""
    s = np.array(v, dtype=complex).reshape(-1)
    if s.size == 0:
        raise ValueError("state vector must be non-empty")
    if not np.all(np.isfinite(s.real)) or not np.all(np.isfinite(s.imag)):
        raise ValueError("state amplitudes must be finite")
    norm = float(np.linalg.norm(s))
    if abs(norm - 1.0) > ATOL:
        raise ValueError(f"state vector must have unit norm, got {norm!r}")
    return _frozen(s)


I2 = as_operator(np.eye(2))
X = as_operator([[0, 1], [1, 0]])
Y = as_operator([[0, -1j], [1j, 0]])
Z = as_operator([[1, 0], [0, -1]])


def dag(a: np.ndarray) -> np.ndarray:
    """Adjoint (conjugate transpose)."""
    return np.asarray(a).conj().T


def is_hermitian(a: np.ndarray, atol: float = ATOL) -> bool:
    a = np.asarray(a)
    return bool(np.abs(a - dag(a)).max() <= atol)


def is_unitary(a: np.ndarray, atol: float = ATOL) -> bool:
    a = np.asarray(a)
    eye = np.eye(a.shape[0])
    return bool(
        np.abs(dag(a) @ a - eye).max() <= atol
        and np.abs(a @ dag(a) - eye).max() <= atol
    )


def basis(dim: int, index: int) -> np.ndarray:
    """Computational basis vector |index> in a dim-dimensional space."""
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return _frozen(v)


def ket_plus() -> np.ndarray:
    """The single-qubit state (|0> + |1>) / sqrt(2)."""
    return as_state([1 / math.sqrt(2), 1 / math.sqrt(2)])


def bell_singlet() -> np.ndarray:
    """The two-qubit singlet (|01> - |10>) / sqrt(2)."""
    v = np.zeros(4, dtype=complex)
    v[1] = 1 / math.sqrt(2)
    v[2] = -1 / math.sqrt(2)
    return _frozen(v)


def ghz_state() -> np.ndarray:
    """The three-qubit state (|000> - |111>) / sqrt(2)."""
    v = np.zeros(8, dtype=complex)
    v[0] = 1 / math.sqrt(2)
    v[7] = -1 / math.sqrt(2)
    return _frozen(v)


def projector(v) -> np.ndarray:
    """Rank-one projector |v><v| onto a unit vector."""
    s = as_state(v)
    return _frozen(np.outer(s, s.conj()))


def _tensor_kind(x: np.ndarray) -> str:
    if x.ndim == 1:
        return "state"
    if x.ndim == 2:
        return "operator"
    raise ValueError(f"tensor factors must be vectors or matrices, got ndim={x.ndim}")


def tensor(*factors) -> np.ndarray:
    """Kronecker product of operators, or of state vectors.

    The left factor is outermost: the result index is
    ``index_left * dim_right + index_right``.  Mixing operators and
    states in one call is an error, as is exceeding the configured
    dimension cap (``max_tensor_dim()``).
    """
    if len(factors) < 2:
        raise ValueError("tensor requires at least two factors")
    arrays = [np.asarray(f, dtype=complex) for f in factors]
    kinds = {_tensor_kind(a) for a in arrays}
    if len(kinds) != 1:
        raise ValueError("tensor factors must all be operators or all be states")
    total = 1
    for a in arrays:
        total *= a.shape[0]
    cap = max_tensor_dim()
    if total > cap:
        raise ValueError(
            f"tensor product dimension {total} exceeds cap {cap} "
            f"(override with {MAX_DIM_ENV})"
        )
    out = arrays[0]
    for a in arrays[1:]:
        out = np.kron(out, a)
    return _frozen(out)


def expectation(state, op) -> float:
    """Expectation value <psi|A|psi> of a Hermitian operator.

    The imaginary part must vanish to within ``ATOL``; it is checked and
    then discarded.
    """
    psi = as_state(state)
    a = np.asarray(op, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expectation requires a square operator")
    if a.shape[0] != psi.size:
        raise ValueError(
            f"dimension mismatch: state dim {psi.size}, operator dim {a.shape[0]}"
        )
    if not is_hermitian(a):
        raise ValueError("expectation requires a Hermitian operator")
    value = complex(psi.conj() @ (a @ psi))
    if abs(value.imag) > ATOL:
        raise ValueError(f"expectation value has non-negligible imaginary part {value.imag!r}")
    return value.real


class Pvm:
    """A projection-valued measure: labelled, mutually orthogonal projectors summing to identity.

    Validates, to within ``ATOL``: each element Hermitian, ``P_a P_b =
    delta_ab P_a``, and ``sum_a P_a = I``.
    """

    def __init__(self, elements: Iterable[tuple[object, np.ndarray]]):
        pairs = [(label, as_operator(p)) for label, p in elements]
        if not pairs:
            raise ValueError("a PVM needs at least one projector")
        labels = [label for label, _ in pairs]
        if len(set(labels)) != len(labels):
            raise ValueError("PVM labels must be distinct")
        dim = pairs[0][1].shape[0]
        for label, p in pairs:
            if p.shape[0] != dim:
                raise ValueError("PVM projectors must share one dimension")
            if not is_hermitian(p):
                raise ValueError(f"PVM element {label!r} is not Hermitian")
        for i, (la, pa) in enumerate(pairs):
            for lb, pb in pairs[i:]:
                target = pa if la == lb else 0.0
                if np.abs(pa @ pb - target).max() > ATOL:
                    raise ValueError(
                        f"PVM elements {la!r}, {lb!r} violate orthogonal idempotence"
                    )
        total = sum(p for _, p in pairs)
        if np.abs(total - np.eye(dim)).max() > ATOL:
            raise ValueError("PVM projectors do not sum to the identity")
        self._elements = tuple(pairs)
        self._dim = dim

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self._elements)

    @property
    def projectors(self) -> tuple[np.ndarray, ...]:
        return tuple(p for _, p in self._elements)

    def projector_for(self, label) -> np.ndarray:
        for lab, p in self._elements:
            if lab == label:
                return p
        raise KeyError(label)

    def __iter__(self):
        return iter(self._elements)

    def __len__(self) -> int:
        return len(self._elements)

    def __repr__(self) -> str:
        return f"Pvm(dim={self._dim}, labels={list(self.labels)!r})"


def involutory_pvm(obs) -> Pvm:
    """Two-element PVM ``{+1: (I+A)/2, -1: (I-A)/2}`` of a Hermitian involution.

    Requires ``A`` Hermitian with ``A @ A = I`` to within ``ATOL``; the
    returned projectors satisfy ``E+ - E- = A`` by construction.
    """
    a = as_operator(obs)
    if not is_hermitian(a):
        raise ValueError("observable must be Hermitian")
    eye = np.eye(a.shape[0])
    if np.abs(a @ a - eye).max() > ATOL:
        raise ValueError("observable must square to the identity (eigenvalues +/-1)")
    plus = (eye + a) / 2
    minus = (eye - a) / 2
    return Pvm([(+1, plus), (-1, minus)])


def check_completeness(elements) -> float:
    """Max-abs deviation of ``sum_m M_m^dag M_m`` from the identity.

    Accepts a :class:`MeasurementOperatorSet` or an iterable of
    ``(label, operator)`` pairs.  Callers enforce the tolerance.
    """
    if isinstance(elements, MeasurementOperatorSet):
        pairs = list(elements)
    else:
        pairs = [(label, as_operator(m)) for label, m in elements]
    if not pairs:
        raise ValueError("measurement operator set is empty")
    dim = pairs[0][1].shape[0]
    total = np.zeros((dim, dim), dtype=complex)
    for _, m in pairs:
        if m.shape[0] != dim:
            raise ValueError("measurement operators must share one dimension")
        total += dag(m) @ m
    return float(np.abs(total - np.eye(dim)).max())


class MeasurementOperatorSet:
    """Labelled measurement operators ``{M_m}`` satisfying the completeness equation.

    Construction verifies ``sum_m M_m^dag M_m = I`` to within ``ATOL``.
    """

    def __init__(self, elements: Iterable[tuple[object, np.ndarray]]):
        pairs = [(label, as_operator(m)) for label, m in elements]
        if not pairs:
            raise ValueError("measurement operator set is empty")
        labels = [label for label, _ in pairs]
        if len(set(labels)) != len(labels):
            raise ValueError("measurement operator labels must be distinct")
        dim = pairs[0][1].shape[0]
        for _, m in pairs:
            if m.shape[0] != dim:
                raise ValueError("measurement operators must share one dimension")
        self._elements = tuple(pairs)
        self._dim = dim
        defect = check_completeness(pairs)
        if defect > ATOL:
            raise ValueError(
                f"completeness equation violated: max deviation {defect:.3e} > {ATOL}"
            )

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self._elements)

    @property
    def operators(self) -> tuple[np.ndarray, ...]:
        return tuple(m for _, m in self._elements)

    def operator_for(self, label) -> np.ndarray:
        for lab, m in self._elements:
            if lab == label:
                return m
        raise KeyError(label)

    def outcome_probabilities(self, state) -> dict:
        """Born-rule weights ``<psi|M^dag M|psi>`` for every label."""
        psi = as_state(state)
        if psi.size != self._dim:
            raise ValueError(
                f"state dim {psi.size} does not match operator dim {self._dim}"
            )
        probs = {}
        for label, m in self._elements:
            w = m @ psi
            probs[label] = float(np.real(w.conj() @ w))
        return probs

    def __iter__(self):
        return iter(self._elements)

    def __len__(self) -> int:
        return len(self._elements)

    def __repr__(self) -> str:
        return f"MeasurementOperatorSet(dim={self._dim}, size={len(self._elements)})"


def controlled_unitary(branches: Sequence[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """Unitary ``sum_n U_n (x) P_n`` from unitaries and a projective partition.

    ``branches`` is a sequence of ``(unitary, projector)`` pairs: the
    unitaries share one dimension and the projectors must form a PVM on
    their own (control) space.  The control space is the right tensor
    factor, so for any ``|phi>`` with ``P_n|phi> = |phi>``,
    ``U(|theta> (x) |phi>) = (U_n|theta>) (x) |phi>``.
    """
    if not branches:
        raise ValueError("controlled_unitary requires at least one branch")
    unitaries = [as_operator(u) for u, _ in branches]
    projectors = [as_operator(p) for _, p in branches]
    udim = unitaries[0].shape[0]
    for u in unitaries:
        if u.shape[0] != udim:
            raise ValueError("branch unitaries must share one dimension")
        if not is_unitary(u):
            raise ValueError("branch operator is not unitary")
    Pvm(list(enumerate(projectors)))  # raises unless the projectors form a PVM
    out = sum(tensor(u, p) for u, p in zip(unitaries, projectors))
    return _frozen(out)
