"""Finite matrix representations of the generalized ladder algebra.

The member of index ``n`` acts on the kets ``|0>, ..., |n-1>``.  Operators are
dense ``n x n`` float arrays in that orthonormal basis, kets are length-``n``
float vectors.  ``n = 2`` is the fermion algebra; the commutator ``[e, e+]``
tends to the identity of the boson algebra as ``n`` grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_EXACT_ORDER",
    "DEFAULT_TOL",
    "DimensionError",
    "Check",
    "VerificationReport",
    "check_order",
    "annihilator",
    "creator",
    "number_operator",
    "identity",
    "projector",
    "basis_ket",
    "commutator",
    "anticommutator",
    "defining_rhs_direct",
    "defining_rhs_stable",
    "apply_op",
    "vacuum_ladder_amplitude",
    "max_deviation",
    "verify_relations",
]

# 17! < 2**53 and 18 * 17! still fits a signed 64-bit integer.
MAX_EXACT_ORDER = 18
DEFAULT_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when operands act on ket spaces of different size."""


def check_order(n: int) -> int:
    """Validate an algebra index and return it as a plain int."""
    if isinstance(n, bool) or int(n) != n:
        raise TypeError(f"algebra order must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise ValueError(f"algebra order must be >= 1, got {n}")
    return n


def annihilator(n: int) -> np.ndarray:
    """Lowering operator: ``e|k> = sqrt(k) |k-1>``.

    Entry ``(k-1, k)`` holds ``sqrt(k)``; every other entry is zero, so the
    ``n``-th power vanishes identically.
    """
    n = check_order(n)
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1)


def creator(n: int) -> np.ndarray:
    """Raising operator ``e+``, the transpose of :func:`annihilator`."""
    return annihilator(n).T.copy()


def number_operator(n: int) -> np.ndarray:
    """``e+ e``, which is ``diag(0, 1, ..., n-1)``."""
    return creator(n) @ annihilator(n)


def identity(n: int) -> np.ndarray:
    return np.eye(check_order(n))


def projector(k: int, n: int) -> np.ndarray:
    """``|k><k|`` on the ``n``-state space."""
    n = check_order(n)
    if not 0 <= k < n:
        raise ValueError(f"state index {k} outside 0..{n - 1}")
    p = np.zeros((n, n))
    p[k, k] = 1.0
    return p


def basis_ket(k: int, n: int) -> np.ndarray:
    n = check_order(n)
    if not 0 <= k < n:
        raise ValueError(f"state index {k} outside 0..{n - 1}")
    v = np.zeros(n)
    v[k] = 1.0
    return v


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"operator must be square, got shape {a.shape}")
    if a.shape != b.shape:
        raise DimensionError(f"incompatible operands: {a.shape} vs {b.shape}")


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``AB - BA``."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    _same_shape(a, b)
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``AB + BA``."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    _same_shape(a, b)
    return a @ b + b @ a


def defining_rhs_direct(n: int) -> np.ndarray:
    """``1 - n/(n-1)! e+^(n-1) e^(n-1)`` built from explicit matrix powers.

    The scalar is applied after the operator product is formed.  Only
    available for ``n <= MAX_EXACT_ORDER``; use :func:`defining_rhs_stable`
    beyond that.
    """
    n = check_order(n)
    if n > MAX_EXACT_ORDER:
        raise ValueError(
            f"n={n} exceeds the exact factorial range (n <= {MAX_EXACT_ORDER}); "
            "use defining_rhs_stable instead"
        )
    a, c = annihilator(n), creator(n)
    prod = np.linalg.matrix_power(c, n - 1) @ np.linalg.matrix_power(a, n - 1)
    scale = n / math.factorial(n - 1)
    return np.eye(n) - scale * prod


def defining_rhs_stable(n: int) -> np.ndarray:
    """Factorial-free form ``1 - n |n-1><n-1|`` of the defining right side.

    Uses ``e+^(n-1) e^(n-1) = (n-1)! |n-1><n-1|``, so it is valid for any n.
    """
    n = check_order(n)
    return np.eye(n) - n * projector(n - 1, n)


def apply_op(m: np.ndarray, ket: np.ndarray) -> np.ndarray:
    m, ket = np.asarray(m, dtype=float), np.asarray(ket, dtype=float)
    if m.ndim != 2 or ket.ndim != 1 or m.shape[1] != ket.shape[0]:
        raise DimensionError(f"cannot apply {m.shape} operator to ket of shape {ket.shape}")
    return m @ ket


def vacuum_ladder_amplitude(k: int, n: int) -> float:
    """Amplitude of ``|k>`` in ``e+^k |0>``: ``sqrt(k!)``, or 0 once ``k >= n``."""
    n = check_order(n)
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if k >= n:
        return 0.0
    amp = 1.0
    for j in range(1, k + 1):
        amp *= math.sqrt(j)
    return amp


def max_deviation(a: np.ndarray, b: np.ndarray) -> float:
    """Largest absolute entrywise difference."""
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return float(np.max(np.abs(diff))) if diff.size else 0.0


@dataclass(frozen=True)
class Check:
    name: str
    deviation: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    n: int
    tol: float
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]


def verify_relations(n: int, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check the algebra's operator identities in the matrix representation.

    Always checked: ``[e, e+]`` against the factorial-free right side,
    ``[e, e] = [e+, e+] = 0``, ``e^n = e+^n = 0``, ``e+ e = N``,
    ``[e, e+ e] = e``, ``[e+, e+ e] = -e+`` and the vacuum ladder
    ``e+^k |0> = sqrt(k!) |k>``.  For ``n <= MAX_EXACT_ORDER`` the literal
    factorial form of the right side is checked as well.

    Failures are reported, never raised.
    """
    n = check_order(n)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    a, c = annihilator(n), creator(n)
    num = c @ a
    zero = np.zeros((n, n))
    comm = commutator(a, c)

    devs: list[tuple[str, float]] = [
        ("commutator_rhs", max_deviation(comm, defining_rhs_stable(n))),
    ]
    if n <= MAX_EXACT_ORDER:
        devs.append(("commutator_rhs_direct", max_deviation(comm, defining_rhs_direct(n))))
    devs += [
        ("self_commutators", max(max_deviation(commutator(a, a), zero),
                                 max_deviation(commutator(c, c), zero))),
        ("nilpotency", max(max_deviation(np.linalg.matrix_power(a, n), zero),
                           max_deviation(np.linalg.matrix_power(c, n), zero))),
        ("number_operator", max_deviation(num, np.diag(np.arange(n, dtype=float)))),
        ("lowering_bracket", max_deviation(commutator(a, num), a)),
        ("raising_bracket", max_deviation(commutator(c, num), -c)),
        ("vacuum_ladder", _vacuum_ladder_deviation(c, n)),
    ]
    checks = tuple(Check(name, d, d <= tol) for name, d in devs)
    return VerificationReport(n=n, tol=tol, checks=checks)


def _vacuum_ladder_deviation(c: np.ndarray, n: int) -> float:
    # relative to sqrt(k!) so large n does not swamp an absolute tolerance
    ket = basis_ket(0, n)
    worst = 0.0
    for k in range(n):
        expected = vacuum_ladder_amplitude(k, n) * basis_ket(k, n)
        worst = max(worst, max_deviation(ket, expected) / max(1.0, expected[k]))
        ket = c @ ket
    return max(worst, max_deviation(ket, np.zeros(n)))
