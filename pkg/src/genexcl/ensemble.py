"""Fit the Lagrange factors ``(b, c)`` of a level spectrum to fixed totals.

Given levels ``(E_i, g_i)`` and a cap of ``n - 1`` particles per state, find
``b`` and ``c`` such that

    sum_i g_i P(E_i b + c, n)       = particles
    sum_i g_i E_i P(E_i b + c, n)   = energy

Damped Newton with a finite-difference Jacobian is tried first; nested
bracketed root finding (outer on ``b``, inner on ``c``) is the fallback.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .statistics import occupancy_direct

__all__ = [
    "InfeasibleError",
    "ConvergenceError",
    "LevelSystem",
    "EnsembleSolution",
    "read_levels",
    "energy_bounds",
    "ensemble_totals",
    "solve_ensemble",
]

logger = logging.getLogger(__name__)


class InfeasibleError(ValueError):
    """Targets lie outside what the capped occupancies can reach."""

    def __init__(self, message: str, bound: str):
        super().__init__(message)
        self.bound = bound


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residuals: tuple[float, float], iterations: int):
        super().__init__(f"{message} (residuals P={residuals[0]:.3e}, E={residuals[1]:.3e}, "
                         f"iterations={iterations})")
        self.residuals = residuals
        self.iterations = iterations


@dataclass(frozen=True)
class LevelSystem:
    energies: tuple[float, ...]
    degeneracies: tuple[int, ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        energies = tuple(float(e) for e in self.energies)
        degs = tuple(self.degeneracies)
        if not energies:
            raise ValueError("a level system needs at least one level")
        if len(degs) != len(energies):
            raise ValueError("energies and degeneracies differ in length")
        if not all(math.isfinite(e) for e in energies):
            raise ValueError("level energies must be finite")
        for g in degs:
            if isinstance(g, bool) or int(g) != g or g < 1:
                raise ValueError(f"degeneracies must be positive integers, got {g!r}")
        if self.names is not None and len(self.names) != len(energies):
            raise ValueError("names and energies differ in length")
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "degeneracies", tuple(int(g) for g in degs))
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, int]]) -> "LevelSystem":
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    def __len__(self):
        return len(self.energies)

    @property
    def total_states(self) -> int:
        return sum(self.degeneracies)


def read_levels(path: str | Path) -> LevelSystem:
    """Read a ``energy,degeneracy`` table (optional third ``name`` column)."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(f.strip() for f in r)]
    if not rows:
        raise ValueError(f"{path}: empty levels file")
    header = [h.strip().lower() for h in rows[0]]
    if header[:2] != ["energy", "degeneracy"] or header[2:] not in ([], ["name"]):
        raise ValueError(f"{path}: header must be 'energy,degeneracy[,name]', got {rows[0]}")
    energies, degs, names = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            energies.append(float(row[0]))
            degs.append(int(row[1]))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
        if len(row) > 2:
            names.append(row[2].strip())
    try:
        return LevelSystem(tuple(energies), tuple(degs), tuple(names) if names else None)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class EnsembleSolution:
    b: float
    c: float
    occupancies: tuple[float, ...]
    achieved_P: float
    achieved_E: float
    iterations: int
    method: str = "newton"


def ensemble_totals(levels: LevelSystem, b: float, c: float, n: int) -> tuple[float, float, np.ndarray]:
    """Total particles, total energy and per-state occupancy at ``(b, c)``."""
    e = np.asarray(levels.energies)
    g = np.asarray(levels.degeneracies, dtype=float)
    occ = np.array([occupancy_direct(ei * b + c, n) for ei in e])
    return float(np.dot(g, occ)), float(np.dot(g * e, occ)), occ


def energy_bounds(levels: LevelSystem, particles: float, n: int) -> tuple[float, float]:
    """Lowest and highest total energy for ``particles`` with ``n - 1`` per state."""
    cap = n - 1
    order = sorted(zip(levels.energies, levels.degeneracies))

    def fill(seq):
        left, total = particles, 0.0
        for energy, g in seq:
            take = min(left, cap * g)
            total += take * energy
            left -= take
            if left <= 0:
                break
        return total

    return fill(order), fill(reversed(order))


def _check_feasible(levels, particles, energy, n, tol):
    capacity = (n - 1) * levels.total_states
    if not 0 < particles < capacity:
        raise InfeasibleError(
            f"particles={particles} must lie strictly between 0 and the exclusion "
            f"capacity (n-1)*sum(g)={capacity}",
            bound="capacity",
        )
    lo, hi = energy_bounds(levels, particles, n)
    if len(set(levels.energies)) == 1:
        if abs(energy - lo) > tol:
            raise InfeasibleError(
                f"all levels share energy {levels.energies[0]}; total energy must equal "
                f"{lo}, got {energy}",
                bound="degenerate_energy",
            )
        return
    if not lo < energy < hi:
        which = "minimum" if energy <= lo else "maximum"
        raise InfeasibleError(
            f"energy={energy} must lie strictly between the minimum {lo} and maximum {hi} "
            f"attainable at particles={particles} (violates the {which})",
            bound=f"energy_{which}",
        )


def _bracket_root(f, lo=-1.0, hi=1.0, limit=1e6):
    # f decreasing: expand until f(lo) > 0 > f(hi)
    while f(lo) < 0:
        lo *= 2.0
        if abs(lo) > limit:
            raise ArithmeticError("could not bracket root from below")
    while f(hi) > 0:
        hi *= 2.0
        if abs(hi) > limit:
            raise ArithmeticError("could not bracket root from above")
    return lo, hi


def _solve_c(levels, b, particles, n):
    def f(c):
        return ensemble_totals(levels, b, c, n)[0] - particles

    lo, hi = _bracket_root(f)
    fl, fh = f(lo), f(hi)
    if fl == 0:
        return lo
    if fh == 0:
        return hi
    return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)


def solve_ensemble(
    levels: LevelSystem,
    target_P: float,
    target_E: float,
    n: int,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> EnsembleSolution:
    """Find Lagrange factors ``(b, c)`` reproducing both totals within ``tol``.

    When every level has the same energy, ``b`` cannot be determined and is
    fixed to 0.

    Raises
    ------
    InfeasibleError
        Particle number outside ``(0, (n-1) sum g)`` or energy outside the
        range reachable at that particle number.
    ConvergenceError
        Neither Newton nor the bracketing fallback met ``tol``.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    _check_feasible(levels, target_P, target_E, n, tol)
    target = np.array([target_P, target_E])

    def residual(p):
        P, E, _ = ensemble_totals(levels, p[0], p[1], n)
        return np.array([P, E]) - target

    def solution(p, iterations, method):
        P, E, occ = ensemble_totals(levels, p[0], p[1], n)
        return EnsembleSolution(float(p[0]), float(p[1]), tuple(float(o) for o in occ),
                                P, E, iterations, method)

    c0 = _solve_c(levels, 0.0, target_P, n)
    p = np.array([0.0, c0])
    if len(set(levels.energies)) == 1:
        r = residual(p)
        if np.max(np.abs(r)) > tol:
            raise ConvergenceError("single-energy solve missed tolerance", tuple(r), 1)
        return solution(p, 1, "bracket")

    r = residual(p)
    it = 0
    while np.max(np.abs(r)) > tol and it < max_iter:
        it += 1
        jac = np.empty((2, 2))
        for j in range(2):
            h = 1e-6 * max(1.0, abs(p[j]))
            dp = np.zeros(2)
            dp[j] = h
            jac[:, j] = (residual(p + dp) - residual(p - dp)) / (2 * h)
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            logger.debug("singular Jacobian at iteration %d", it)
            break
        if not np.all(np.isfinite(step)):
            break
        t, norm = 1.0, np.max(np.abs(r))
        while t > 1e-10:
            trial = p + t * step
            rt = residual(trial)
            if np.max(np.abs(rt)) < norm:
                p, r = trial, rt
                break
            t *= 0.5
        else:
            logger.debug("line search stalled at iteration %d", it)
            break
    if np.max(np.abs(r)) <= tol:
        return solution(p, it, "newton")

    logger.debug("Newton stopped with residuals %s; using nested bracketing", r)
    calls = 0

    def energy_gap(b):
        nonlocal calls
        calls += 1
        c = _solve_c(levels, b, target_P, n)
        return ensemble_totals(levels, b, c, n)[1] - target_E

    try:
        lo, hi = _bracket_root(energy_gap)
        b = brentq(energy_gap, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        raise ConvergenceError(f"bracketing fallback failed: {exc}", tuple(r), it + calls) from None
    p = np.array([b, _solve_c(levels, b, target_P, n)])
    r = residual(p)
    if np.max(np.abs(r)) > tol:
        raise ConvergenceError("solver did not reach tolerance", tuple(float(v) for v in r),
                               it + calls)
    return solution(p, it + calls, "bracket")
