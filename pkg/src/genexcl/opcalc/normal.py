"""Exact normal ordering over the creators-left basis ``e+^a e^b``.

Rather than rewriting with the defining commutator, every generator word is
evaluated exactly on the basis kets.  A word ``W`` with ``d`` more creators
than annihilators maps ``|k>`` to ``rho[k] * sqrt(k! (k+d)!) |k+d>`` with
``rho[k]`` rational, and the normal monomial ``e+^(b+d) e^b`` has
``rho[k] = 1/(k-b)!``.  The normal coefficients therefore follow from a unit
triangular solve in exact rationals, which makes the normal form unique by
construction.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .. import algebra
from .expr import (
    ANNIHILATE,
    CREATE,
    AntiCommutator,
    Commutator,
    Generator,
    One,
    OpExpr,
    Power,
    Product,
    ScalarMul,
    Sum,
    parse,
)

__all__ = [
    "NormalForm",
    "WordAction",
    "expand",
    "word_action",
    "normal_order",
    "normal_form_to_matrix",
    "evaluate_matrix",
    "verify_identity",
]

Word = tuple[str, ...]


@dataclass(frozen=True)
class WordAction:
    """Exact action of a generator word: ``W|k> = rho[k] sqrt(k!(k+d)!) |k+d>``."""

    d: int
    rho: tuple[Fraction, ...]

    @property
    def is_zero(self) -> bool:
        return not any(self.rho)


@dataclass(frozen=True)
class NormalForm:
    """Coefficients ``{(a, b): c}`` of ``c * e+^a e^b`` at algebra order ``n``.

    Zero coefficients are never stored; the zero operator is the empty form.
    """

    n: int
    terms: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (a, b), c in self.terms.items():
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"monomial ({a}, {b}) outside 0..{self.n - 1}")
            c = Fraction(c)
            if c != 0:
                clean[(int(a), int(b))] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __eq__(self, other):
        if not isinstance(other, NormalForm):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, tuple(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __getitem__(self, key):
        return self.terms[key]

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def to_text(self) -> str:
        """Human-readable form, e.g. ``1 + e+^1 e^1 + -3/2 e+^2 e^2``; ``0`` when empty."""
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in self.terms.items():
            mono = " ".join(s for s in (f"e+^{a}" if a else "", f"e^{b}" if b else "") if s)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c} {mono}")
        return " + ".join(parts)

    def to_records(self) -> list[dict]:
        return [
            {"a": a, "b": b, "numerator": c.numerator, "denominator": c.denominator}
            for (a, b), c in self.terms.items()
        ]

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "terms": self.to_records()})

    @classmethod
    def from_records(cls, n: int, records: Iterable[Mapping]) -> "NormalForm":
        terms: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        for r in records:
            terms[(int(r["a"]), int(r["b"]))] += Fraction(int(r["numerator"]), int(r["denominator"]))
        return cls(n, terms)


def _check_exact_order(n: int) -> int:
    n = algebra.check_order(n)
    if n > algebra.MAX_EXACT_ORDER:
        raise ValueError(
            f"exact normal ordering supports n <= {algebra.MAX_EXACT_ORDER}, got n={n}"
        )
    return n


def expand(node: OpExpr, n: int | None = None) -> dict[Word, Fraction]:
    """Expand an expression into a rational combination of generator words.

    The empty word is the identity.  When ``n`` is given, words containing
    ``n`` consecutive equal generators are dropped since they vanish.
    """

    def mul(x: dict[Word, Fraction], y: dict[Word, Fraction]) -> dict[Word, Fraction]:
        out: dict[Word, Fraction] = defaultdict(Fraction)
        for wx, cx in x.items():
            for wy, cy in y.items():
                w = wx + wy
                if n is None or not _has_run(w, n):
                    out[w] += cx * cy
        return {w: c for w, c in out.items() if c}

    def add(x, y, sign=1):
        out: dict[Word, Fraction] = defaultdict(Fraction, x)
        for w, c in y.items():
            out[w] += sign * c
        return {w: c for w, c in out.items() if c}

    def go(e: OpExpr) -> dict[Word, Fraction]:
        if isinstance(e, Generator):
            return {(e.kind,): Fraction(1)}
        if isinstance(e, One):
            return {(): Fraction(1)}
        if isinstance(e, ScalarMul):
            return {w: e.coeff * c for w, c in go(e.expr).items() if e.coeff * c}
        if isinstance(e, Sum):
            acc: dict[Word, Fraction] = {}
            for t in e.terms:
                acc = add(acc, go(t))
            return acc
        if isinstance(e, Product):
            acc = {(): Fraction(1)}
            for f in e.factors:
                acc = mul(acc, go(f))
            return acc
        if isinstance(e, Power):
            base, acc = go(e.base), {(): Fraction(1)}
            for _ in range(e.exponent):
                acc = mul(acc, base)
                if not acc:
                    break
            return acc
        if isinstance(e, Commutator):
            x, y = go(e.left), go(e.right)
            return add(mul(x, y), mul(y, x), sign=-1)
        if isinstance(e, AntiCommutator):
            x, y = go(e.left), go(e.right)
            return add(mul(x, y), mul(y, x))
        raise TypeError(f"not an operator expression: {e!r}")

    return go(node)


def _has_run(word: Word, n: int) -> bool:
    run, prev = 0, None
    for g in word:
        run = run + 1 if g == prev else 1
        prev = g
        if run >= n:
            return True
    return False


def _as_word(word: Sequence) -> Word:
    out = []
    for g in word:
        kind = g.kind if isinstance(g, Generator) else g
        if kind not in (ANNIHILATE, CREATE):
            raise ValueError(f"not a generator: {g!r}")
        out.append(kind)
    return tuple(out)


def word_action(word: Sequence, n: int) -> WordAction:
    """Exact action of a generator word on every basis ket of the order-``n`` space.

    ``word`` lists generators left to right (``["e", "e+"]`` is ``e e+``);
    they are applied starting from the rightmost.  The amplitude of each path
    is a product of ``sqrt(j)`` factors, one per traversed edge ``j-1 <-> j``.
    Edges crossed an even number of times pair up into integers; the edges
    crossed an odd number of times are exactly those between ``k`` and
    ``k+d``, whose square roots cancel against ``sqrt(k!(k+d)!)`` leaving
    ``1/min(k, k+d)!``.  So ``rho[k]`` is built from integers only.
    """
    word = _as_word(word)
    n = algebra.check_order(n)
    if not word:
        raise ValueError("word must be nonempty")
    return _word_action(word, n)


@lru_cache(maxsize=65536)
def _word_action(word: Word, n: int) -> WordAction:
    d = sum(1 if g == CREATE else -1 for g in word)
    rho = []
    for k in range(n):
        crossings: dict[int, int] = defaultdict(int)
        j = k
        for g in reversed(word):
            if g == ANNIHILATE:
                if j == 0:
                    break
                crossings[j] += 1
                j -= 1
            else:
                if j == n - 1:
                    break
                crossings[j + 1] += 1
                j += 1
        else:
            lo, hi = min(k, k + d), max(k, k + d)
            odd = {m for m, cnt in crossings.items() if cnt % 2}
            assert odd == set(range(lo + 1, hi + 1)), "unpaired edge outside k..k+d"
            paired = 1
            for m, cnt in crossings.items():
                paired *= m ** (cnt // 2)
            rho.append(Fraction(paired, math.factorial(lo)))
            continue
        rho.append(Fraction(0))
    return WordAction(d, tuple(rho))


def _solve_band(rho: Sequence[Fraction], d: int, n: int) -> dict[tuple[int, int], Fraction]:
    # rho[k] = sum_{b0 <= b <= k} lam[b] / (k-b)!  for admissible k, ascending
    b0, b1 = max(0, -d), min(n - 1, n - 1 - d)
    lam: dict[int, Fraction] = {}
    for k in range(b0, b1 + 1):
        acc = Fraction(rho[k])
        for b, lb in lam.items():
            acc -= lb / math.factorial(k - b)
        lam[k] = acc
    return {(b + d, b): c for b, c in lam.items() if c}


def normal_order(expr: OpExpr | str, n: int) -> NormalForm:
    """Normal-ordered form of ``expr`` at algebra order ``n`` (``n <= 18``).

    Accepts an AST or expression text.  Two expressions that agree as
    operators on the ``n``-state space give equal normal forms.
    """
    n = _check_exact_order(n)
    if isinstance(expr, str):
        expr = parse(expr)
    bands: dict[int, list[Fraction]] = {}
    for word, coeff in expand(expr, n).items():
        if word:
            act = _word_action(word, n)
            d, rho = act.d, act.rho
        else:
            d, rho = 0, tuple(Fraction(1, math.factorial(k)) for k in range(n))
        if abs(d) >= n:
            continue
        band = bands.setdefault(d, [Fraction(0)] * n)
        for k, r in enumerate(rho):
            if r:
                band[k] += coeff * r
    terms: dict[tuple[int, int], Fraction] = {}
    for d, rho in bands.items():
        terms.update(_solve_band(rho, d, n))
    return NormalForm(n, terms)


def normal_form_to_matrix(nf: NormalForm) -> np.ndarray:
    """Evaluate ``sum c * e+^a e^b`` as a float matrix."""
    n = nf.n
    a_pows = [np.linalg.matrix_power(algebra.annihilator(n), b) for b in range(n)]
    c_pows = [np.linalg.matrix_power(algebra.creator(n), a) for a in range(n)]
    out = np.zeros((n, n))
    for (a, b), c in nf.items():
        out += float(c) * (c_pows[a] @ a_pows[b])
    return out


def evaluate_matrix(expr: OpExpr | str, n: int) -> np.ndarray:
    """Interpret an expression directly over the float matrices of order ``n``."""
    n = algebra.check_order(n)
    if isinstance(expr, str):
        expr = parse(expr)
    e, ed = algebra.annihilator(n), algebra.creator(n)

    def go(node: OpExpr) -> np.ndarray:
        if isinstance(node, Generator):
            return e if node.kind == ANNIHILATE else ed
        if isinstance(node, One):
            return np.eye(n)
        if isinstance(node, ScalarMul):
            return float(node.coeff) * go(node.expr)
        if isinstance(node, Sum):
            return sum((go(t) for t in node.terms), np.zeros((n, n)))
        if isinstance(node, Product):
            out = np.eye(n)
            for f in node.factors:
                out = out @ go(f)
            return out
        if isinstance(node, Power):
            return np.linalg.matrix_power(go(node.base), node.exponent)
        if isinstance(node, Commutator):
            return algebra.commutator(go(node.left), go(node.right))
        if isinstance(node, AntiCommutator):
            return algebra.anticommutator(go(node.left), go(node.right))
        raise TypeError(f"not an operator expression: {node!r}")

    return go(expr)


def verify_identity(lhs: OpExpr | str, rhs: OpExpr | str, n: int) -> bool:
    """Exact operator equality of ``lhs`` and ``rhs`` at order ``n``."""
    return normal_order(lhs, n) == normal_order(rhs, n)
