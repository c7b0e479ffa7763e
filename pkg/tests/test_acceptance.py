"""Exit criteria for the package, one test per criterion.

Run ``pytest tests/test_acceptance.py`` to get a PASS/FAIL line per
criterion in the terminal summary.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np

from genexcl import algebra as A
from genexcl.ensemble import LevelSystem, ensemble_totals, solve_ensemble
from genexcl.opcalc import (
    Generator,
    NormalForm,
    One,
    Power,
    Product,
    ScalarMul,
    Sum,
    evaluate_matrix,
    normal_form_to_matrix,
    normal_order,
    parse,
    verify_identity,
    word_action,
)
from genexcl.statistics import (
    bose,
    fermi,
    occupancy_closed,
    occupancy_direct,
    series_window,
)


def test_c1_defining_relation(record):
    start = time.perf_counter()
    worst_direct = max(
        A.max_deviation(A.commutator(A.annihilator(n), A.creator(n)), A.defining_rhs_direct(n))
        for n in range(2, 19)
    )
    worst_stable = max(
        A.max_deviation(A.commutator(A.annihilator(n), A.creator(n)), A.defining_rhs_stable(n))
        for n in range(1, 65)
    )
    e = {n: A.annihilator(n) for n in (1, 2, 3, 4)}
    c = {n: A.creator(n) for n in (1, 2, 3, 4)}
    mp = np.linalg.matrix_power
    listed = {
        1: np.zeros((1, 1)),
        2: np.eye(2) - 2 * c[2] @ e[2],
        3: np.eye(3) - 1.5 * mp(c[3], 2) @ mp(e[3], 2),
        4: np.eye(4) - (4 / 6) * mp(c[4], 3) @ mp(e[4], 3),
    }
    worst_listed = max(A.max_deviation(A.commutator(e[n], c[n]), listed[n]) for n in listed)
    elapsed = time.perf_counter() - start
    ok = max(worst_direct, worst_stable, worst_listed) <= 1e-12 and elapsed < 1.0
    record("C1 defining relation n<=18 direct, n<=64 stable, n=1..4 table", ok,
           f"direct={worst_direct:.1e} stable={worst_stable:.1e} "
           f"table={worst_listed:.1e} t={elapsed:.3f}s")


def test_c2_common_identities(record):
    worst = abs_ladder = 0.0
    for n in range(1, 19):
        e, ed = A.annihilator(n), A.creator(n)
        num = ed @ e
        zero = np.zeros((n, n))
        worst = max(
            worst,
            A.max_deviation(num, A.number_operator(n)),
            A.max_deviation(num, np.diag(np.arange(n, dtype=float))),
            A.max_deviation(A.commutator(e, num), e),
            A.max_deviation(A.commutator(ed, num), -ed),
            A.max_deviation(np.linalg.matrix_power(e, n), zero),
            A.max_deviation(np.linalg.matrix_power(ed, n), zero),
        )
        ket = A.basis_ket(0, n)
        for k in range(n):
            # amplitude compared relative to sqrt(k!): sqrt(17!) ~ 1.9e7 has ulp ~ 4e-9
            exact = math.sqrt(math.factorial(k))
            rest = np.delete(ket, k)
            worst = max(worst, abs(ket[k] - exact) / exact, float(np.max(np.abs(rest), initial=0)))
            abs_ladder = max(abs_ladder, abs(ket[k] - exact))
            ket = ed @ ket
    exact_ok = True
    for n in range(1, 11):
        exact_ok &= verify_identity("e+ e", "e+^1 e^1", n)
        exact_ok &= verify_identity("[e, e+ e]", "e", n)
        exact_ok &= verify_identity("[e+, e+ e]", "-e+", n)
        exact_ok &= normal_order(f"e^{n}", n) == NormalForm(n)
        exact_ok &= normal_order(f"e+^{n}", n) == NormalForm(n)
        for k in range(n):
            # e+^k |0> = rho[0] sqrt(0! k!) |k>
            exact_ok &= k == 0 or word_action(["e+"] * k, n).rho[0] == 1
    record("C2 common identities (matrix n<=18 at 1e-10, exact n<=10)",
           worst <= 1e-10 and exact_ok,
           f"matrix worst={worst:.1e} (ladder abs {abs_ladder:.1e}) exact={exact_ok}")


def test_c3_fermion_reduction(record):
    xs = np.linspace(-10, 10, 1000)
    worst = max(abs(occupancy_direct(x, 2) - 1 / (math.exp(x) + 1)) for x in xs)
    worst_fermi = max(abs(occupancy_direct(x, 2) - fermi(x)) for x in xs)
    record("C3 n=2 equals 1/(e^x+1) on [-10,10]", max(worst, worst_fermi) <= 1e-12,
           f"worst={max(worst, worst_fermi):.1e}")


def test_c4_boson_limit(record):
    xs = np.linspace(0.1, 10, 100)
    worst = max(abs(occupancy_direct(x, 500) - 1 / math.expm1(x)) for x in xs)
    worst_bose = max(abs(occupancy_direct(x, 500) - bose(x)) for x in xs)
    record("C4 n=500 equals 1/(e^x-1) on [0.1,10]", max(worst, worst_bose) <= 1e-9,
           f"worst={max(worst, worst_bose):.1e}")


def test_c5_closed_form(record):
    outside = inside = origin = 0.0
    grid = np.linspace(-30, 30, 1201)
    for n in range(2, 51):
        h = series_window(n)
        seam = np.concatenate([np.linspace(h, 3 * h, 40), -np.linspace(h, 3 * h, 40)])
        for x in np.concatenate([grid, seam]):
            d = abs(occupancy_closed(x, n) - occupancy_direct(x, n))
            if abs(x) >= h:
                outside = max(outside, d)
            else:
                inside = max(inside, d)
        for x in np.linspace(-h, h, 41)[1:-1]:
            inside = max(inside, abs(occupancy_closed(x, n) - occupancy_direct(x, n)))
        if n <= 10:
            origin = max(origin, abs(occupancy_closed(1e-9, n) - (n - 1) / 2))
    ok = outside <= 1e-12 and inside <= 1e-9 and origin <= 1e-6
    record("C5 closed form vs direct sum, n=2..50", ok,
           f"outside={outside:.1e} inside={inside:.1e} x=1e-9:{origin:.1e}")


def random_expression(rng: random.Random):
    """A sum of 1-3 terms: rational times a generator word (length <= 8),
    a power of a generator, or a bracket of two short words."""

    def word(max_len):
        length = rng.randint(0, max_len)
        gens = [Generator(rng.choice(["e", "e+"])) for _ in range(length)]
        if not gens:
            return One()
        return gens[0] if len(gens) == 1 else Product(tuple(gens))

    terms = []
    for _ in range(rng.randint(1, 3)):
        coeff = Fraction(rng.randint(-7, 7), rng.randint(1, 6))
        kind = rng.random()
        if kind < 0.6:
            body = word(8)
        elif kind < 0.8:
            body = Product((Power(Generator(rng.choice(["e", "e+"])), rng.randint(0, 4)),
                            word(4)))
        else:
            left, right = word(4), word(4)
            body = parse(f"[{_text(left)}, {_text(right)}]")
        terms.append(ScalarMul(coeff, body))
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))


def _text(node):
    if isinstance(node, One):
        return "1"
    if isinstance(node, Generator):
        return node.kind
    return " ".join(g.kind for g in node.factors)


def test_c6_symbolic_matrix_equivalence(record):
    rng = random.Random(20261017)
    start = time.perf_counter()
    worst, count = 0.0, 0
    for _ in range(250):
        expr = random_expression(rng)
        n = rng.randint(2, 6)
        got = normal_form_to_matrix(normal_order(expr, n))
        want = evaluate_matrix(expr, n)
        worst = max(worst, float(np.max(np.abs(got - want))))
        count += 1
    elapsed = time.perf_counter() - start
    record("C6 normal form vs matrix evaluation, random expressions",
           count >= 200 and worst <= 1e-10 and elapsed < 10.0,
           f"count={count} worst={worst:.1e} t={elapsed:.2f}s")


def test_c7_n3_worked_case(record):
    nf = normal_order("e e+", 3)
    want = {(0, 0): Fraction(1), (1, 1): Fraction(1), (2, 2): Fraction(-3, 2)}
    comm = normal_order("[e, e+]", 3)
    listed = normal_order("1 - 3/2 e+^2 e^2", 3)
    record("C7 n=3 normal order of e e+", nf.terms == want and comm == listed,
           f"got {nf.to_text()}")


def test_c8_ensemble_solver(record):
    levels = LevelSystem((0.0, 1.0), (1, 1))
    sol = solve_ensemble(levels, 1.0, 0.5, 2, tol=1e-10)
    P, E, _ = ensemble_totals(levels, sol.b, sol.c, 2)
    sym_ok = (np.max(np.abs(np.array(sol.occupancies) - 0.5)) <= 1e-10
              and abs(P - 1.0) <= 1e-10 and abs(E - 0.5) <= 1e-10)

    start = time.perf_counter()
    levels3 = LevelSystem((0.0, 1.0, 2.0), (2, 2, 2))
    sol3 = solve_ensemble(levels3, 4.0, 3.0, 3, tol=1e-10, max_iter=100)
    elapsed = time.perf_counter() - start
    P3, E3, _ = ensemble_totals(levels3, sol3.b, sol3.c, 3)
    res = max(abs(P3 - 4.0), abs(E3 - 3.0))
    ok = sym_ok and res <= 1e-10 and sol3.iterations <= 100 and elapsed < 1.0
    record("C8 ensemble solver (symmetric 2-level, 3-level n=3)", ok,
           f"sym={sym_ok} residual={res:.1e} iters={sol3.iterations} t={elapsed:.3f}s")


def test_c9_exclusion_bound(record):
    inside = True
    for n in range(2, 51):
        for x in np.linspace(-30, 30, 241):
            p = occupancy_direct(x, n)
            inside &= 0 < p < n - 1
    limit = max(abs(occupancy_direct(-40.0, n) - (n - 1)) for n in range(2, 51))
    record("C9 0 < P < n-1 and P -> n-1 at x=-40", inside and limit <= 1e-10,
           f"bounds={inside} |P(-40)-(n-1)|<={limit:.1e}")
