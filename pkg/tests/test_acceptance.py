"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

All tolerances are pinned here; run with `pytest tests/test_acceptance.py -v -s`
to see the per-criterion report.
"""

import cmath
import time

import numpy as np

from vvmf.classical import ClassicalCatalog
from vvmf.constructions import (
    InductionJob,
    even_odd_residual,
    exhibited_exponents,
    induced_exponent_multiset,
    induction_minimal_pair,
    induction_relation_residual,
    rank2_minimal,
    sym3_pipeline,
    tensor_pipeline,
    u_from_local_exponent,
)
from vvmf.mlde import (
    basis_rank_ratio,
    build_hypergeometric_operator,
    build_rank2_operator,
    dimension,
    classify,
    frobenius_solve,
    hypergeom_2f1,
    rank2_coeff,
)
from vvmf.reps import (
    ExponentData,
    GRank2Rep,
    Group,
    Rank2Rep,
    Rank4Rep,
    induced_exponents,
)
from vvmf.series import (
    compose_frobenius,
    composition_dps,
    downcast_to_complex,
)

ZETA = cmath.exp(2j * cmath.pi / 3)


def report(name: str, worst: float, tol: float, extra: str = "") -> None:
    status = "PASS" if worst < tol else "FAIL"
    print(f"{status} {name}: worst {worst:.3e} < {tol:.1e} {extra}")
    assert worst < tol, f"{name}: {worst} >= {tol}"


def rank2_data(r1, r2):
    rep = Rank2Rep.from_eigenvalues(
        cmath.exp(2j * cmath.pi * r1), cmath.exp(2j * cmath.pi * r2)
    )
    return rep, ExponentData.diagonal([r1, r2])


def test_criterion_1_classical_identity_suite():
    t0 = time.perf_counter()
    res = ClassicalCatalog(200).level_one_residuals()
    elapsed = time.perf_counter() - t0
    report(
        "criterion 1 (classical identities, order 200)",
        max(res.values()),
        1e-10,
        f"in {elapsed:.2f}s",
    )
    assert elapsed < 2.0, f"classical suite took {elapsed:.2f}s (budget 2s)"


def test_criterion_2_level_two_suite():
    res = ClassicalCatalog(50).level_two_residuals()  # q2-order 100
    report("criterion 2 (level-2 generators, q2-order 100)", max(res.values()), 1e-10)


def test_criterion_3_hypergeometric_cross_oracle():
    rng = np.random.default_rng(2024)
    worst = 0.0
    cases = 0
    while cases < 20:
        a = complex(rng.uniform(-3, 3), rng.uniform(-1, 1))
        b = complex(rng.uniform(-3, 3), rng.uniform(-1, 1))
        c = complex(rng.uniform(-3, 3), rng.uniform(-1, 1))
        if abs(c - round(c.real)) < 0.2 and c.real <= 0.5:
            continue
        series = hypergeom_2f1(a, b, c, 100)
        sol = frobenius_solve(build_hypergeometric_operator(a, b, c), 0, 100)
        diff = sol - series
        worst = max(
            worst,
            max(
                abs(complex(d)) / max(1.0, abs(complex(s)))
                for d, s in zip(diff.coeffs, series.coeffs)
            ),
        )
        cases += 1
    report("criterion 3 (2F1 vs Frobenius, 20 cases, order 100)", worst, 1e-12)


def sym3_grid():
    # T-regular pairs with r1 - r2 never in (1/3)Z or (1/2)Z (Sym^3 regular
    # and non-resonant) and x^2 - xy + y^2 != 0
    deltas = [0.21, 0.29, 0.37 + 0.05j, 0.41, 0.23 - 0.11j, 0.44]
    cases = []
    for i, s in enumerate((1, 2, 3, 4, 5, 7, 8, 10, 11, 13)):
        d = deltas[i % len(deltas)]
        cases.append(((s / 6 + d) / 2, (s / 6 - d) / 2))
    return cases


def test_criterion_4_sym3_end_to_end(catalog40):
    t0 = time.perf_counter()
    worst = 0.0
    for r1, r2 in sym3_grid():
        rep, L = rank2_data(r1, r2)
        basis = sym3_pipeline(rep, L, 30, catalog40)
        worst = max(worst, basis.residuals["cyclic_mlde"])
        assert basis.case.case == "cyclic"
        assert basis_rank_ratio(basis) > 1e-6
    elapsed = time.perf_counter() - t0
    report(
        "criterion 4 (Sym^3 end-to-end, 10 pairs, order 30)",
        worst,
        1e-9,
        f"in {elapsed:.2f}s",
    )
    assert elapsed < 10.0, f"Sym^3 grid took {elapsed:.2f}s (budget 10s)"


def tensor_grid():
    pairs = []
    specs = [
        (1, 0.21, 2, 0.13),
        (2, 0.17, 3, 0.29),
        (4, 0.31, 1, 0.23),
        (5, 0.13 + 0.07j, 2, 0.41),
        (3, 0.37, 3, 0.19),
        (1, 0.43, 4, 0.27),
        (2, 0.29 - 0.06j, 5, 0.11),
        (6, 0.23, 2, 0.37),
        (4, 0.19, 6, 0.31),
        (7, 0.41, 1, 0.29),
    ]
    for s1, d1, s2, d2 in specs:
        pairs.append(
            (
                ((s1 / 6 + d1) / 2, (s1 / 6 - d1) / 2),
                ((s2 / 6 + d2) / 2, (s2 / 6 - d2) / 2),
            )
        )
    return pairs


def test_criterion_5_tensor_end_to_end(catalog40):
    worst_ode = 0.0
    worst_cols = 0.0
    worst_drop = 0.0
    for (p1, p2) in tensor_grid():
        alpha, L1 = rank2_data(*p1)
        beta, L2 = rank2_data(*p2)
        basis = tensor_pipeline(alpha, beta, L1, L2, 30, catalog40)
        worst_ode = max(worst_ode, basis.residuals["kline_scalar_ode"])
        worst_cols = max(
            worst_cols,
            basis.residuals["col2_d2f"],
            basis.residuals["col3_dg_e4f"],
            basis.residuals["col4_dh"],
        )
        worst_drop = max(worst_drop, basis.residuals["g_exponent_drop"])
        assert basis.case.case == "noncyclic"
    report("criterion 5a (tensor F solves the scalar equation)", worst_ode, 1e-9)
    report("criterion 5b (derivative-matrix column relations)", worst_cols, 1e-9)
    report("criterion 5c (G exponent floor)", worst_drop, 1e-12, "(exact floor)")


def test_criterion_6_weight_dimension_consistency():
    rng = np.random.default_rng(77)
    checked = {"cyclic": 0, "noncyclic": 0}
    while min(checked.values()) < 20:
        d = int(rng.integers(0, 6))
        e = (d + 1) % 2
        m = d + 3 * int(rng.integers(1, 5))
        es = list(rng.uniform(-0.3, 0.5, 3) + 1j * rng.uniform(-0.05, 0.05, 3))
        eigs = es + [m / 3 - sum(es)]
        rep = Rank4Rep(*[cmath.exp(2j * cmath.pi * v) for v in eigs], d=d, e=e)
        L = ExponentData.diagonal(eigs)
        rep_case = classify(rep, L)
        top = rep_case.k1 + 24
        inv = [0] * (top + 1)
        for i4 in range(0, top + 1, 4):
            for i6 in range(0, top + 1 - i4, 6):
                inv[i4 + i6] += 1
        want = [0] * (top + 1)
        for kj in rep_case.weight_tuple:
            for n in range(top + 1 - kj):
                want[kj + n] += inv[n]
        got = [dimension(k, rep, L) for k in range(top + 1)]
        assert got == want, (rep_case, got, want)
        checked[rep_case.case] += 1
    print(
        f"PASS criterion 6 (dimension generating function): "
        f"{checked['cyclic']} cyclic + {checked['noncyclic']} noncyclic cases exact"
    )


def test_criterion_7_induction_end_to_end():
    catalog = ClassicalCatalog(20)  # q2-order 40
    rep = GRank2Rep(0, 1, ZETA, ZETA**2, 0.7 + 0.2j)
    L = ExponentData.diagonal([1 / 3 + 0.11, 1 / 3 - 0.11], Group.G)
    worst_pair = 0.0
    worst_split = 0.0
    worst_multiset = 0.0
    for r in (0.27, 0.13 + 0.21j, 0.41, 0.05, 0.33 - 0.14j):
        job = InductionJob.make(rep, L, u_from_local_exponent(r))
        A, B = induction_minimal_pair(job, 20, catalog)
        worst_pair = max(
            worst_pair, induction_relation_residual(A, B, job.u, catalog)
        )
        for F in (A, B):
            worst_split = max(
                worst_split, max(even_odd_residual(c) for c in F.components)
            )
            got = sorted(z.real for z in induced_exponent_multiset(F))
            want = sorted(
                v.real
                for v in induced_exponents(exhibited_exponents(F)).eigenvalues
            )
            worst_multiset = max(
                worst_multiset,
                max(abs(g - w) for g, w in zip(got, want)),
            )
    report("criterion 7a (pair derivative relation, q2-order 40)", worst_pair, 1e-9)
    report(
        "criterion 7b (induced exponent multisets)", worst_multiset, 1e-9
    )
    report("criterion 7c (even/odd q2-splitting)", worst_split, 1e-12, "(exact pattern)")


def test_criterion_8_rank2_oracle_equivalence(catalog60):
    worst = 0.0
    for (s, delta) in ((1, 0.21), (3, 0.17), (5, 0.37), (2, 0.29), (7, 0.11 + 0.06j)):
        r1, r2 = (s / 6 + delta) / 2, (s / 6 - delta) / 2
        rep, L = rank2_data(r1, r2)
        closed = rank2_minimal(rep, L, 50, catalog60)
        # independent route: Frobenius-solve the rank-2 K-line operator at
        # both exponents, substitute K(q), rescale by the same eta power
        k_of_q = catalog60.k_hauptmodul().truncate(50)
        import mpmath

        with mpmath.workdps(composition_dps(k_of_q)):
            # exponents built at working precision with their sum pinned to
            # 1/6 exactly, so they are exact roots of the indicial polynomial
            f1 = mpmath.mpc(complex(r1 - (r1 + r2) / 2)) + mpmath.mpf(1) / 12
            f2 = mpmath.mpf(1) / 6 - f1
            op = build_rank2_operator(rank2_coeff(f1, f2))
            comps = [
                downcast_to_complex(
                    compose_frobenius(frobenius_solve(op, f, 50), k_of_q)
                )
                for f in (f1, f2)
            ]
        eta = catalog60.eta_power(2 * closed.k1)
        for got, want in zip(comps, closed.components.components):
            frobenius_route = got * eta
            diff = frobenius_route - want
            worst = max(
                worst,
                max(
                    abs(complex(dc)) / max(1.0, abs(complex(wc)))
                    for dc, wc in zip(diff.coeffs, want.coeffs)
                ),
            )
    report("criterion 8 (rank-2 Frobenius vs closed form, order 50)", worst, 1e-10)
