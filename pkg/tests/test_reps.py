"""Representation parameters, irreducibility criteria, exponent functors."""

import cmath
from fractions import Fraction

import numpy as np
import pytest

from vvmf.errors import GroupMismatch, InconsistentRep, WrongRank
from vvmf.reps import (
    ExponentData,
    GRank2Rep,
    Group,
    Rank2Rep,
    Rank4Rep,
    beta_twist_orbit,
    d_invariant,
    induced_exponents,
    induction_is_irreducible,
    rank2_is_irreducible,
    rank4_from_induction,
    rank4_from_sym3,
    rank4_from_tensor,
    restriction_index,
    sym3_exponents,
    sym3_is_irreducible,
    tensor_exponents,
    tensor_is_irreducible,
)

ZETA = cmath.exp(2j * cmath.pi / 3)
XI = cmath.exp(2j * cmath.pi / 6)


def rank2(r1, r2):
    return Rank2Rep.from_eigenvalues(
        cmath.exp(2j * cmath.pi * r1), cmath.exp(2j * cmath.pi * r2)
    )


class TestRank2:
    def test_irreducible_examples(self):
        assert rank2_is_irreducible(Rank2Rep.from_eigenvalues(1, -1))
        # x/y a primitive sixth root kills x^2 - xy + y^2
        bad = Rank2Rep.from_eigenvalues(1, cmath.exp(1j * cmath.pi / 3))
        assert not rank2_is_irreducible(bad)

    def test_jordan_family_irreducible(self):
        nu = Rank2Rep.from_eigenvalues(1, 1)
        assert nu.jordan and rank2_is_irreducible(nu)

    def test_determinant_invariant(self):
        rep = rank2(1 / 4, 1 / 12)
        # xy = e^{2 pi i /3}: a = 4 on the twelfth-root scale
        assert rep.a == 4
        assert rep.det_power == 2
        assert rep.parity == (2 + 1) % 2

    def test_rejects_non_sixth_root_product(self):
        # a genuine twelfth root (odd power) and a non-unimodular product
        with pytest.raises(InconsistentRep):
            Rank2Rep.from_eigenvalues(cmath.exp(2j * cmath.pi / 12), 1)
        with pytest.raises(InconsistentRep):
            Rank2Rep.from_eigenvalues(1.3, 1.0)


class TestRank4:
    def test_inconsistent_product(self):
        with pytest.raises(InconsistentRep):
            Rank4Rep(1, 1, 1, cmath.exp(0.7j), d=0, e=1)

    def test_parity_constraint(self):
        with pytest.raises(InconsistentRep):
            Rank4Rep(1, 1, 1, 1, d=0, e=0)

    def test_trace_identities(self):
        rng = np.random.default_rng(3)
        for _ in range(8):
            d = int(rng.integers(0, 6))
            m = d + 3 * int(rng.integers(-2, 3))
            es = list(rng.uniform(-0.4, 0.6, 3) + 1j * rng.uniform(-0.1, 0.1, 3))
            es.append(m / 3 - sum(es))
            evs = [cmath.exp(2j * cmath.pi * e) for e in es]
            rep = Rank4Rep(*evs, d=d, e=(d + 1) % 2)
            res = rep.trace_residuals()
            assert res["trace_S"] < 1e-9
            assert res["trace_R"] < 1e-9
            assert res["minus_identity"] < 1e-9
            assert d_invariant(rep) == d


class TestGRank2:
    def rep(self, **kw):
        params = dict(e=0, zeta1=1, zeta2=ZETA, zeta3=1, a=5.0)
        params.update(kw)
        return GRank2Rep(**params)

    def test_validation(self):
        with pytest.raises(InconsistentRep):
            self.rep(zeta1=2.0)
        with pytest.raises(InconsistentRep):
            self.rep(zeta2=1)  # zeta1 == zeta2
        # a^2 + zeta3 a + zeta3^2 = 0 at a = zeta3 * primitive sixth root
        bad_a = complex(ZETA**0) * cmath.exp(2j * cmath.pi / 3) ** (1 / 1)
        with pytest.raises(InconsistentRep):
            self.rep(a=cmath.exp(2j * cmath.pi / 3))

    def test_restriction_criterion(self):
        assert self.rep(zeta2=ZETA, zeta3=ZETA**2).restricts_from_gamma
        assert not self.rep(zeta3=1).restricts_from_gamma

    def test_induction_irreducibility_excluded_value(self):
        z1, z2, z3 = 1, ZETA, 1
        excluded = (z1 * z2 + z2 * z3 + z3**2) / (z1 - z2)
        # here excluded == zeta, which the parameter constraint already bars,
        # so the e = 0 exclusion is vacuous; the sign-flipped e = 1 value is
        # admissible and must be rejected by the irreducibility test
        assert abs(excluded - ZETA) < 1e-12
        assert not induction_is_irreducible(self.rep(e=1, a=-excluded))
        assert induction_is_irreducible(self.rep(e=1, a=0.5))
        # for even parity -zeta is allowed and irreducible
        assert induction_is_irreducible(self.rep(e=0, a=-excluded))

    def test_restriction_sum_zero_not_irreducible(self):
        rep = self.rep(zeta2=ZETA, zeta3=ZETA**2)
        assert not induction_is_irreducible(rep)

    def test_twist_orbit_trichotomy(self):
        rng = np.random.default_rng(11)
        roots = [1, ZETA, ZETA**2]
        count = 0
        for _ in range(40):
            z1, z2, z3 = (roots[rng.integers(0, 3)] for _ in range(3))
            if abs(z1 - z2) < 1e-9:
                continue
            a = complex(rng.normal(), rng.normal())
            try:
                rep = GRank2Rep(int(rng.integers(0, 2)), z1, z2, z3, a)
            except InconsistentRep:
                continue
            hits = [
                r for r in beta_twist_orbit(rep) if r.restricts_from_gamma
            ]
            assert len(hits) == 1
            count += 1
        assert count > 20

    def test_t2_matrix_order(self):
        # T^2 = -R1 R0 inside the subgroup: check (R0 R1-free) consistency
        rep = self.rep()
        t2 = rep.t2_matrix()
        r0, r1 = rep.r0_matrix(), rep.r1_matrix()
        assert np.allclose(t2, ((-1) ** rep.e) * (r1 @ r0))


class TestTensorSym3Irreducibility:
    def test_tensor_cases(self):
        regular = rank2(0.3, 1 / 6 - 0.3)
        nu = Rank2Rep.from_eigenvalues(1, 1)
        assert tensor_is_irreducible(regular, nu)  # exactly one T-regular
        assert not tensor_is_irreducible(nu, nu)  # nu (x) nu splits
        # coincident products: alpha = diag(i,-i)-type against itself
        half = rank2(1 / 4, -1 / 4)
        assert not tensor_is_irreducible(half, half)

    def test_sym3_cases(self):
        nu = Rank2Rep.from_eigenvalues(1, 1)
        assert sym3_is_irreducible(nu)
        quarter = rank2(5 / 24, -1 / 24)  # x/y = i: all six ratios distinct
        assert sym3_is_irreducible(quarter)
        sq = rank2(1 / 3, -1 / 6)  # (x/y)^2 = 1 forces a collision
        assert not sym3_is_irreducible(sq)


class TestExponentData:
    def test_matrix_spectrum_checked(self):
        with pytest.raises(InconsistentRep):
            ExponentData((1.0, 2.0), Group.GAMMA, ((1, 0), (0, 5)))

    def test_wrong_shape(self):
        with pytest.raises(WrongRank):
            ExponentData((1.0,), Group.GAMMA, ((1, 0), (0, 1)))

    def test_validate_against(self):
        L = ExponentData.diagonal([0.25, 0.75])
        L.validate_against([1j, -1j])
        with pytest.raises(InconsistentRep):
            L.validate_against([1, -1])

    def test_json_round_trip(self):
        L = ExponentData.diagonal([0.25, 0.5 + 0.1j], Group.G)
        back = ExponentData.from_json(L.to_json())
        assert back.group is Group.G
        assert back.eigenvalues == L.eigenvalues
        assert back.matrix == L.matrix


class TestTensorExponents:
    def test_pairwise_sums(self):
        L1 = ExponentData.diagonal([Fraction(1, 3), Fraction(1, 6)])
        L2 = ExponentData.diagonal([Fraction(1, 4), Fraction(1, 12)])
        out = tensor_exponents(L1, L2)
        got = sorted(e.real for e in out.eigenvalues)
        assert np.allclose(got, sorted([7 / 12, 5 / 12, 5 / 12, 1 / 4]))
        assert abs(out.trace - 5 / 3) < 1e-14

    def test_identity_factor(self):
        L1 = ExponentData.diagonal([0.3, 0.7])
        L2 = ExponentData.diagonal([0.0, 0.0])
        out = tensor_exponents(L1, L2)
        assert sorted(e.real for e in out.eigenvalues) == [0.3, 0.3, 0.7, 0.7]

    def test_cardinality_and_symmetry(self):
        L1 = ExponentData.diagonal([0.1, 0.2])
        L2 = ExponentData.diagonal([0.05, 0.4])
        a = tensor_exponents(L1, L2)
        b = tensor_exponents(L2, L1)
        assert len(a.eigenvalues) == 4
        assert sorted(e.real for e in a.eigenvalues) == pytest.approx(
            sorted(e.real for e in b.eigenvalues)
        )

    def test_kronecker_matrix(self):
        L1 = ExponentData.diagonal([0.1, 0.2])
        L2 = ExponentData.diagonal([0.05, 0.4])
        out = tensor_exponents(L1, L2)
        eig = np.linalg.eigvals(out.matrix_array())
        assert np.allclose(sorted(eig.real), sorted(e.real for e in out.eigenvalues))

    def test_group_mismatch(self):
        with pytest.raises(GroupMismatch):
            tensor_exponents(
                ExponentData.diagonal([0.1, 0.2]),
                ExponentData.diagonal([0.1, 0.2], Group.G),
            )


class TestSym3Exponents:
    def test_formula(self):
        L = ExponentData.diagonal([Fraction(1, 4), Fraction(1, 12)])
        out = sym3_exponents(L)
        got = sorted(e.real for e in out.eigenvalues)
        assert np.allclose(got, sorted([3 / 4, 7 / 12, 5 / 12, 1 / 4]))
        assert abs(out.trace - 2) < 1e-14

    def test_zero(self):
        out = sym3_exponents(ExponentData.diagonal([0, 0]))
        assert out.eigenvalues == (0j, 0j, 0j, 0j)

    def test_matrix_first_row(self):
        mat = ((0.1, 0.3), (0.2, 0.7))
        eigs = tuple(np.linalg.eigvals(np.array(mat)))
        L = ExponentData(eigs, Group.GAMMA, mat)
        out = sym3_exponents(L)
        assert out.matrix[0] == (3 * 0.1, 0.3, 0j, 0j)
        assert abs(sum(np.diag(out.matrix_array())) - 6 * (0.1 + 0.7)) < 1e-12

    def test_wrong_rank(self):
        with pytest.raises(WrongRank):
            sym3_exponents(ExponentData.diagonal([0.1, 0.2, 0.3]))


class TestInducedExponents:
    def test_halving_rule(self):
        L = ExponentData.diagonal([0.25, 0.5], Group.G)
        out = induced_exponents(L)
        got = sorted(e.real for e in out.eigenvalues)
        assert np.allclose(got, [1 / 8, 1 / 4, 5 / 8, 3 / 4])
        assert abs(out.trace - 7 / 4) < 1e-14
        assert out.group is Group.GAMMA

    def test_rank_one_analogue(self):
        out = induced_exponents(ExponentData.diagonal([0.0], Group.G))
        assert sorted(e.real for e in out.eigenvalues) == [0.0, 0.5]

    def test_matrix_exponentiates_to_block_t(self):
        L = ExponentData.diagonal([0.3, 0.45 + 0.05j], Group.G)
        out = induced_exponents(L)
        from scipy.linalg import expm

        img = expm(2j * np.pi * out.matrix_array())
        t2 = np.diag([cmath.exp(2j * cmath.pi * e) for e in L.eigenvalues])
        block = np.block(
            [[np.zeros((2, 2)), t2], [np.eye(2), np.zeros((2, 2))]]
        )
        assert np.allclose(img, block, atol=1e-9)

    def test_group_mismatch(self):
        with pytest.raises(GroupMismatch):
            induced_exponents(ExponentData.diagonal([0.1, 0.2]))

    def test_spectrum_validation_against_rep(self):
        rep = GRank2Rep(0, 1, ZETA, ZETA**2, 0.7 + 0.2j)
        mu = np.linalg.eigvals(rep.t2_matrix())
        eigs = [cmath.log(m) / (2j * cmath.pi) for m in mu]
        L = ExponentData.diagonal(eigs, Group.G)
        induced_exponents(L, rep)  # consistent: no raise
        bad = ExponentData.diagonal([0.123, 0.456], Group.G)
        with pytest.raises(InconsistentRep):
            induced_exponents(bad, rep)


class TestConstructedRank4:
    def test_functor_spectra(self):
        alpha = rank2(0.3, 1 / 6 - 0.3)
        beta = rank2(1 / 3, -1 / 6)
        t = rank4_from_tensor(alpha, beta)
        prods = sorted(
            (x * y for x in alpha.t_eigenvalues() for y in beta.t_eigenvalues()),
            key=lambda z: (z.real, z.imag),
        )
        assert np.allclose(
            prods, sorted(t.t_eigenvalues(), key=lambda z: (z.real, z.imag))
        )
        s = rank4_from_sym3(alpha)
        x, y = alpha.t_eigenvalues()
        assert np.allclose(
            sorted(s.t_eigenvalues(), key=lambda z: (z.real, z.imag)),
            sorted([x**3, x**2 * y, x * y**2, y**3], key=lambda z: (z.real, z.imag)),
        )

    def test_tensor_and_sym3_data_validate(self):
        alpha = rank2(0.3, 1 / 6 - 0.3)
        beta = rank2(1 / 3, -1 / 6)
        assert rank4_from_tensor(alpha, beta).trace_residuals()["trace_R"] < 1e-9
        assert rank4_from_sym3(alpha).trace_residuals()["trace_R"] < 1e-9

    def test_induced_rank4(self):
        rep = GRank2Rep(0, 1, ZETA, ZETA**2, 0.7 + 0.2j)
        r4 = rank4_from_induction(rep.twist(1))
        assert r4.e == rep.e
        assert r4.trace_residuals()["trace_R"] < 1e-8

    def test_restriction_index(self):
        rep = GRank2Rep(0, 1, ZETA, ZETA**2, 0.7 + 0.2j)
        assert restriction_index(rep) == 0
        assert restriction_index(rep.twist(1)) == 2  # one more twist closes the orbit


class TestFunctorSpectrumInvariant:
    """e^{2 pi i e} lands in the constructed representation's T-spectrum for
    every eigenvalue each functor emits."""

    def assert_spectrum(self, exponents, t_eigenvalues):
        for ev in exponents.eigenvalues:
            image = cmath.exp(2j * cmath.pi * ev)
            assert min(abs(image - t) for t in t_eigenvalues) < 1e-9

    def test_tensor_and_sym3(self):
        rng = np.random.default_rng(23)
        for _ in range(8):
            s1, s2 = rng.integers(0, 12, 2) * 2  # even twelfth-root scales
            r1 = float(rng.uniform(-0.4, 0.6))
            r2 = s1 / 12 - r1
            t1 = float(rng.uniform(-0.4, 0.6))
            t2 = s2 / 12 - t1
            alpha, beta = rank2(r1, r2), rank2(t1, t2)
            L1 = ExponentData.diagonal([r1, r2])
            L2 = ExponentData.diagonal([t1, t2])
            both = tensor_exponents(L1, L2)
            self.assert_spectrum(
                both,
                [x * y for x in alpha.t_eigenvalues() for y in beta.t_eigenvalues()],
            )
            x, y = alpha.t_eigenvalues()
            self.assert_spectrum(
                sym3_exponents(L1), [x**3, x**2 * y, x * y**2, y**3]
            )

    def test_induction(self):
        rep = GRank2Rep(0, 1, ZETA, ZETA**2, 0.7 + 0.2j)
        mu = np.linalg.eigvals(rep.t2_matrix())
        eigs = [cmath.log(m) / (2j * cmath.pi) for m in mu]
        out = induced_exponents(ExponentData.diagonal(eigs, Group.G))
        targets = [s * cmath.sqrt(m) for m in mu for s in (1, -1)]
        self.assert_spectrum(out, targets)
