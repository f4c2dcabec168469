"""End-to-end construction pipelines: rank-2 minimal forms via Gauss
hypergeometric series, tensor-product and symmetric-cube bases of rank four,
and induction from the index-two subgroup via its hauptmodul Z.

Everything here reduces to: produce the weight-zero solutions on the K- or
Z-line, substitute the hauptmodul's q- or q2-expansion, rescale by the right
eta power, and hand the resulting minimal form to the basis assemblers, with
every defining differential relation re-checked on the emitted series.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .classical import ClassicalCatalog
from .errors import (
    DegenerateU,
    ExponentMismatch,
    GroupMismatch,
    NormalizationError,
    NotIrreducible,
    Resonance,
    ResonantExponents,
    ReducibleRep,
    WrongNome,
    WrongRank,
)
from .mlde import (
    CYCLIC,
    NONCYCLIC,
    CaseReport,
    FormBasis,
    FuchsianOperator,
    assemble_cyclic_basis,
    assemble_noncyclic_basis,
    build_cyclic_operator,
    build_noncyclic_operator,
    classify,
    cyclic_coeffs,
    frobenius_solve,
    hypergeom_2f1,
    indicial_shifts,
    modular_derivative,
    nearest_int,
    noncyclic_coeffs,
    operator_residual,
    require_int,
)
from .reps import (
    ExponentData,
    GRank2Rep,
    Group,
    Rank2Rep,
    beta_twist_orbit,
    induced_exponents,
    induction_is_irreducible,
    rank2_is_irreducible,
    rank4_from_sym3,
    rank4_from_tensor,
    sym3_exponents,
    sym3_is_irreducible,
    tensor_exponents,
    tensor_is_irreducible,
)
from .series import (
    Nome,
    PuiseuxSeries,
    VectorSeries,
    as_complex,
    cexp,
    clog,
    compose_frobenius,
    composition_dps,
    downcast_to_complex,
    relative_residual,
)

XI = cmath.exp(2j * cmath.pi / 6)

HYPERGEOMETRIC = "hypergeometric"
NU_CHI = "nu-chi"


# ---------------------------------------------------------------------------
# rank 2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rank2MinimalForm:
    """Minimal-weight form for a rank-2 representation.

    In the T-regular case ``components`` holds the q-expansion and
    ``kline_components`` the weight-zero K-line pair it came from.  In the
    Jordan (nu_chi) family the first coordinate is tau times an eta power and
    has no q-expansion, so only the eta-power second coordinate is emitted.
    """

    k1: int
    source: str
    components: VectorSeries | None
    kline_components: tuple[PuiseuxSeries, PuiseuxSeries] | None = None
    eta_component: PuiseuxSeries | None = None


def rank2_kline_pair(
    L: ExponentData, order: int, lift: bool = False
) -> tuple[PuiseuxSeries, PuiseuxSeries]:
    """Weight-zero K-line solutions K^{f_i} 2F1(f_i, f_i + 1/3; 1 +- delta; K)
    with f_i = (6(r_i - r_j) + 1)/12 the shifted exponents.

    With ``lift`` the parameters enter as mpmath numbers, so the series is
    accurate at the ambient working precision (needed before substituting
    the hauptmodul, which cancels catastrophically)."""
    r1, r2 = L.eigenvalues
    delta = r1 - r2
    if nearest_int(delta) is not None:
        raise ResonantExponents(
            f"exponent gap {delta!r} is an integer; hypergeometric pair degenerates"
        )
    if lift:
        delta = mpmath.mpc(delta)
    third = Fraction(1, 3)
    out = []
    for f, cpar in (((6 * delta + 1) / 12, delta + 1), ((-6 * delta + 1) / 12, -delta + 1)):
        hyp = hypergeom_2f1(f, f + third, cpar, order)
        out.append(PuiseuxSeries(Nome.K, f, hyp.coeffs))
    return tuple(out)


def rank2_minimal(
    rep: Rank2Rep,
    L: ExponentData,
    order: int,
    catalog: ClassicalCatalog,
) -> Rank2MinimalForm:
    """Minimal-weight form at k1 = 6 Tr(L) - 1.

    T-regular representations get the closed hypergeometric form composed
    with K(q) and rescaled by eta^{2 k1}.  The Jordan family has first
    coordinate tau * eta^{2k1+2}, which is not a q-series; only the second
    coordinate is emitted, flagged by ``source``.
    """
    if not rank2_is_irreducible(rep):
        raise ReducibleRep("rank-2 minimal forms require an irreducible representation")
    if L.group is not Group.GAMMA:
        raise GroupMismatch("rank-2 minimal forms use exponents for the full group")
    if L.rank != 2:
        raise WrongRank(f"need 2 exponent eigenvalues, got {L.rank}")
    k1 = require_int(6 * L.trace - 1, "6*Tr(L)-1")
    if rep.jordan:
        L.validate_against([rep.x])
        return Rank2MinimalForm(
            k1,
            NU_CHI,
            components=None,
            eta_component=catalog.eta_power(2 * k1 + 2),
        )
    L.validate_against(rep.t_eigenvalues())
    pair = rank2_kline_pair(L, order)
    k_of_q = catalog.k_hauptmodul().truncate(order)
    # the substitution cancels down from the scale of K's coefficients, so it
    # runs at a working precision sized to that scale
    with mpmath.workdps(composition_dps(k_of_q)):
        pair_hp = rank2_kline_pair(L, order, lift=True)
        comps = tuple(
            downcast_to_complex(compose_frobenius(s, k_of_q)) for s in pair_hp
        )
    eta = catalog.eta_power(2 * k1)
    comps = tuple(c * eta for c in comps)
    return Rank2MinimalForm(k1, HYPERGEOMETRIC, VectorSeries(comps, k1), pair)


def _lifted_pair_exponents(L: ExponentData) -> tuple:
    """Shifted K-line exponents ((6 delta + 1)/12, (-6 delta + 1)/12) built
    from the lifted eigenvalue gap, exactly as the hypergeometric pair does;
    their sum is exactly 1/6 by construction."""
    delta = mpmath.mpc(L.eigenvalues[0] - L.eigenvalues[1])
    return ((6 * delta + 1) / 12, (-6 * delta + 1) / 12)


def _rank2_q_components_hp(
    L: ExponentData, k1: int, order: int, catalog: ClassicalCatalog
) -> tuple[PuiseuxSeries, PuiseuxSeries]:
    """q-components of the rank-2 minimal form at working precision (must run
    inside an mpmath.workdps context)."""
    pair_hp = rank2_kline_pair(L, order, lift=True)
    k_of_q = catalog.k_hauptmodul().truncate(order)
    eta = catalog.eta_power(2 * k1)
    return tuple(compose_frobenius(s, k_of_q) * eta for s in pair_hp)


def _kronecker(a: VectorSeries, b: VectorSeries, weight) -> VectorSeries:
    comps = tuple(ca * cb for ca in a.components for cb in b.components)
    return VectorSeries(comps, weight)


# ---------------------------------------------------------------------------
# tensor products
# ---------------------------------------------------------------------------

def tensor_pipeline(
    alpha: Rank2Rep,
    beta: Rank2Rep,
    L1: ExponentData,
    L2: ExponentData,
    order: int,
    catalog: ClassicalCatalog,
) -> FormBasis:
    """Noncyclic rank-4 basis for alpha (x) beta from the Kronecker product of
    the two rank-2 minimal forms.

    Records the scalar noncyclic equation residual of the weight-zero K-line
    form, the product rule for DF, the four column relations of the
    derivative matrix, and the exponent floor of the quotient form G.
    """
    if not tensor_is_irreducible(alpha, beta):
        raise NotIrreducible("tensor product representation is reducible")
    if not (alpha.t_regular and beta.t_regular):
        raise ResonantExponents(
            "series output for the Jordan family is out of scope; both factors "
            "must be T-regular"
        )
    A = rank2_minimal(alpha, L1, order, catalog)
    B = rank2_minimal(beta, L2, order, catalog)
    L12 = tensor_exponents(L1, L2)
    rep4 = rank4_from_tensor(alpha, beta)
    report = classify(rep4, L12)
    if report.case != NONCYCLIC:
        raise NotIrreducible("tensor products always land in the noncyclic case")
    f_exps = indicial_shifts(L12.eigenvalues, NONCYCLIC)
    co = noncyclic_coeffs(f_exps)
    scalar_op = build_noncyclic_operator(co)
    kline = [sa * sb for sa in A.kline_components for sb in B.kline_components]
    kline_res = max(operator_residual(scalar_op, s) for s in kline)

    # the Kronecker form and the whole noncyclic assembly (it divides by E_4)
    # are carried at working precision and downcast on emission; the shifted
    # exponents are rebuilt from the same lifted gaps as the hypergeometric
    # pair so the quartic's roots match the product's exponents exactly
    k_of_q = catalog.k_hauptmodul().truncate(order)
    dps = max(composition_dps(k_of_q), 45 + int(2.4 * order))
    with mpmath.workdps(dps):
        ca = _rank2_q_components_hp(L1, A.k1, order, catalog)
        cb = _rank2_q_components_hp(L2, B.k1, order, catalog)
        F_hp = VectorSeries(
            tuple(sa * sb for sa in ca for sb in cb), Fraction(report.k1)
        )
        f_hp = [
            fa + fb
            for fa in _lifted_pair_exponents(L1)
            for fb in _lifted_pair_exponents(L2)
        ]
        basis = assemble_noncyclic_basis(F_hp, noncyclic_coeffs(f_hp), catalog, report)

    dA = modular_derivative(A.components, A.k1, catalog)
    dB = modular_derivative(B.components, B.k1, catalog)
    leibniz = _kronecker(dA, B.components, report.k1 + 2) + _kronecker(
        A.components, dB, report.k1 + 2
    )
    res = dict(basis.residuals)
    res["kline_scalar_ode"] = kline_res
    res["tensor_product_rule"] = relative_residual(basis.forms[1] - leibniz, leibniz)
    res["g_exponent_drop"] = _exponent_drop(basis.forms[2], L12.eigenvalues)
    return FormBasis(basis.forms, report, res)


def _exponent_drop(G: VectorSeries, expected_leads) -> float:
    """How far any component of G starts below its expected leading exponent
    (zero when the expansion is holomorphic relative to the exponents)."""
    worst = 0.0
    for comp, expect in zip(G.components, expected_leads, strict=True):
        eff = comp.effective_lead_exponent()
        if eff is None:
            continue
        worst = max(worst, as_complex(expect).real - as_complex(eff).real)
    return worst


# ---------------------------------------------------------------------------
# symmetric cubes
# ---------------------------------------------------------------------------

def sym3_pipeline(
    alpha: Rank2Rep,
    L: ExponentData,
    order: int,
    catalog: ClassicalCatalog,
) -> FormBasis:
    """Cyclic rank-4 basis for Sym^3(alpha) from the cube of the rank-2
    minimal form: F = (f^3, f^2 g, f g^2, g^3) at weight 3 k1."""
    if not sym3_is_irreducible(alpha):
        raise NotIrreducible("symmetric cube representation is reducible")
    if not alpha.t_regular:
        raise ResonantExponents(
            "series output for the Jordan family is out of scope"
        )
    A = rank2_minimal(alpha, L, order, catalog)
    S3L = sym3_exponents(L)
    rep4 = rank4_from_sym3(alpha)
    report = classify(rep4, S3L)
    if report.case != CYCLIC:
        raise NotIrreducible("symmetric cubes always land in the cyclic case")
    f_exps = indicial_shifts(S3L.eigenvalues, CYCLIC)
    co = cyclic_coeffs(f_exps)
    scalar_op = build_cyclic_operator(co)
    fa, ga = A.kline_components
    kline = [fa**3, fa**2 * ga, fa * ga**2, ga**3]
    kline_res = max(operator_residual(scalar_op, s) for s in kline)

    f, g = A.components.components
    F = VectorSeries((f**3, f**2 * g, f * g**2, g**3), Fraction(report.k1))
    basis = assemble_cyclic_basis(F, co, catalog, report)
    res = dict(basis.residuals)
    res["kline_scalar_ode"] = kline_res
    return FormBasis(basis.forms, report, res)


# ---------------------------------------------------------------------------
# induction from the index-two subgroup
# ---------------------------------------------------------------------------

def build_fuchsian_z(u, xi=XI) -> FuchsianOperator:
    """Second-order equation on the Z-line satisfied by the weight-zero
    transported minimal pair, cleared by 81(1-Z)^2; the local exponents at
    Z = 0 are the square roots of -16 e^{2 pi i/6} u.

    The u-independent part of the zeroth-order coefficient is
    (18 Z^2 - 27 Z)/(81 (1-Z)^2), re-derived from the defining derivative
    relation of the pair: it gives local exponents +-1/3 at Z = 1 and
    (1/3, 2/3) at infinity, as the order-three elliptic points require.
    """
    p0 = (1296 * xi * u, 0, 81)
    p1 = (-(1296 * xi * u + 27), -81, -162)
    p2 = (18, 81, 81)
    return FuchsianOperator((p0, p1, p2), Nome.Z)


def u_from_local_exponent(r, xi=XI):
    """Invert the indicial relation r^2 = -16 e^{2 pi i/6} u."""
    return -(r * r) / (16 * xi)


def local_exponent_from_u(u, xi=XI):
    """Principal square root of -16 e^{2 pi i/6} u."""
    val = -16 * xi * u
    if abs(as_complex(val)) == 0:
        return 0j
    return cexp(0.5 * clog(val))


@dataclass(frozen=True)
class InductionJob:
    """Induction input: a normalized orbit representative, exponents for the
    subgroup, the family parameter u of the Z-line equation, and the minimal
    weight k1 (3 Tr(L) in the cyclic branch, 3 Tr(L) + 1 otherwise)."""

    rep: GRank2Rep
    L: ExponentData
    u: complex
    k1: int

    @classmethod
    def make(cls, rep: GRank2Rep, L: ExponentData, u, k1: int | None = None) -> "InductionJob":
        if not rep.restricts_from_gamma:
            raise NormalizationError(
                "orbit must be presented with the restricting member first "
                "(zeta1 + zeta2 + zeta3 = 0)"
            )
        restricting = [r for r in beta_twist_orbit(rep) if r.restricts_from_gamma]
        if len(restricting) != 1:
            raise NormalizationError("twist orbit does not have a unique restricting member")
        for j in (1, 2):
            if not induction_is_irreducible(rep.twist(j)):
                raise NotIrreducible(f"induction of the beta^{j} twist is reducible")
        if L.group is not Group.G:
            raise GroupMismatch("induction starts from exponents for the subgroup")
        if abs(as_complex(u)) <= 1e-14:
            raise DegenerateU("u = 0 makes the local exponents collide")
        if k1 is None:
            t3 = require_int(3 * L.trace, "3*Tr(L)")
            # weight parity must match the representation parity: k1 = e mod 2
            k1 = t3 if (t3 - rep.e) % 2 == 0 else t3 + 1
        return cls(rep, L, complex(u), int(k1))


def induction_minimal_pair(
    job: InductionJob, order: int, catalog: ClassicalCatalog
) -> tuple[VectorSeries, VectorSeries]:
    """Minimal-weight pair (A, B) for the two nontrivial beta-twists.

    Solves the Z-line equation at the exponents +-r, substitutes Z(q2), and
    forms A = eta^{2k1} (g/f) (a, b)^t and
    B = (e^{2 pi i/6}/36) eta^{2k1} (f/g) (3Z a + 9(Z-1) theta_Z a, ...)^t.
    """
    r = local_exponent_from_u(job.u, catalog.xi)
    if abs(as_complex(r)) <= 1e-12:
        raise DegenerateU("u = 0 makes the local exponents collide")
    two_r = nearest_int(2 * r)
    if two_r is not None and two_r != 0:
        raise Resonance(f"local exponents +-{r!r} differ by the integer {two_r}")
    n2 = min(2 * order, catalog.q2_order)
    # Both the hauptmodul substitution and the theta-quotient products cancel
    # down from exponentially large coefficients to modular-form scale, so
    # the whole pair is assembled at a working precision sized to that growth
    # (|2 * 12^(3/2)| ~ 83 per q2-order, bounded by 2 digits) and downcast at
    # the end.
    dps = 40 + 2 * n2
    with mpmath.workdps(dps):
        hp = ClassicalCatalog(max(1, (n2 + 1) // 2), "extended")
        xi = hp.xi
        op = build_fuchsian_z(mpmath.mpc(job.u), xi)
        r_hp = local_exponent_from_u(mpmath.mpc(job.u), xi)
        z_of_q2 = hp.z_hauptmodul()
        f, g = hp.fg_generators()
        g_over_f = g.divide(f)
        f_over_g = f.divide(g)
        eta = hp.eta_power(2 * job.k1, Nome.Q2)
        a_comps = []
        b_comps = []
        for exponent in (r_hp, -r_hp):
            sol = frobenius_solve(op, exponent, n2)
            # second member of the pair: (e^{2 pi i/6}/36)(f/g)(3 Z a + 9 (Z-1) theta_Z a);
            # the 3Z coefficient is forced by D(A) = g B via the theta-quotient calculus
            combo = sol.shift(1, 3) + sol.theta().shift(1, 9) - sol.theta().scale(9)
            a_comps.append(
                downcast_to_complex(eta * g_over_f * compose_frobenius(sol, z_of_q2))
            )
            b_comps.append(
                downcast_to_complex(
                    (eta * f_over_g * compose_frobenius(combo, z_of_q2)).scale(xi / 36)
                )
            )
    A = VectorSeries(tuple(a_comps), Fraction(job.k1))
    B = VectorSeries(tuple(b_comps), Fraction(job.k1))
    return A, B


def induction_relation_residual(
    A: VectorSeries, B: VectorSeries, u, catalog: ClassicalCatalog
) -> float:
    """Residual of the defining relation D(A, B) = (A, B) (0, u f; g, 0),
    i.e. DA = g B and DB = u f A with D at the pair's weight."""
    f, g = catalog.fg_generators()
    dA = modular_derivative(A, A.weight, catalog)
    dB = modular_derivative(B, B.weight, catalog)
    gB = B.mul_series(g)
    ufA = A.mul_series(f).scale(u)
    return max(
        relative_residual(dA - gB, dA, gB),
        relative_residual(dB - ufA, dB, ufA),
    )


def induce_to_gamma(
    F: VectorSeries, L: ExponentData | None = None, tol: float = 1e-6
) -> VectorSeries:
    """Stack F over F|T^{-1}, doubling the rank; the result transforms under
    the induced representation of the full group with exponents Ind L.

    Verifies that the combinations F +- e^{pi i lam} F|T^{-1} have pure
    integer-spaced q-expansions (even/odd q2-offsets), and, when L is given,
    that the exhibited q-exponent multiset equals the induced exponents."""
    if F.nome is not Nome.Q2:
        raise WrongNome("induction to the full group acts on q2-expansions")
    split = max(even_odd_residual(c) for c in F.components)
    if split > tol:
        raise ExponentMismatch(
            f"even/odd q2-splitting fails at {split:.2e}; the components do "
            "not sit on a single exponent lattice"
        )
    if L is not None:
        got = sorted(induced_exponent_multiset(F), key=lambda z: (z.real, z.imag))
        want = sorted(
            (as_complex(v) for v in induced_exponents(L).eigenvalues),
            key=lambda z: (z.real, z.imag),
        )
        if len(got) != len(want) or any(
            abs(g - w) > tol for g, w in zip(got, want)
        ):
            raise ExponentMismatch(
                f"exhibited q-exponents {got} do not match the induced set {want}"
            )
    slashed = tuple(c.slash_t_inverse() for c in F.components)
    return VectorSeries(F.components + slashed, F.weight)


def even_odd_parts(s: PuiseuxSeries) -> tuple[PuiseuxSeries, PuiseuxSeries]:
    """F + e^{pi i lam} F|T^{-1} (even q2-offsets survive) and
    F - e^{pi i lam} F|T^{-1} (odd offsets survive)."""
    lam = s.lead_exponent
    pi = mpmath.pi if isinstance(lam, (mpmath.mpf, mpmath.mpc)) else cmath.pi
    phase = cexp(1j * pi * lam)
    sl = s.slash_t_inverse().scale(phase)
    return s + sl, s - sl


def even_odd_residual(s: PuiseuxSeries) -> float:
    """How far the even/odd split fails: surviving coefficients must sit on
    one parity of q2-offsets exactly."""
    even, odd = even_odd_parts(s)
    scale = max(1e-300, s.max_abs())
    bad = 0.0
    for n in range(even.order + 1):
        if n % 2 == 1:
            bad = max(bad, abs(even.coeffs[n]))
    for n in range(odd.order + 1):
        if n % 2 == 0:
            bad = max(bad, abs(odd.coeffs[n]))
    return float(bad / scale)


def exhibited_exponents(F: VectorSeries) -> ExponentData:
    """Exponent data read off the solved series: effective leading exponent
    per component (declared lead when the window is numerically zero)."""
    eigs = []
    for c in F.components:
        eff = c.effective_lead_exponent()
        eigs.append(c.lead_exponent if eff is None else eff)
    return ExponentData(tuple(eigs), Group.G)


def induced_exponent_multiset(F: VectorSeries) -> list[complex]:
    """q-exponents exhibited by the induced form: each component splits into
    an even and an odd q2-part, contributing lam/2 and (lam+1)/2."""
    out = []
    for c in F.components:
        even, odd = even_odd_parts(c)
        for part in (even, odd):
            eff = part.effective_lead_exponent()
            if eff is not None:
                out.append(as_complex(eff) / 2)
    return out


def induction_pipeline(
    job: InductionJob, order: int, catalog: ClassicalCatalog
) -> tuple[FormBasis, FormBasis]:
    """Full induction route: solve for the minimal pair, verify its defining
    relation, induce both forms to the full group, classify by the exponents
    the series actually exhibit, and assemble the corresponding bases."""
    A, B = induction_minimal_pair(job, order, catalog)
    pair_res = induction_relation_residual(A, B, job.u, catalog)
    out = []
    for F in (A, B):
        L_g = exhibited_exponents(F)
        ind_L = induced_exponents(L_g)
        stacked = induce_to_gamma(F)
        t3 = require_int(3 * ind_L.trace, "3*Tr(Ind L)")
        d = t3 % 3 if (t3 % 3) % 2 != job.rep.e % 2 else t3 % 3 + 3
        cyclic = (t3 - job.rep.e) % 2 != 0
        k1 = t3 - 3 if cyclic else t3 - 2
        case = CaseReport(
            CYCLIC if cyclic else NONCYCLIC,
            k1,
            (k1, k1 + 2, k1 + 4, k1 + 6) if cyclic else (k1, k1 + 2, k1 + 2, k1 + 4),
            d,
            job.rep.e,
        )
        f_exps = indicial_shifts(ind_L.eigenvalues, case.case)
        co = cyclic_coeffs(f_exps) if cyclic else noncyclic_coeffs(f_exps)
        assemble = assemble_cyclic_basis if cyclic else assemble_noncyclic_basis
        basis = assemble(stacked, co, catalog, case)
        res = dict(basis.residuals)
        res["pair_relation"] = pair_res
        res["even_odd_split"] = max(even_odd_residual(c) for c in F.components)
        out.append(FormBasis(basis.forms, case, res))
    return tuple(out)
