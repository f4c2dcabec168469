"""q- and q2-expansions of the classical level-one forms and the level-2
generators.

The catalog is built once at a fixed truncation order and cached: Eisenstein
series, eta powers, Delta, j, the hauptmodul K = 1728/j, the theta fourth
powers, the weight-two generators f and g of the index-two subgroup's ring of
forms, and its hauptmodul Z.  All q-series carry integer coefficients exactly
(Python ints), so double versus extended precision only enters through the
irrational constants.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

import mpmath

from .errors import WrongNome
from .series import Nome, PuiseuxSeries, relative_residual


class Numerics:
    """Constant factory for the selected floating-point backend."""

    def __init__(self, precision: str = "double"):
        if precision not in ("double", "extended"):
            raise ValueError(f"unknown precision {precision!r}")
        self.precision = precision

    def num(self, x):
        if self.precision == "extended":
            return mpmath.mpc(x)
        return complex(x)

    @property
    def i(self):
        return self.num(1j)

    def root_of_unity(self, p: int, q: int):
        """e^{2 pi i p / q}, principal values throughout."""
        if self.precision == "extended":
            return mpmath.exp(2j * mpmath.pi * mpmath.mpf(p) / q)
        return cmath.exp(2j * cmath.pi * p / q)

    def sqrt(self, x):
        if self.precision == "extended":
            return mpmath.sqrt(mpmath.mpf(x))
        return complex(x) ** 0.5


def _divisor_power_sums(power: int, n_max: int) -> list[int]:
    sig = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        dp = d**power
        for m in range(d, n_max + 1, d):
            sig[m] += dp
    return sig


def _euler_product(n_max: int) -> list[int]:
    """Coefficients of prod_{n>=1} (1 - q^n) by the pentagonal number theorem."""
    coeffs = [0] * (n_max + 1)
    coeffs[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 > n_max:
            break
        sign = -1 if k % 2 else 1
        coeffs[g1] += sign
        if g2 <= n_max:
            coeffs[g2] += sign
        k += 1
    return coeffs


_EISENSTEIN_FACTORS = {2: -24, 4: 240, 6: -504}


class ClassicalCatalog:
    """Immutable cache of classical series at one truncation order.

    q-series are expanded through q^order; q2-series through q2^(2*order),
    so mixed level-one / level-two identities truncate consistently.
    """

    def __init__(self, order: int, precision: str = "double"):
        if order < 1:
            raise ValueError("catalog order must be >= 1")
        self.order = order
        self.numerics = Numerics(precision)
        self.xi = self.numerics.root_of_unity(1, 6)
        self._cache: dict = {}

    @property
    def q2_order(self) -> int:
        return 2 * self.order

    def _memo(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    # -- level one, nome q ----------------------------------------------------

    def eisenstein(self, k: int) -> PuiseuxSeries:
        """E_2, E_4 or E_6, normalized to constant term 1."""
        if k not in _EISENSTEIN_FACTORS:
            raise ValueError(f"eisenstein weight must be 2, 4 or 6, got {k}")

        def build():
            sig = _divisor_power_sums(k - 1, self.order)
            factor = _EISENSTEIN_FACTORS[k]
            coeffs = [1] + [factor * sig[n] for n in range(1, self.order + 1)]
            return PuiseuxSeries.make(Nome.Q, 0.0, coeffs)

        return self._memo(("E", k), build)

    def eta_power(self, m: int, nome: Nome = Nome.Q) -> PuiseuxSeries:
        """q^(m/24) * prod (1-q^n)^m; as a q2-series the lead exponent is m/12."""
        nome = Nome(nome)
        if nome is Nome.Q2:
            return self._memo(
                ("eta2", m),
                lambda: self.eta_power(m).retag_q2().truncate(self.q2_order),
            )
        if nome is not Nome.Q:
            raise WrongNome("eta powers live in nome q or q2")

        def build():
            euler = PuiseuxSeries.make(Nome.Q, 0.0, _euler_product(self.order))
            if m == 0:
                unit = PuiseuxSeries.one(Nome.Q, self.order)
            elif m > 0:
                unit = euler**m
            else:
                unit = (euler ** (-m)).invert()
            # exact rational lead exponent: it enters Euler-operator factors
            # and must not perturb downstream ill-conditioned divisions
            return PuiseuxSeries(Nome.Q, Fraction(m, 24), unit.coeffs)

        return self._memo(("eta", m), build)

    def delta(self) -> PuiseuxSeries:
        return self.eta_power(24)

    def j_invariant(self) -> PuiseuxSeries:
        return self._memo(
            "J", lambda: self.eisenstein(4) ** 3 * self.delta().invert()
        )

    def k_hauptmodul(self) -> PuiseuxSeries:
        """K = 1728/j = 1728 Delta / E_4^3, leading term 1728 q."""
        return self._memo(
            "K",
            lambda: (self.delta() * (self.eisenstein(4) ** 3).invert()).scale(1728),
        )

    # -- level two, nome q2 ----------------------------------------------------

    def eisenstein_q2(self, k: int) -> PuiseuxSeries:
        return self._memo(
            ("E2nome", k),
            lambda: self.eisenstein(k).retag_q2().truncate(self.q2_order),
        )

    def theta_fourth_powers(self) -> tuple[PuiseuxSeries, PuiseuxSeries, PuiseuxSeries]:
        """theta_2^4, theta_3^4, theta_4^4 as q2-series, by lattice summation."""

        def build():
            n2 = self.q2_order
            t3 = [0] * (n2 + 1)
            t4 = [0] * (n2 + 1)
            t3[0] = t4[0] = 1
            n = 1
            while n * n <= n2:
                t3[n * n] += 2
                t4[n * n] += 2 * (-1) ** n
                n += 1
            # theta_2 = 2 q2^{1/4} sum q2^{n(n+1)}; its 4th power has integer exponents
            t2u = [0] * (n2 + 1)
            n = 0
            while n * (n + 1) <= n2:
                t2u[n * (n + 1)] += 2
                n += 1
            theta2 = PuiseuxSeries.make(Nome.Q2, 0.25, t2u)
            theta3 = PuiseuxSeries.make(Nome.Q2, 0.0, t3)
            theta4 = PuiseuxSeries.make(Nome.Q2, 0.0, t4)
            return (theta2**4, theta3**4, theta4**4)

        return self._memo("theta4", build)

    def fg_generators(self) -> tuple[PuiseuxSeries, PuiseuxSeries]:
        """Weight-two generators f and g = f|T of the level-2 ring of forms."""

        def build():
            t2, t3, t4 = self.theta_fourth_powers()
            num = self.numerics
            xi5 = num.root_of_unity(5, 6)
            f = t2.scale(1 + self.xi) - (t3 + t4).scale(xi5)
            # f|T flips the sign of every odd q2-coefficient
            g = PuiseuxSeries(
                Nome.Q2,
                f.lead_exponent,
                tuple(c if n % 2 == 0 else -c for n, c in enumerate(f.coeffs)),
            )
            return f, g

        return self._memo("fg", build)

    def h_series(self) -> PuiseuxSeries:
        """h = E_6 / (12^{3/2} eta^12) as a q2-series (weight zero, pole at the cusp)."""

        def build():
            c = self.numerics.sqrt(1728)
            return self.eisenstein_q2(6) * self.eta_power(12, Nome.Q2).scale(c).invert()

        return self._memo("h", build)

    def z_hauptmodul(self) -> PuiseuxSeries:
        """Hauptmodul Z = 2 * 12^{3/2} eta^12 / (12^{3/2} eta^12 + i E_6) of the
        index-two subgroup; vanishes at the cusp with leading coefficient
        -2i * 12^{3/2}."""

        def build():
            num = self.numerics
            c = num.sqrt(1728)
            eta12 = self.eta_power(12, Nome.Q2)
            denom = eta12.scale(c) + self.eisenstein_q2(6).scale(num.i)
            z = eta12.scale(2 * c) * denom.invert()
            # coefficients grow ~83 per order; doubles saturate near order 300
            if self.numerics.precision == "double" and not all(
                abs(v) < float("inf") and abs(v) == abs(v) for v in z.coeffs
            ):
                raise OverflowError(
                    "hauptmodul coefficients exceed double range at order "
                    f"{self.q2_order}; build the catalog with precision='extended'"
                )
            return z

        return self._memo("Z", build)

    def z_of_fg_check(self) -> float:
        """Residual of (f^3 - g^3) - Z f^3, a self-test of the Z normalization.

        Normalized against the Z-series scale: the hauptmodul's coefficients
        grow exponentially (pole at the order-three elliptic point), so that
        is the magnitude the convolution cancels from."""
        f, g = self.fg_generators()
        z = self.z_hauptmodul()
        f3, g3 = f**3, g**3
        residual = (f3 - g3) - z * f3
        return relative_residual(residual, z, f3, g3)

    # -- derivatives ------------------------------------------------------------

    def theta_q(self, s: PuiseuxSeries) -> PuiseuxSeries:
        """q d/dq on a q- or q2-series (half the q2-Euler operator)."""
        if s.nome is Nome.Q:
            return s.theta()
        if s.nome is Nome.Q2:
            return s.theta().scale(0.5)
        raise WrongNome("theta_q acts on q- or q2-series")

    def e2_for(self, nome: Nome) -> PuiseuxSeries:
        if nome is Nome.Q:
            return self.eisenstein(2)
        if nome is Nome.Q2:
            return self.eisenstein_q2(2)
        raise WrongNome("no quasi-modular E_2 in this nome")

    def modular_derive(self, s: PuiseuxSeries, k) -> PuiseuxSeries:
        """Weight-k modular derivative theta_q - (k/12) E_2 on a scalar series.

        The k/12 factor is kept as an exact rational so the whole derivative
        is exact on exact input; this matters when results later feed
        exponentially ill-conditioned divisions."""
        k = Fraction(k)
        return self.theta_q(s) - self.e2_for(s.nome).scale(k / 12) * s

    # -- named access and self-test ----------------------------------------------

    def series(self, name: str) -> PuiseuxSeries:
        """Look up a catalog series by name (e.g. 'E4', 'Delta', 'Eta^12', 'Z')."""
        key = name.strip()
        low = key.lower()
        if low.startswith(("eta^", "etapow(")):
            m = int(low.split("^")[-1].rstrip(")").split("(")[-1])
            return self.eta_power(m)
        table = {
            "e2": lambda: self.eisenstein(2),
            "e4": lambda: self.eisenstein(4),
            "e6": lambda: self.eisenstein(6),
            "delta": self.delta,
            "j": self.j_invariant,
            "k": self.k_hauptmodul,
            "theta2_4": lambda: self.theta_fourth_powers()[0],
            "theta3_4": lambda: self.theta_fourth_powers()[1],
            "theta4_4": lambda: self.theta_fourth_powers()[2],
            "f": lambda: self.fg_generators()[0],
            "f_gen": lambda: self.fg_generators()[0],
            "g": lambda: self.fg_generators()[1],
            "g_gen": lambda: self.fg_generators()[1],
            "h": self.h_series,
            "h_haupt": self.h_series,
            "z": self.z_hauptmodul,
            "z_haupt": self.z_hauptmodul,
        }
        if low not in table:
            raise KeyError(f"unknown classical series {name!r}")
        return table[low]()

    def identity_residuals(self) -> dict[str, float]:
        """Level-one and level-two defining identities in one dictionary.

        The level-two identities involve series whose coefficients grow
        exponentially, so they only fit double precision at moderate orders;
        callers wanting order-200 level-one checks should use
        :meth:`level_one_residuals` on a large catalog and
        :meth:`level_two_residuals` on a smaller one.
        """
        return {**self.level_one_residuals(), **self.level_two_residuals()}

    def level_one_residuals(self) -> dict[str, float]:
        """Relative residuals of the level-one identity suite (nome q)."""
        e2, e4, e6 = (self.eisenstein(k) for k in (2, 4, 6))
        delta = self.delta()
        res: dict[str, float] = {}

        discr = e4**3 - e6**2
        res["e4^3-e6^2=1728delta"] = relative_residual(
            discr - delta.scale(1728), discr
        )
        res["delta=eta^24"] = relative_residual(delta - self.eta_power(24), delta)
        jk = self.j_invariant() * self.k_hauptmodul()
        res["j*K=1728"] = relative_residual(
            jk - PuiseuxSeries.polynomial(Nome.Q, [1728], jk.order), jk
        )
        d12 = self.theta_q(delta) - e2 * delta
        res["D12(delta)=0"] = relative_residual(d12, delta, e2 * delta)
        res["ramanujan_e2"] = relative_residual(
            self.theta_q(e2) - (e2 * e2 - e4).scale(1 / 12), e4
        )
        res["ramanujan_e4"] = relative_residual(
            self.theta_q(e4) - (e2 * e4 - e6).scale(1 / 3), e6
        )
        res["ramanujan_e6"] = relative_residual(
            self.theta_q(e6) - (e2 * e6 - e4 * e4).scale(1 / 2), e4 * e4
        )
        return res

    def level_two_residuals(self) -> dict[str, float]:
        """Relative residuals of the level-two generator suite (nome q2)."""
        res: dict[str, float] = {}
        f, g = self.fg_generators()
        e4_2, e6_2 = self.eisenstein_q2(4), self.eisenstein_q2(6)
        xi = self.xi
        res["f*g=-4xi*e4"] = relative_residual(f * g + e4_2.scale(4 * xi), f * g)
        f3, g3 = f**3, g**3
        res["f^3+g^3=16e6"] = relative_residual(f3 + g3 - e6_2.scale(16), f3)
        df = self.modular_derive(f, 2)
        res["D(f)=(xi/12)g^2"] = relative_residual(df - (g * g).scale(xi / 12), g * g)
        d2f = self.modular_derive(df, 4)
        res["D^2(f)=(1/18)e4*f"] = relative_residual(
            d2f - (e4_2 * f).scale(1 / 18), e4_2 * f
        )
        z = self.z_hauptmodul()
        k_q2 = self.k_hauptmodul().retag_q2().truncate(self.q2_order)
        zm1 = z + PuiseuxSeries.polynomial(Nome.Q2, [-1], z.order)
        # cleared of the denominator: K * 4(Z-1) = Z^2
        lhs = k_q2 * zm1.scale(4)
        rhs = z * z
        res["K=Z^2/(4(Z-1))"] = relative_residual(lhs - rhs, lhs, rhs)
        h = self.h_series()
        h2 = h * h
        one = PuiseuxSeries.one(Nome.Q2, h2.order)
        res["h^2+1=1/K"] = relative_residual((h2 + one) * k_q2 - one, h2, k_q2)
        res["Z=(f^3-g^3)/f^3"] = self.z_of_fg_check()
        gf3 = (g * f.invert()) ** 3
        one = PuiseuxSeries.one(Nome.Q2, z.order)
        res["(g/f)^3=1-Z"] = relative_residual(gf3 + z - one, z, gf3)
        lhs = self.theta_q(z)
        rhs = g * g * (f.scale(4 * (xi - 1))).invert() * z
        res["theta_q=g^2/(4(xi-1)f)theta_Z"] = relative_residual(lhs - rhs, lhs)
        return res
