"""Truncated Puiseux series arithmetic over complex coefficients.

A :class:`PuiseuxSeries` is a finite window ``x^lam * (a_0 + a_1 x + ... +
a_N x^N) + O(x^{lam+N+1})`` with a complex leading exponent ``lam`` and a tag
identifying the formal variable (q, q2, K or Z).  All higher modules build on
this kernel: q-expansions of classical forms, Frobenius solutions on the K-
and Z-lines, and the vector-valued forms themselves.

Coefficients are ordinary ``complex`` by default.  Passing mpmath numbers in
(and setting ``mpmath.mp.dps``) switches the same code paths to extended
precision; the arithmetic below never downcasts.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .errors import (
    NomeMismatch,
    NonIntegralExponentGap,
    NonIntegralThreeTrace,
    NonMonicLeadingCoefficient,
    NonUnitLeadingCoefficient,
    WrongNome,
    ZeroLeadingCoefficient,
)

#: tolerance for deciding that an exponent gap is an integer
INT_GAP_TOL = 1e-9
#: below this magnitude a leading coefficient counts as zero
LEAD_TOL = 1e-12

_MP_SCALARS = (mpmath.mpf, mpmath.mpc)
SCALAR_TYPES = (int, float, complex, Fraction) + _MP_SCALARS


class Nome(str, Enum):
    """Tag for the formal variable a series lives in."""

    Q = "q"     # q = e^{2 pi i tau}
    Q2 = "q2"   # q2 = e^{pi i tau}
    K = "K"     # hauptmodul K = 1728/j of the full modular group
    Z = "Z"     # hauptmodul of the index-two subgroup

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


def cexp(z):
    """exp that preserves mpmath types."""
    if isinstance(z, _MP_SCALARS):
        return mpmath.exp(z)
    return cmath.exp(z)


def clog(z):
    """Principal-branch log that preserves mpmath types."""
    if isinstance(z, _MP_SCALARS):
        return mpmath.log(z)
    return cmath.log(z)


def cpow(base, exponent):
    """Principal-branch complex power base**exponent."""
    if exponent == 0:
        return 1.0 + 0j if not isinstance(base, _MP_SCALARS) else mpmath.mpc(1)
    return cexp(exponent * clog(base))


def as_complex(z) -> complex:
    """Downcast to builtin complex; used only for tolerance tests."""
    if isinstance(z, Fraction):
        return complex(float(z))
    return complex(z)


def nearest_int(z, tol: float = INT_GAP_TOL) -> int | None:
    """Nearest integer to z, or None if z is not integral within tol."""
    zc = as_complex(z)
    n = round(zc.real)
    if abs(zc - n) <= tol:
        return int(n)
    return None


def require_int(z, what: str, tol: float = INT_GAP_TOL) -> int:
    n = nearest_int(z, tol)
    if n is None:
        raise NonIntegralThreeTrace(f"{what} = {z!r} is not an integer within {tol}")
    return n


@dataclass(frozen=True)
class PuiseuxSeries:
    """Truncated series x^lam * sum_n a_n x^n in the variable tagged by nome."""

    nome: Nome
    lead_exponent: complex
    coeffs: tuple

    # -- construction -------------------------------------------------------

    @staticmethod
    def make(nome: Nome, lead_exponent, coeffs: Sequence) -> "PuiseuxSeries":
        return PuiseuxSeries(Nome(nome), lead_exponent, tuple(coeffs))

    @staticmethod
    def zero(nome: Nome, order: int) -> "PuiseuxSeries":
        return PuiseuxSeries(Nome(nome), 0.0, (0,) * (order + 1))

    @staticmethod
    def one(nome: Nome, order: int) -> "PuiseuxSeries":
        return PuiseuxSeries.polynomial(nome, [1], order)

    @staticmethod
    def monomial(nome: Nome, exponent, value, order: int) -> "PuiseuxSeries":
        coeffs = [value] + [0] * order
        return PuiseuxSeries(Nome(nome), exponent, tuple(coeffs))

    @staticmethod
    def polynomial(nome: Nome, coeffs: Sequence, order: int) -> "PuiseuxSeries":
        """Exact polynomial, zero-padded to the requested truncation order."""
        cs = list(coeffs)[: order + 1]
        cs += [0] * (order + 1 - len(cs))
        return PuiseuxSeries(Nome(nome), 0.0, tuple(cs))

    # -- basic observers ----------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, n: int):
        """Coefficient of x^{lead_exponent + n}; zero outside the window."""
        if 0 <= n <= self.order:
            return self.coeffs[n]
        return 0

    def max_abs(self) -> float:
        return max((float(abs(c)) for c in self.coeffs), default=0.0)

    def effective_lead_exponent(self, rel_tol: float = 1e-9):
        """Exponent of the first coefficient that is nonzero relative to the
        largest one, or None for the (numerically) zero series."""
        scale = self.max_abs()
        if scale == 0.0:
            return None
        for n, c in enumerate(self.coeffs):
            if abs(c) > rel_tol * scale:
                return self.lead_exponent + n
        return None

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        head = ", ".join(repr(as_complex(c)) for c in self.coeffs[:4])
        tail = ", ..." if self.order >= 4 else ""
        return (
            f"PuiseuxSeries({self.nome.value}, lam={as_complex(self.lead_exponent)!r},"
            f" [{head}{tail}], order={self.order})"
        )

    # -- ring operations ----------------------------------------------------

    def _require_same_nome(self, other: "PuiseuxSeries") -> None:
        if self.nome is not other.nome:
            raise NomeMismatch(f"cannot combine {self.nome.value!r} with {other.nome.value!r}")

    def __neg__(self) -> "PuiseuxSeries":
        return PuiseuxSeries(self.nome, self.lead_exponent, tuple(-c for c in self.coeffs))

    def __add__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._require_same_nome(other)
        gap = as_complex(other.lead_exponent) - as_complex(self.lead_exponent)
        k = round(gap.real)
        if abs(gap - k) > INT_GAP_TOL:
            raise NonIntegralExponentGap(
                f"leading exponents differ by {gap}, not an integer"
            )
        if k < 0:
            lo, hi, shift = other, self, -k
        else:
            lo, hi, shift = self, other, k
        new_order = min(lo.order, shift + hi.order)
        out = []
        for n in range(new_order + 1):
            c = lo.coeffs[n]
            m = n - shift
            if 0 <= m <= hi.order:
                c = c + hi.coeffs[m]
            out.append(c)
        return PuiseuxSeries(self.nome, lo.lead_exponent, tuple(out))

    def __sub__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, SCALAR_TYPES):
            return self.scale(other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._require_same_nome(other)
        n_out = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for n in range(n_out + 1):
            s = 0
            for i in range(n + 1):
                s += a[i] * b[n - i]
            out.append(s)
        return PuiseuxSeries(
            self.nome, self.lead_exponent + other.lead_exponent, tuple(out)
        )

    def __rmul__(self, other):
        if isinstance(other, SCALAR_TYPES):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "PuiseuxSeries":
        # Fractions are NOT degraded to float: integer series scaled by exact
        # rationals stay exact, which downstream divisions rely on.
        return PuiseuxSeries(self.nome, self.lead_exponent, tuple(c * a for a in self.coeffs))

    def shift(self, m: int, c=1) -> "PuiseuxSeries":
        """Multiply by the exact monomial c * x^m."""
        return PuiseuxSeries(
            self.nome, self.lead_exponent + m, tuple(c * a for a in self.coeffs)
        )

    def __pow__(self, m: int) -> "PuiseuxSeries":
        if not isinstance(m, int):
            raise TypeError("use pow_binomial for non-integer powers")
        if m < 0:
            return self.invert() ** (-m)
        result = PuiseuxSeries.one(self.nome, self.order)
        base = self
        while m:
            if m & 1:
                result = result * base
            base_needed = m >> 1
            if base_needed:
                base = base * base
            m >>= 1
        return result

    def truncate(self, order: int) -> "PuiseuxSeries":
        if order >= self.order:
            return self
        return PuiseuxSeries(self.nome, self.lead_exponent, self.coeffs[: order + 1])

    # -- differential and multiplicative structure ---------------------------

    def theta(self) -> "PuiseuxSeries":
        """Euler operator x d/dx in this series' own variable: a_n -> (lam+n) a_n."""
        lam = self.lead_exponent
        return PuiseuxSeries(
            self.nome, lam, tuple((lam + n) * c for n, c in enumerate(self.coeffs))
        )

    def invert(self) -> "PuiseuxSeries":
        """Multiplicative inverse; requires a nonzero leading coefficient.

        Series with integer coefficients and unit leading term (eta products,
        E_4^3, ...) are inverted in exact integer arithmetic, so identities
        like j * K = 1728 hold with zero residual at any order.
        """
        a0 = self.coeffs[0]
        if abs(a0) <= LEAD_TOL:
            raise NonUnitLeadingCoefficient(
                f"leading coefficient {a0!r} too small to invert"
            )
        exact = (
            isinstance(a0, int)
            and abs(a0) == 1
            and all(isinstance(c, int) for c in self.coeffs)
        )
        inv0 = a0 if exact else 1 / a0
        out = [inv0]
        for n in range(1, self.order + 1):
            s = 0
            for k in range(1, n + 1):
                s += self.coeffs[k] * out[n - k]
            out.append(-inv0 * s)
        return PuiseuxSeries(self.nome, -self.lead_exponent, tuple(out))

    def divide(self, den: "PuiseuxSeries") -> "PuiseuxSeries":
        """Quotient self/den by forward substitution.

        Unlike ``self * den.invert()`` this never materializes the inverse
        series, whose coefficients can grow exponentially (1/E_4 has a pole
        inside the disc) and wreck the quotient's small coefficients through
        cancellation; the substitution keeps every intermediate at the scale
        of the result.
        """
        self._require_same_nome(den)
        b0 = den.coeffs[0]
        if abs(b0) <= LEAD_TOL:
            raise NonUnitLeadingCoefficient(
                f"denominator leading coefficient {b0!r} too small"
            )
        n_out = min(self.order, den.order)
        out = []
        for n in range(n_out + 1):
            acc = self.coeffs[n]
            for k in range(1, n + 1):
                acc = acc - den.coeffs[k] * out[n - k]
            out.append(acc / b0)
        return PuiseuxSeries(
            self.nome, self.lead_exponent - den.lead_exponent, tuple(out)
        )

    def pow_binomial(self, r) -> "PuiseuxSeries":
        """(1 + u)^r for this series written as 1 + u, truncated to its order.

        Requires leading exponent 0 and leading coefficient 1; the caller
        factors out the monomial and scalar first.  Computed through the
        first-order recurrence of y = (1+u)^r, which costs O(N^2) and agrees
        with repeated multiplication for nonnegative integer r.
        """
        lam = as_complex(self.lead_exponent)
        if abs(lam) > INT_GAP_TOL:
            raise NonMonicLeadingCoefficient(
                f"pow_binomial needs leading exponent 0, got {lam}"
            )
        if abs(self.coeffs[0] - 1) > LEAD_TOL:
            raise NonMonicLeadingCoefficient(
                f"pow_binomial needs leading coefficient 1, got {self.coeffs[0]!r}"
            )
        if isinstance(r, Fraction):
            r = float(r)
        u = self.coeffs  # u_j = coeffs[j] for j >= 1
        out = [1]
        for n in range(1, self.order + 1):
            s = 0
            for j in range(1, n + 1):
                s += (r * j - (n - j)) * u[j] * out[n - j]
            out.append(s / n)
        return PuiseuxSeries(self.nome, 0.0, tuple(out))

    def slash_t_inverse(self) -> "PuiseuxSeries":
        """Action of tau -> tau - 1 on a q2-series: a_n picks up e^{-pi i (lam+n)}.

        The integer part of the phase is applied as an exact sign alternation
        so that even/odd coefficient patterns survive at machine precision.
        """
        if self.nome is not Nome.Q2:
            raise WrongNome("slash_t_inverse acts on q2-series only")
        lam = self.lead_exponent
        pi = mpmath.pi if isinstance(lam, _MP_SCALARS) else cmath.pi
        phase0 = cexp(-1j * pi * lam)
        out = []
        sign = 1
        for c in self.coeffs:
            out.append(c * phase0 * sign)
            sign = -sign
        return PuiseuxSeries(self.nome, lam, tuple(out))

    def retag_q2(self) -> "PuiseuxSeries":
        """Re-express a q-series as a q2-series via q = q2^2 (index doubling)."""
        if self.nome is not Nome.Q:
            raise WrongNome("retag_q2 only applies to q-series")
        out = [0] * (2 * self.order + 2)
        for n, c in enumerate(self.coeffs):
            out[2 * n] = c
        return PuiseuxSeries(Nome.Q2, 2 * self.lead_exponent, tuple(out))

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        lam = as_complex(self.lead_exponent)
        return {
            "nome": self.nome.value,
            "lead_exponent": [lam.real, lam.imag],
            "coeffs": [[as_complex(c).real, as_complex(c).imag] for c in self.coeffs],
        }

    @staticmethod
    def from_json(data: dict) -> "PuiseuxSeries":
        lam = complex(*data["lead_exponent"])
        coeffs = tuple(complex(re, im) for re, im in data["coeffs"])
        return PuiseuxSeries(Nome(data["nome"]), lam, coeffs)


def lift_to_mp(s: PuiseuxSeries) -> PuiseuxSeries:
    """Coefficients and exponent as mpmath numbers (exact for ints/floats)."""
    return PuiseuxSeries(
        s.nome, mpmath.mpc(s.lead_exponent), tuple(mpmath.mpc(c) for c in s.coeffs)
    )


def downcast_to_complex(s: PuiseuxSeries) -> PuiseuxSeries:
    return PuiseuxSeries(
        s.nome, as_complex(s.lead_exponent), tuple(as_complex(c) for c in s.coeffs)
    )


def log10_max_abs(s: PuiseuxSeries) -> float:
    """log10 of the largest coefficient magnitude; robust to huge exact ints."""
    import math

    best = 0.0
    for c in s.coeffs:
        if isinstance(c, int):
            if c == 0:
                continue
            v = (abs(c).bit_length() - 1) * 0.3010299956639812
        else:
            a = abs(c)
            if a == 0:
                continue
            try:
                v = math.log10(float(a))
            except (OverflowError, ValueError):
                v = float(mpmath.log10(abs(mpmath.mpc(c))))
        best = max(best, v)
    return best


def composition_dps(x_of_q: PuiseuxSeries, margin: int = 35) -> int:
    """Working precision for substituting x(q) into a series.

    Substitution sums a_n * [x^n]_m; the largest term is governed by the
    per-order growth rate max_j |x_j|^(1/j) (the leading coefficient usually
    dominates: 1728 for K, ~83i for Z), while the result stays at
    modular-form scale.  The digits of headroom must absorb the full
    cancellation between the two.
    """
    import math

    def lg(coeff) -> float | None:
        if isinstance(coeff, int):
            if coeff == 0:
                return None
            return (abs(coeff).bit_length() - 1) * 0.3010299956639812
        mag = abs(coeff)
        if mag == 0:
            return None
        try:
            return math.log10(float(mag))
        except (OverflowError, ValueError):
            return float(mpmath.log10(abs(mpmath.mpc(coeff))))

    lead = lg(x_of_q.coeffs[0]) or 0.0
    rate = max(lead, 0.0)
    for j in range(1, x_of_q.order + 1):
        v = lg(x_of_q.coeffs[j])
        if v is not None:
            rate = max(rate, (v - lead) / j)
    return margin + int(rate * x_of_q.order) + 1


def compose_frobenius(f: PuiseuxSeries, x_of_q: PuiseuxSeries) -> PuiseuxSeries:
    """Substitute x = x(q) into f(x) = x^lam sum_n a_n x^n.

    ``x_of_q`` must look like c0 * q^m * (1 + u(q)) with m a positive integer
    (both hauptmoduls do: K = 1728 q + ..., Z = c q2 + ...).  The fractional
    head x^lam = c0^lam q^{m lam} (1+u)^lam takes one binomial power; the
    integer tail sum a_n x^n is evaluated by Horner's scheme, which keeps all
    intermediates at the scale of the result (expanding each x^{lam+n}
    separately loses catastrophically once the coefficients of x(q) grow).
    The result lives in the variable of ``x_of_q``, truncated to the shorter
    of the two windows.
    """
    if f.nome not in (Nome.K, Nome.Z):
        raise WrongNome(f"composition source must be a K- or Z-series, got {f.nome.value!r}")
    c0 = x_of_q.coeffs[0]
    if abs(c0) <= LEAD_TOL:
        raise ZeroLeadingCoefficient("substituted series has vanishing leading coefficient")
    mu = as_complex(x_of_q.lead_exponent)
    m = round(mu.real)
    if m < 1 or abs(mu - m) > INT_GAP_TOL:
        raise NonIntegralExponentGap(
            f"substituted series needs a positive integer leading exponent, got {mu}"
        )
    n_out = min(x_of_q.order, f.order)
    lam = f.lead_exponent
    if isinstance(lam, _MP_SCALARS) or isinstance(f.coeffs[0], _MP_SCALARS):
        c0 = mpmath.mpc(c0)  # keep the whole evaluation in mp precision
    x = PuiseuxSeries(x_of_q.nome, m, tuple(x_of_q.coeffs[: n_out + 1]))
    tail = PuiseuxSeries.polynomial(x_of_q.nome, [f.coeffs[-1]], n_out)
    for a_n in reversed(f.coeffs[:-1]):
        tail = tail * x + PuiseuxSeries.polynomial(x_of_q.nome, [a_n], n_out)
    unit = PuiseuxSeries(
        x_of_q.nome, 0.0, tuple(c / c0 for c in x.coeffs)
    )
    head = unit.pow_binomial(lam).scale(cpow(c0, lam))
    out = head * tail
    return PuiseuxSeries(x_of_q.nome, m * lam + out.lead_exponent, out.coeffs)


@dataclass(frozen=True)
class VectorSeries:
    """Ordered tuple of component series sharing one nome, with a weight."""

    components: tuple[PuiseuxSeries, ...]
    weight: Fraction

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("VectorSeries needs at least one component")
        nome = self.components[0].nome
        for c in self.components:
            if c.nome is not nome:
                raise NomeMismatch("vector components must share one nome")
        order = min(c.order for c in self.components)
        object.__setattr__(
            self, "components", tuple(c.truncate(order) for c in self.components)
        )
        object.__setattr__(self, "weight", Fraction(self.weight))

    @property
    def rank(self) -> int:
        return len(self.components)

    @property
    def nome(self) -> Nome:
        return self.components[0].nome

    @property
    def order(self) -> int:
        return self.components[0].order

    def map(self, fn: Callable[[PuiseuxSeries], PuiseuxSeries], weight=None) -> "VectorSeries":
        w = self.weight if weight is None else weight
        return VectorSeries(tuple(fn(c) for c in self.components), w)

    def __add__(self, other: "VectorSeries") -> "VectorSeries":
        return VectorSeries(
            tuple(a + b for a, b in zip(self.components, other.components, strict=True)),
            self.weight,
        )

    def __sub__(self, other: "VectorSeries") -> "VectorSeries":
        return VectorSeries(
            tuple(a - b for a, b in zip(self.components, other.components, strict=True)),
            self.weight,
        )

    def __neg__(self) -> "VectorSeries":
        return self.map(lambda c: -c)

    def scale(self, c) -> "VectorSeries":
        return self.map(lambda s: s.scale(c))

    def mul_series(self, s: PuiseuxSeries, weight_shift=0) -> "VectorSeries":
        """Componentwise product with a scalar series of the given weight."""
        return VectorSeries(
            tuple(c * s for c in self.components),
            self.weight + Fraction(weight_shift),
        )

    def lead_exponents(self) -> tuple:
        return tuple(c.lead_exponent for c in self.components)

    def effective_lead_exponents(self, rel_tol: float = 1e-9) -> tuple:
        return tuple(c.effective_lead_exponent(rel_tol) for c in self.components)

    def max_abs(self) -> float:
        return max(c.max_abs() for c in self.components)

    def to_json(self) -> dict:
        return {
            "weight": [self.weight.numerator, self.weight.denominator],
            "components": [c.to_json() for c in self.components],
        }


def relative_residual(residual, *references) -> float:
    """max |residual coefficient| over the max coefficient of the references.

    Works on scalar and vector series alike; the scale floor 1.0 keeps the
    quotient meaningful for identities between O(1)-normalized series.
    """
    def _max(x):
        return x.max_abs()

    scale = max([1.0] + [_max(r) for r in references])
    return _max(residual) / scale
