"""Representation parameters, irreducibility criteria, and the three exponent
functors (tensor product, symmetric cube, induction).

Representations are stored by normal-form parameters only; the actual
matrices are reconstructed on demand for validation.  Exponent data is a
list of eigenvalues of a choice of exponents L with e^{2 pi i L} = rho(T),
optionally with the full matrix attached.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    GroupMismatch,
    InconsistentRep,
    WrongRank,
)

TOL = 1e-9

XI = cmath.exp(2j * cmath.pi / 6)
ZETA3 = cmath.exp(2j * cmath.pi / 3)


class Group(str, Enum):
    GAMMA = "Gamma"  # SL2(Z); exponents for rho(T)
    G = "G"          # index-two subgroup; exponents for rho(T^2)


def _match_multisets(left, right, tol: float = 1e-8) -> bool:
    """Greedy matching of two complex multisets within tol."""
    if len(left) != len(right):
        return False
    pool = list(right)
    for a in left:
        hit = min(range(len(pool)), key=lambda i: abs(pool[i] - a), default=None)
        if hit is None or abs(pool[hit] - a) > tol:
            return False
        pool.pop(hit)
    return True


# ---------------------------------------------------------------------------
# rank 2 over the full modular group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rank2Rep:
    """Irreducible rank-2 representation, by the eigenvalues x, y of rho(T).

    ``a`` is the determinant invariant: x*y = e^{2 pi i a / 12} (always even,
    since rho(-I) = +-I forces det rho(-I) = 1).  ``jordan`` marks the x = y
    single-Jordan-block family nu_chi.
    """

    x: complex
    y: complex
    a: int
    jordan: bool

    @classmethod
    def from_eigenvalues(cls, x, y) -> "Rank2Rep":
        x, y = complex(x), complex(y)
        prod = x * y
        if abs(abs(prod) - 1) > 1e-8:
            raise InconsistentRep(f"|xy| = {abs(prod)} but det rho(T) must be unimodular")
        ang = cmath.phase(prod) / (2 * cmath.pi)  # in (-1/2, 1/2]
        a = round(12 * ang) % 12
        if abs(prod - cmath.exp(2j * cmath.pi * a / 12)) > 1e-8 or a % 2:
            raise InconsistentRep(f"xy = {prod} is not a sixth root of unity")
        return cls(x, y, a, jordan=abs(x - y) <= TOL)

    @property
    def t_regular(self) -> bool:
        return not self.jordan

    @property
    def parity(self) -> int:
        """e with rho(-I) = (-1)^e; equals a/2 + 1 mod 2."""
        return (self.a // 2 + 1) % 2

    @property
    def det_power(self) -> int:
        """Exponent of the determinant on the sixth-root scale: xy = xi^this."""
        return (self.a // 2) % 6

    def t_eigenvalues(self) -> tuple[complex, complex]:
        return (self.x, self.y)


def rank2_is_irreducible(rep: Rank2Rep) -> bool:
    """x^2 - xy + y^2 != 0; the Jordan family nu_chi is always irreducible."""
    if rep.jordan:
        return True
    return abs(rep.x**2 - rep.x * rep.y + rep.y**2) > TOL


# ---------------------------------------------------------------------------
# rank 4 over the full modular group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rank4Rep:
    """Irreducible rank-4 representation in Tuba-Wenzl normal form.

    x, y, z, w are the eigenvalues of rho(T); d in {0..5} encodes the sign
    choice of D = sqrt(yz/xw) through D = xi^d (xw)^{-1} and pins down
    x y z w = e^{2 pi i d / 3}; e is the parity of rho(-I) and must differ
    from d mod 2.
    """

    x: complex
    y: complex
    z: complex
    w: complex
    d: int
    e: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", self.d % 6)
        object.__setattr__(self, "e", self.e % 2)
        prod = self.x * self.y * self.z * self.w
        if abs(prod - ZETA3**self.d) > 1e-8:
            raise InconsistentRep(
                f"xyzw = {prod} is not e^(2 pi i d/3) for d = {self.d}"
            )
        if self.e % 2 == self.d % 2:
            raise InconsistentRep(f"parity e = {self.e} must differ from d = {self.d} mod 2")

    def t_eigenvalues(self) -> tuple[complex, complex, complex, complex]:
        return (self.x, self.y, self.z, self.w)

    def tuba_wenzl_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """The displayed normal-form matrices rho(T), rho(B) with
        S = B^{-1} T^{-1} B^{-1}.  Reconstructed for validation only."""
        x, y, z, w = self.x, self.y, self.z, self.w
        D = XI**self.d / (x * w)
        Di = 1 / D
        T = np.array(
            [
                [x, (1 + Di + Di**2) * y, (1 + Di + Di**2) * z, w],
                [0, y, (1 + Di) * z, w],
                [0, 0, z, w],
                [0, 0, 0, w],
            ],
            dtype=complex,
        )
        B = np.array(
            [
                [w, 0, 0, 0],
                [-z, z, 0, 0],
                [D * y, -(D + 1) * y, y, 0],
                [-(D**3) * x, (D**3 + D**2 + D) * x, -(D**2 + D + 1) * x, x],
            ],
            dtype=complex,
        )
        return T, B

    def trace_residuals(self) -> dict[str, float]:
        """Deviations from Tr(S) = 0, Tr(R) = -xi^{-d} and rho(-I) = (-1)^e."""
        T, B = self.tuba_wenzl_matrices()
        Binv = np.linalg.inv(B)
        S = Binv @ np.linalg.inv(T) @ Binv
        R = S @ T
        minus_id = S @ S
        return {
            "trace_S": abs(np.trace(S)),
            "trace_R": abs(np.trace(R) + XI ** (-self.d)),
            "minus_identity": float(
                np.max(np.abs(minus_id - ((-1) ** self.e) * np.eye(4)))
            ),
        }


def d_invariant(rep: Rank4Rep) -> int:
    """The sign invariant d of the normal form, re-validated against xyzw."""
    prod = rep.x * rep.y * rep.z * rep.w
    if abs(prod - ZETA3**rep.d) > 1e-8:
        raise InconsistentRep(f"xyzw = {prod} inconsistent with d = {rep.d}")
    return rep.d


# ---------------------------------------------------------------------------
# rank 2 over the index-two subgroup
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GRank2Rep:
    """Irreducible rank-2 representation of the index-two subgroup,
    rho(e, zeta1, zeta2, zeta3, a): rho(-1) = (-1)^e, rho(R0) diagonal with
    entries (-1)^e zeta_i, rho(R1) determined by zeta3 and the free
    parameter a."""

    e: int
    zeta1: complex
    zeta2: complex
    zeta3: complex
    a: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "e", self.e % 2)
        for name in ("zeta1", "zeta2", "zeta3"):
            z = complex(getattr(self, name))
            if abs(z**3 - 1) > 1e-8:
                raise InconsistentRep(f"{name} = {z} is not a cube root of unity")
            object.__setattr__(self, name, z)
        if abs(self.zeta1 - self.zeta2) <= TOL:
            raise InconsistentRep("zeta1 = zeta2 gives a reducible representation")
        a = complex(self.a)
        object.__setattr__(self, "a", a)
        if abs(a**2 + self.zeta3 * a + self.zeta3**2) <= TOL:
            raise InconsistentRep("a^2 + zeta3 a + zeta3^2 = 0 is excluded")

    def r0_matrix(self) -> np.ndarray:
        s = (-1) ** self.e
        return s * np.array([[self.zeta1, 0], [0, self.zeta2]], dtype=complex)

    def r1_matrix(self) -> np.ndarray:
        s = (-1) ** self.e
        a, z3 = self.a, self.zeta3
        return s * np.array(
            [[a, 1], [-(a**2) - z3 * a - z3**2, -z3 - a]], dtype=complex
        )

    def t2_matrix(self) -> np.ndarray:
        """rho(T^2); T^2 = -R1 R0 in the subgroup."""
        return ((-1) ** self.e) * (self.r1_matrix() @ self.r0_matrix())

    def twist(self, j: int) -> "GRank2Rep":
        """Tensor with the j-th power of the cuspidal character beta."""
        zj = ZETA3 ** (j % 3)
        return GRank2Rep(
            self.e,
            self.zeta1 * zj,
            self.zeta2 * zj,
            self.zeta3 * zj**2,
            self.a * zj**2,
        )

    @property
    def restricts_from_gamma(self) -> bool:
        return abs(self.zeta1 + self.zeta2 + self.zeta3) <= 1e-8


def induction_is_irreducible(rep: GRank2Rep) -> bool:
    """Ind rho is irreducible iff zeta1+zeta2+zeta3 != 0 and a avoids one
    explicitly excluded value (sign of the exclusion flips with the parity)."""
    if rep.restricts_from_gamma:
        return False
    excluded = ((-1) ** rep.e) * (
        rep.zeta1 * rep.zeta2 + rep.zeta2 * rep.zeta3 + rep.zeta3**2
    ) / (rep.zeta1 - rep.zeta2)
    return abs(rep.a - excluded) > TOL


# ---------------------------------------------------------------------------
# tensor / symmetric-cube irreducibility
# ---------------------------------------------------------------------------

def _pairwise_distinct(values, tol: float = TOL) -> bool:
    vals = list(values)
    return all(
        abs(vals[i] - vals[j]) > tol
        for i in range(len(vals))
        for j in range(i + 1, len(vals))
    )


def tensor_is_irreducible(alpha: Rank2Rep, beta: Rank2Rep) -> bool:
    if not (rank2_is_irreducible(alpha) and rank2_is_irreducible(beta)):
        return False
    if alpha.t_regular != beta.t_regular:
        return True
    if not alpha.t_regular:
        return False  # nu tensor nu splits into Sym^2 and Lambda^2
    products = [xv * yv for xv in alpha.t_eigenvalues() for yv in beta.t_eigenvalues()]
    return _pairwise_distinct(products)


def sym3_is_irreducible(alpha: Rank2Rep) -> bool:
    if not rank2_is_irreducible(alpha):
        return False
    if not alpha.t_regular:
        return True  # symmetric powers of the inclusion family stay irreducible
    x, y = alpha.t_eigenvalues()
    return _pairwise_distinct([x**3, x**2 * y, x * y**2, y**3])


# ---------------------------------------------------------------------------
# exponent data and functors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentData:
    """Eigenvalues (and optionally the matrix) of a choice of exponents L."""

    eigenvalues: tuple
    group: Group = Group.GAMMA
    matrix: tuple | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "eigenvalues", tuple(complex(e) for e in self.eigenvalues)
        )
        object.__setattr__(self, "group", Group(self.group))
        if self.matrix is not None:
            mat = tuple(tuple(complex(v) for v in row) for row in self.matrix)
            object.__setattr__(self, "matrix", mat)
            arr = np.array(mat, dtype=complex)
            if arr.shape != (self.rank, self.rank):
                raise WrongRank(
                    f"matrix shape {arr.shape} does not match {self.rank} eigenvalues"
                )
            if not _match_multisets(np.linalg.eigvals(arr), self.eigenvalues, 1e-6):
                raise InconsistentRep("matrix spectrum disagrees with eigenvalue list")

    @classmethod
    def diagonal(cls, eigenvalues, group: Group = Group.GAMMA) -> "ExponentData":
        eigs = tuple(complex(e) for e in eigenvalues)
        mat = tuple(
            tuple(eigs[i] if i == j else 0j for j in range(len(eigs)))
            for i in range(len(eigs))
        )
        return cls(eigs, group, mat)

    @property
    def rank(self) -> int:
        return len(self.eigenvalues)

    @property
    def trace(self) -> complex:
        return sum(self.eigenvalues)

    def matrix_array(self) -> np.ndarray | None:
        if self.matrix is None:
            return None
        return np.array(self.matrix, dtype=complex)

    def validate_against(self, t_eigenvalues, tol: float = 1e-8) -> None:
        """Check e^{2 pi i e_j} lands in the representation's T-spectrum."""
        targets = [complex(t) for t in t_eigenvalues]
        for ev in self.eigenvalues:
            image = cmath.exp(2j * cmath.pi * ev)
            if min(abs(image - t) for t in targets) > tol:
                raise InconsistentRep(
                    f"exp(2 pi i {ev}) = {image} is not a T-eigenvalue"
                )

    def to_json(self) -> dict:
        out = {
            "eigenvalues": [[e.real, e.imag] for e in self.eigenvalues],
            "group": self.group.value,
        }
        if self.matrix is not None:
            out["matrix"] = [
                [[v.real, v.imag] for v in row] for row in self.matrix
            ]
        return out

    @staticmethod
    def from_json(data: dict) -> "ExponentData":
        eigs = [complex(re, im) for re, im in data["eigenvalues"]]
        mat = None
        if data.get("matrix") is not None:
            mat = tuple(
                tuple(complex(re, im) for re, im in row) for row in data["matrix"]
            )
        return ExponentData(tuple(eigs), Group(data.get("group", "Gamma")), mat)


def tensor_exponents(L1: ExponentData, L2: ExponentData) -> ExponentData:
    """Kronecker-sum exponents: eigenvalues e_i + f_j, matrix
    L1 (x) I + I (x) L2 when both matrices are present."""
    if L1.group is not L2.group:
        raise GroupMismatch("tensor exponents need a common group")
    eigs = tuple(a + b for a in L1.eigenvalues for b in L2.eigenvalues)
    mat = None
    m1, m2 = L1.matrix_array(), L2.matrix_array()
    if m1 is not None and m2 is not None:
        kron_sum = np.kron(m1, np.eye(L2.rank)) + np.kron(np.eye(L1.rank), m2)
        mat = tuple(tuple(kron_sum[i, j] for j in range(kron_sum.shape[1]))
                    for i in range(kron_sum.shape[0]))
    return ExponentData(eigs, L1.group, mat)


def sym3_exponents(L: ExponentData) -> ExponentData:
    """Symmetric-cube exponents of a rank-2 L: eigenvalues
    (3r, 2r+s, r+2s, 3s), trace 6 Tr(L)."""
    if L.rank != 2:
        raise WrongRank("symmetric cube exponents need rank 2")
    r, s = L.eigenvalues
    eigs = (3 * r, 2 * r + s, r + 2 * s, 3 * s)
    mat = None
    if L.matrix is not None:
        (e1, e2), (e3, e4) = L.matrix
        mat = (
            (3 * e1, e2, 0j, 0j),
            (3 * e3, 2 * e1 + e4, 2 * e2, 0j),
            (0j, 2 * e3, e1 + 2 * e4, 3 * e2),
            (0j, 0j, e3, 3 * e4),
        )
    return ExponentData(eigs, L.group, mat)


def induced_exponents(L: ExponentData, rho: GRank2Rep | None = None) -> ExponentData:
    """Exponents for the induction to the full modular group: eigenvalues
    {e_j/2} and {(e_j+1)/2}, trace Tr(L) + rank/2."""
    if L.group is not Group.G:
        raise GroupMismatch("induced exponents start from exponents for the subgroup")
    eigs = tuple(e / 2 for e in L.eigenvalues) + tuple(
        (e + 1) / 2 for e in L.eigenvalues
    )
    mat = None
    arr = L.matrix_array()
    if arr is not None:
        from scipy.linalg import expm

        d = L.rank
        phase = expm(1j * np.pi * arr)
        eye = np.eye(d)
        C = np.block([[eye, phase], [eye, -phase]])
        inner = np.block([[arr, np.zeros((d, d))], [np.zeros((d, d)), arr + eye]])
        ind = 0.5 * (np.linalg.inv(C) @ inner @ C)
        mat = tuple(tuple(ind[i, j] for j in range(2 * d)) for i in range(2 * d))
    out = ExponentData(eigs, Group.GAMMA, mat)
    if rho is not None:
        t2 = np.linalg.eigvals(rho.t2_matrix())
        images = [cmath.exp(2j * cmath.pi * e) for e in out.eigenvalues]
        targets = [s * cmath.sqrt(mu) for mu in t2 for s in (1, -1)]
        if not _match_multisets(images, targets, 1e-6):
            raise InconsistentRep(
                "induced exponents do not exponentiate onto the induced T-spectrum"
            )
    return out


def rank4_from_tensor(alpha: Rank2Rep, beta: Rank2Rep) -> Rank4Rep:
    """Rank-4 data of alpha (x) beta: products of eigenvalues in
    Kronecker order, d = a6(alpha)+a6(beta)+3 mod 6, parity the sum."""
    eigs = [xv * yv for xv in alpha.t_eigenvalues() for yv in beta.t_eigenvalues()]
    s = alpha.det_power + beta.det_power
    return Rank4Rep(*eigs, d=(s + 3) % 6, e=s % 2)


def rank4_from_sym3(alpha: Rank2Rep) -> Rank4Rep:
    x, y = alpha.t_eigenvalues()
    eigs = [x**3, x**2 * y, x * y**2, y**3]
    d = 0 if alpha.det_power % 2 == 0 else 3
    return Rank4Rep(*eigs, d=d, e=(alpha.det_power + 1) % 2)


def rank4_from_induction(rho: GRank2Rep) -> Rank4Rep:
    """Rank-4 data of Ind rho; the T-matrix is the block antidiagonal
    (0, rho(T^2); 1, 0), with eigenvalues the two square roots of each
    eigenvalue of rho(T^2)."""
    mu = np.linalg.eigvals(rho.t2_matrix())
    eigs = [s * cmath.sqrt(m) for m in mu for s in (1, -1)]
    prod = complex(np.prod(eigs))
    best = min(range(3), key=lambda k: abs(prod - ZETA3**k))
    if abs(prod - ZETA3**best) > 1e-8:
        raise InconsistentRep("induced determinant is not a cube root of unity")
    d = best if best % 2 != rho.e % 2 else best + 3
    return Rank4Rep(*eigs, d=d % 6, e=rho.e)


def beta_twist_orbit(rep: GRank2Rep) -> tuple[GRank2Rep, GRank2Rep, GRank2Rep]:
    return (rep, rep.twist(1), rep.twist(2))


def restriction_index(rep: GRank2Rep) -> int | None:
    """Index j in {0,1,2} of the unique beta-twist that restricts from the
    full group, or None if no twist does."""
    hits = [j for j, r in enumerate(beta_twist_orbit(rep)) if r.restricts_from_gamma]
    if len(hits) == 1:
        return hits[0]
    if not hits:
        return None
    raise InconsistentRep("multiple twists restrict; orbit is degenerate")


def as_complex_pair(value) -> complex:
    """Accept [re, im] pairs, numbers, or strings for JSON rep parameters."""
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    if isinstance(value, str):
        return complex(value)
    return complex(value)


def rep_from_json(data: dict):
    """Parse the RepSpec JSON schema: {"kind": "rank2"|"rank4"|"g-rank2", ...}."""
    kind = data.get("kind")
    if kind == "rank2":
        return Rank2Rep.from_eigenvalues(
            as_complex_pair(data["x"]), as_complex_pair(data["y"])
        )
    if kind == "rank4":
        return Rank4Rep(
            as_complex_pair(data["x"]),
            as_complex_pair(data["y"]),
            as_complex_pair(data["z"]),
            as_complex_pair(data["w"]),
            d=int(data["d"]),
            e=int(data["e"]),
        )
    if kind == "g-rank2":
        return GRank2Rep(
            int(data["e"]),
            as_complex_pair(data["zeta1"]),
            as_complex_pair(data["zeta2"]),
            as_complex_pair(data["zeta3"]),
            as_complex_pair(data["a"]),
        )
    raise InconsistentRep(f"unknown representation kind {kind!r}")
