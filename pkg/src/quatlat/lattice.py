"""Full lattices and orders inside an indefinite rational quaternion algebra.

A MaximalOrder fixes the coordinate frame for everything else: it selects a
trace-zero basis (i1, i2, i3) of its trace-zero part, and lattices are stored
as integer Hermite forms over a single denominator with respect to the frame
basis (1, i1, i2, i3).  The maximal order itself has denominator 2 in this
frame because the scalars plus the trace-zero part sit at index two inside
it; sublattices of Z + trace-zero part have denominator 1, which is what the
counting layer works with.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from . import intmat
from .arith import factorize
from .errors import (
    ContainmentError,
    DegenerateLatticeError,
    SearchExhausted,
    TheoremViolation,
    UsageError,
)
from .quat import Quat, QuatAlg

FracRow = tuple[Fraction, Fraction, Fraction, Fraction]


def _canonical_rows(rows: list[list[Fraction]]) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Canonical (integer HNF, denominator) pair for a rational row span."""
    den = 1
    for row in rows:
        for v in row:
            den = den * v.denominator // gcd(den, v.denominator)
    scaled = [[int(v * den) for v in row] for row in rows]
    H = intmat.hnf(scaled)
    if len(H) != 4:
        raise DegenerateLatticeError(f"rank {len(H)} span, need 4")
    g = den
    for row in H:
        for v in row:
            g = gcd(g, v)
    if g > 1:
        H = [[v // g for v in row] for row in H]
        den //= g
    return tuple(tuple(row) for row in H), den


class MaximalOrder:
    """A certified maximal order; also the coordinate frame owner.

    basis holds the rational (1, I, J, IJ) coordinates of the frame vectors
    (1, i1, i2, i3), where i1, i2, i3 is the Hermite basis of the trace-zero
    part.  The constructor re-checks closure, unit, and the discriminant
    certificate, so a successfully built instance is genuinely maximal.
    """

    def __init__(self, alg: QuatAlg, ijk_rows: list[list[Fraction]]):
        self.alg = alg
        mat, den = _ijk_canonical(ijk_rows)
        quats = [alg.quat(*(Fraction(v, den) for v in row)) for row in mat]
        if not _raw_is_order(alg, mat, den):
            raise UsageError("basis does not span an order")
        disc = _raw_reduced_discriminant(quats)
        if disc != alg.discriminant:
            raise UsageError(
                f"order has reduced discriminant {disc}, not maximal "
                f"(algebra discriminant {alg.discriminant})"
            )
        # trace-zero basis: rows 2..4 of the Hermite form have scalar part 0
        for row in mat[1:]:
            if row[0] != 0:
                raise TheoremViolation("Hermite rows 2-4 should be trace-zero")
        self.i_basis = tuple(
            alg.quat(0, *(Fraction(v, den) for v in row[1:])) for row in mat[1:]
        )
        self.basis = ((Fraction(1), Fraction(0), Fraction(0), Fraction(0)),) + tuple(
            tuple(q.coords()) for q in self.i_basis
        )
        self._to_ijk = [list(r) for r in self.basis]
        self._from_ijk = intmat.inverse_frac(self._to_ijk)
        # integer Gram of the trace-zero frame under (x, y) -> trd(x * conj(y))
        S = [[0] * 3 for _ in range(3)]
        for k in range(3):
            for l in range(3):
                v = (self.i_basis[k] * self.i_basis[l].conj()).trd()
                if v.denominator != 1:
                    raise TheoremViolation("trace pairing of integral basis not integral")
                S[k][l] = int(v)
        self.gram0 = tuple(tuple(row) for row in S)
        frame_rows = [
            [Fraction(x) for x in self.frame_coords(q)] for q in quats
        ]
        fmat, fden = _canonical_rows(frame_rows)
        self.lattice = Lattice4(self, fmat, fden)
        if fden not in (1, 2):
            raise TheoremViolation(f"maximal order has frame denominator {fden}")
        # scalars plus trace-zero part must sit at index exactly two
        k = self.lattice.z_plus_trace_zero().index_in(self.lattice)
        if k != 2:
            raise TheoremViolation(f"index of scalars + trace-zero part is {k}, not 2")

    @property
    def discriminant(self) -> int:
        return self.alg.discriminant

    def quat_from_frame(self, coords) -> Quat:
        c = [Fraction(v) for v in coords]
        ijk = [
            sum(c[i] * self._to_ijk[i][j] for i in range(4)) for j in range(4)
        ]
        return self.alg.quat(*ijk)

    def frame_coords(self, x: Quat) -> FracRow:
        v = x.coords()
        return tuple(
            sum(v[i] * self._from_ijk[i][j] for i in range(4)) for j in range(4)
        )

    def lattice_from_quats(self, quats: list[Quat]) -> "Lattice4":
        rows = [[Fraction(v) for v in self.frame_coords(q)] for q in quats]
        mat, den = _canonical_rows(rows)
        return Lattice4(self, mat, den)

    def lattice_from_frame_rows(self, rows) -> "Lattice4":
        mat, den = _canonical_rows([[Fraction(v) for v in row] for row in rows])
        return Lattice4(self, mat, den)

    def contains(self, x: Quat) -> bool:
        return self.lattice.contains_quat(x)

    def norm_form_scaled(self, w) -> int:
        """den^2 * nrd of the trace-zero element with scaled coords w.

        Exactly (w S w^T) / 2 for the integer Gram S; always an integer.
        """
        S = self.gram0
        tot = 0
        for k in range(3):
            tot += S[k][k] * w[k] * w[k]
            for l in range(k + 1, 3):
                tot += 2 * S[k][l] * w[k] * w[l]
        assert tot % 2 == 0
        return tot // 2


@dataclass(frozen=True)
class Shape:
    """Elementary divisors (m1 | m2 | m3) of the trace-zero quotient, plus e.

    e is the level divided by m1*m2*m3; it always lands in {1, 2} and equals
    2 exactly when the lattice splits as scalars plus its trace-zero part.
    """

    m1: int
    m2: int
    m3: int
    e: int

    @property
    def level(self) -> int:
        return self.m1 * self.m2 * self.m3 * self.e

    def tuple3(self) -> tuple[int, int, int]:
        return (self.m1, self.m2, self.m3)


@dataclass(frozen=True)
class InvariantFactors:
    """Invariant factors (a1 | a2 | a3 | a4) of a full sublattice, plus t1.

    t1 is the smallest positive integer whose square is divisible by the
    index a1*a2*a3*a4.
    """

    factors: tuple[int, int, int, int]
    t1: int

    @property
    def index(self) -> int:
        a = self.factors
        return a[0] * a[1] * a[2] * a[3]


@dataclass(frozen=True)
class Lattice4:
    """Full-rank lattice in frame coordinates: rows of mat over den.

    The pair (mat, den) is canonical (Hermite form, minimal denominator), so
    equality of values is equality of lattices.
    """

    order: MaximalOrder
    mat: tuple[tuple[int, ...], ...]
    den: int

    def basis_quats(self) -> list[Quat]:
        return [
            self.order.quat_from_frame([Fraction(v, self.den) for v in row])
            for row in self.mat
        ]

    def det_frame(self) -> Fraction:
        return Fraction(abs(intmat.det([list(r) for r in self.mat])), self.den**4)

    def contains_coords(self, coords) -> bool:
        vec = [Fraction(v) * self.den for v in coords]
        c = intmat.solve_left_frac([list(r) for r in self.mat], vec)
        return all(v.denominator == 1 for v in c)

    def contains_quat(self, x: Quat) -> bool:
        return self.contains_coords(self.order.frame_coords(x))

    def is_sublattice_of(self, other: "Lattice4") -> bool:
        return all(
            other.contains_coords([Fraction(v, self.den) for v in row])
            for row in self.mat
        )

    def index_in(self, other: "Lattice4") -> int:
        """[other : self] for self contained in other."""
        if not self.is_sublattice_of(other):
            raise ContainmentError("not a sublattice")
        r = self.det_frame() / other.det_frame()
        if r.denominator != 1:
            raise TheoremViolation("index of a sublattice must be integral")
        return int(r)

    def level(self) -> int:
        """Index in the owning maximal order."""
        return self.index_in(self.order.lattice)

    def contains_one(self) -> bool:
        return self.contains_coords((1, 0, 0, 0))

    def trace_zero_mat(self) -> tuple[tuple[int, ...], ...]:
        """3x3 integer basis of the trace-zero part in (i1, i2, i3) coords.

        Valid for sublattices of the maximal order: trace-zero elements have
        integral frame coordinates, so the denominator divides out.
        """
        rows = []
        for row in self.mat[1:]:
            if any(v % self.den for v in row[1:]):
                raise ContainmentError(
                    "trace-zero part not integral; lattice is not inside the order"
                )
            rows.append(tuple(v // self.den for v in row[1:]))
        return tuple(rows)

    def z_plus_trace_zero(self) -> "Lattice4":
        b = self.trace_zero_mat()
        rows = [(1, 0, 0, 0)] + [(0,) + r for r in b]
        return self.order.lattice_from_frame_rows(rows)

    def shape(self) -> Shape:
        if not self.contains_one():
            raise UsageError("shape needs a lattice containing 1")
        n = self.level()
        d, _, _ = intmat.snf_with_transforms([list(r) for r in self.trace_zero_mat()])
        m1, m2, m3 = d[0][0], d[1][1], d[2][2]
        if n % (m1 * m2 * m3):
            raise TheoremViolation("level not divisible by trace-zero index")
        e = n // (m1 * m2 * m3)
        if e not in (1, 2):
            raise TheoremViolation(f"shape cofactor e = {e} outside {{1, 2}}")
        split_index = self.z_plus_trace_zero().index_in(self)
        if split_index * e != 2:
            raise TheoremViolation("split index and shape cofactor disagree")
        return Shape(m1, m2, m3, e)

    def invariant_factors_in(self, other: "Lattice4") -> InvariantFactors:
        """Invariant factors of self inside other (self must be contained)."""
        inv = intmat.inverse_frac([list(r) for r in other.mat])
        rows = []
        for row in self.mat:
            vals = [
                sum(Fraction(row[i], self.den) * inv[i][j] for i in range(4))
                * other.den
                for j in range(4)
            ]
            if any(v.denominator != 1 for v in vals):
                raise ContainmentError("not a sublattice")
            rows.append([int(v) for v in vals])
        d, _, _ = intmat.snf_with_transforms(rows)
        a = tuple(d[i][i] for i in range(4))
        idx = a[0] * a[1] * a[2] * a[3]
        t1 = 1
        for p, e in factorize(idx).items():
            t1 *= p ** ((e + 1) // 2)
        return InvariantFactors(a, t1)

    def is_balanced(self) -> bool:
        """Largest invariant factor in the maximal order divides t1."""
        f = self.invariant_factors_in(self.order.lattice)
        return f.t1 % f.factors[3] == 0

    def is_order(self) -> bool:
        if not self.contains_one():
            return False
        basis = self.basis_quats()
        return all(self.contains_quat(x * y) for x in basis for y in basis)

    def reduced_discriminant(self):
        """Square root of |det trd(b_i conj(b_j))|; equals d * level for orders."""
        return _raw_reduced_discriminant(self.basis_quats())

    def conjugate_by(self, g: Quat) -> "Lattice4":
        """The lattice g * self * g^-1."""
        if g.nrd() == 0:
            raise UsageError("conjugator must be invertible")
        gi = g.inverse()
        return self.order.lattice_from_quats([g * b * gi for b in self.basis_quats()])


# ---------------------------------------------------------------------------
# module-level operation aliases and constructions
# ---------------------------------------------------------------------------


def level(lat: Lattice4) -> int:
    return lat.level()


def shape(lat: Lattice4) -> Shape:
    return lat.shape()


def invariant_factors(sub: Lattice4, sup: Lattice4) -> InvariantFactors:
    return sub.invariant_factors_in(sup)


def is_balanced(lat: Lattice4) -> bool:
    return lat.is_balanced()


def is_order(lat: Lattice4) -> bool:
    return lat.is_order()


def reduced_discriminant(lat: Lattice4):
    return lat.reduced_discriminant()


def conjugate_lattice(lat: Lattice4, g: Quat) -> Lattice4:
    return lat.conjugate_by(g)


def lattice_sum(a: Lattice4, b: Lattice4) -> Lattice4:
    rows = [[Fraction(v, a.den) for v in row] for row in a.mat]
    rows += [[Fraction(v, b.den) for v in row] for row in b.mat]
    return a.order.lattice_from_frame_rows(rows)


def lattice_product(a: Lattice4, b: Lattice4) -> Lattice4:
    """Lattice spanned by all products x*y of basis elements."""
    quats = [x * y for x in a.basis_quats() for y in b.basis_quats()]
    rows = [[Fraction(v) for v in a.order.frame_coords(q)] for q in quats]
    return a.order.lattice_from_frame_rows(rows)


def lattice_scale(a: Lattice4, s) -> Lattice4:
    s = Fraction(s)
    rows = [[Fraction(v, a.den) * s for v in row] for row in a.mat]
    return a.order.lattice_from_frame_rows(rows)


def intersect(a: Lattice4, b: Lattice4) -> Lattice4:
    """Lattice intersection via duality: dual of the sum of the duals."""
    if a.order is not b.order:
        raise UsageError("lattices must share a maximal order")

    def dual_rows(lat: Lattice4):
        inv = intmat.inverse_frac([list(r) for r in lat.mat])
        # rows of den * inverse-transpose
        return [[inv[i][j] * lat.den for i in range(4)] for j in range(4)]

    stacked = dual_rows(a) + dual_rows(b)
    mat, den = _canonical_rows(stacked)
    inv = intmat.inverse_frac([list(r) for r in mat])
    back = [[inv[i][j] * den for i in range(4)] for j in range(4)]
    mat2, den2 = _canonical_rows(back)
    return Lattice4(a.order, mat2, den2)


def z_plus_f_order(mo: MaximalOrder, f: int) -> Lattice4:
    """The order generated by the scalars and f times the maximal order."""
    if f < 1:
        raise UsageError("f must be a positive integer")
    rows = [[Fraction(1), Fraction(0), Fraction(0), Fraction(0)]]
    rows += [[Fraction(f * v, mo.lattice.den) for v in row] for row in mo.lattice.mat]
    return mo.lattice_from_frame_rows(rows)


def two_sided_prime_ideal(mo: MaximalOrder, p: int) -> Lattice4:
    """The unique two-sided ideal above a ramified prime p.

    Constructed as g * O + p * O for any order element g whose reduced norm
    has p-valuation one; at every other prime the local component is the full
    order.
    """
    if p not in mo.alg.ramified_set():
        raise UsageError(f"{p} is not ramified in the algebra")
    g = None
    for h in range(1, 6):
        for x in norm_elements(mo.lattice, p, h):
            g = x
            break
        else:
            for x in norm_elements(mo.lattice, -p, h):
                g = x
                break
        if g is not None:
            break
    if g is None:
        raise SearchExhausted(f"no element of reduced norm +-{p} at small height")
    basis = mo.lattice.basis_quats()
    quats = [g * b for b in basis] + [p * b for b in basis]
    ideal = mo.lattice_from_quats(quats)
    if ideal.index_in(mo.lattice) != p * p:
        raise TheoremViolation("ramified prime ideal should have index p^2")
    return ideal


def ideal_power_order(mo: MaximalOrder, p: int, k: int) -> Lattice4:
    """The order given by scalars plus the k-th power of the ramified ideal."""
    P = two_sided_prime_ideal(mo, p)
    Pk = P
    for _ in range(k - 1):
        Pk = lattice_product(Pk, P)
    rows = [[Fraction(1), Fraction(0), Fraction(0), Fraction(0)]]
    rows += [[Fraction(v, Pk.den) for v in row] for row in Pk.mat]
    out = mo.lattice_from_frame_rows(rows)
    if not out.is_order():
        raise TheoremViolation("scalars plus an ideal power must be an order")
    return out


def z_plus_zw_order(mo: MaximalOrder, w: Quat, f: int) -> Lattice4:
    """The lattice spanned by 1, w, and f times the maximal order.

    For trace-zero w in the order and f a prime power this cuts out the
    small commutative-plus-congruence orders used by the local tests; the
    caller is responsible for checking is_order and the level.
    """
    rows = [[Fraction(1), Fraction(0), Fraction(0), Fraction(0)]]
    rows.append([Fraction(v) for v in mo.frame_coords(w)])
    rows += [[Fraction(f * v, mo.lattice.den) for v in row] for row in mo.lattice.mat]
    return mo.lattice_from_frame_rows(rows)


def saturate_to_maximal(alg: QuatAlg, ijk_rows) -> MaximalOrder:
    """Grow an order to a maximal one by adjoining integral p-denominators.

    ijk_rows are rational (1, I, J, IJ) coordinate rows of an order basis.
    At each step the excess prime p of the reduced discriminant is attacked
    by scanning (1/p) times the current lattice for integral elements whose
    adjunction keeps multiplicative closure; each success divides the
    discriminant by p, so the loop terminates at the algebra discriminant.
    """
    rows = [[Fraction(v) for v in row] for row in ijk_rows]
    mat, den = _ijk_canonical(rows)
    if not _raw_is_order(alg, mat, den):
        raise UsageError("input is not an order")
    target = alg.discriminant
    while True:
        quats = [alg.quat(*(Fraction(v, den) for v in row)) for row in mat]
        disc = _raw_reduced_discriminant(quats)
        if disc == target:
            return MaximalOrder(alg, [[Fraction(v, den) for v in row] for row in mat])
        excess = disc // target
        grown = False
        for p in factorize(excess):
            cand = _find_integral_extension(alg, mat, den, p)
            if cand is not None:
                mat, den = _ijk_canonical(
                    [[Fraction(v, den) for v in row] for row in mat] + [list(cand)]
                )
                grown = True
                break
        if not grown:
            raise TheoremViolation(
                f"discriminant {disc} exceeds {target} but no integral extension found"
            )


def default_maximal_order(alg: QuatAlg) -> MaximalOrder:
    """Maximal order grown from the obvious integral basis (1, I, J, IJ)."""
    rows = [
        [Fraction(1), Fraction(0), Fraction(0), Fraction(0)],
        [Fraction(0), Fraction(1), Fraction(0), Fraction(0)],
        [Fraction(0), Fraction(0), Fraction(1), Fraction(0)],
        [Fraction(0), Fraction(0), Fraction(0), Fraction(1)],
    ]
    return saturate_to_maximal(alg, rows)


def eichler_order(mo: MaximalOrder, n: int, height_cap: int = 512) -> tuple[Lattice4, Quat]:
    """Order of level n cut out as the intersection with a conjugate.

    Searches elements g of reduced norm n in the maximal order by increasing
    coordinate height and returns the first whose conjugate intersection has
    level exactly n, together with g itself.
    """
    if gcd(n, mo.discriminant) != 1:
        raise UsageError("level must be coprime to the algebra discriminant")
    seen: set = set()
    h = max(2, isqrt(n) // 2)
    while h <= height_cap:
        for g in norm_elements(mo.lattice, n, h):
            key = tuple(mo.frame_coords(g))
            if key in seen:
                continue
            seen.add(key)
            cand = intersect(mo.lattice, mo.lattice.conjugate_by(g.inverse()))
            if cand.level() == n:
                return cand, g
        h *= 2
    raise SearchExhausted(f"no norm-{n} conjugator below height {height_cap}")


# ---------------------------------------------------------------------------
# enumeration of lattice elements by reduced norm
# ---------------------------------------------------------------------------


def traceless_slices(lat: Lattice4, height: int):
    """Iterate the trace-zero projections of lat up to a coordinate height.

    Yields (w, j, qs) where w is the den-scaled integer coordinate triple of
    a projection point v = w / den with |v_k| <= height, j in [0, den) is the
    unique residue such that the scalar parts completing v inside lat are
    exactly (j + den * Z) / den, and qs = den^2 * nrd(v).  Requires a lattice
    containing 1 so that the completing set is a full coset of Z.
    """
    if not lat.contains_one():
        raise UsageError("slice enumeration needs a lattice containing 1")
    den = lat.den
    mat = lat.mat
    bound = height * den
    # projection lattice: trace-zero coords of all four rows
    proj = intmat.hnf([list(row[1:]) for row in mat])
    if len(proj) != 3:
        raise DegenerateLatticeError("projection rank < 3")
    p00, p01, p02 = proj[0]
    p11, p12 = proj[1][1], proj[1][2]
    p22 = proj[2][2]
    c1_max = bound // p00
    for c1 in range(-c1_max, c1_max + 1):
        w0 = c1 * p00
        base1 = c1 * p01
        # second coordinate: base1 + c2 * p11 in [-bound, bound]
        lo = -(bound + base1)
        c2_lo = -((-lo) // p11) if lo < 0 else (lo + p11 - 1) // p11
        c2_hi = (bound - base1) // p11
        for c2 in range(c2_lo, c2_hi + 1):
            w1 = base1 + c2 * p11
            base2 = c1 * p02 + c2 * p12
            lo2 = -(bound + base2)
            c3_lo = -((-lo2) // p22) if lo2 < 0 else (lo2 + p22 - 1) // p22
            c3_hi = (bound - base2) // p22
            for c3 in range(c3_lo, c3_hi + 1):
                w2 = base2 + c3 * p22
                w = (w0, w1, w2)
                j = _scalar_residue(mat, den, w)
                qs = lat.order.norm_form_scaled(w)
                yield w, j, qs


def _scalar_residue(mat, den, w) -> int:
    """Residue j with (j/den + Z, w/den) inside the lattice; asserts existence."""
    for j in range(den):
        if _solves_int(mat, (j, w[0], w[1], w[2])):
            return j
    raise TheoremViolation("projection point lost its scalar completion")


def _solves_int(mat, target) -> bool:
    c = [0, 0, 0, 0]
    for col in range(4):
        s = target[col] - sum(c[i] * mat[i][col] for i in range(col))
        piv = mat[col][col]
        if s % piv:
            return False
        c[col] = s // piv
    return True


def norm_elements(lat: Lattice4, m: int, height: int) -> list[Quat]:
    """All elements of lat with reduced norm m and frame coords <= height.

    Deterministic: output sorted by coordinate tuple.  The scan walks the
    trace-zero projection and completes each slice by an exact integer
    square root, so only genuine lattice points are ever touched.
    """
    den = lat.den
    out = []
    dd = den * den
    for w, j, qs in traceless_slices(lat, height):
        rhs = dd * m - qs
        if rhs < 0:
            continue
        h = isqrt(rhs)
        if h * h != rhs or h > height * den:
            continue
        if h % den != j % den and (-h) % den != j % den:
            continue
        scalars = {h, -h} if (h % den == j % den and (-h) % den == j % den) else (
            {h} if h % den == j % den else {-h}
        )
        for hh in sorted(scalars):
            coords = (Fraction(hh, den), Fraction(w[0], den), Fraction(w[1], den), Fraction(w[2], den))
            out.append(lat.order.quat_from_frame(coords))
    out.sort(key=lambda q: lat.order.frame_coords(q))
    return out


# ---------------------------------------------------------------------------
# raw helpers on (1, I, J, IJ) coordinate rows, used before a frame exists
# ---------------------------------------------------------------------------


def _ijk_canonical(rows):
    mat, den = _canonical_rows([[Fraction(v) for v in row] for row in rows])
    return mat, den


def _raw_contains(mat, den, coords) -> bool:
    vec = [Fraction(v) * den for v in coords]
    c = intmat.solve_left_frac([list(r) for r in mat], vec)
    return all(v.denominator == 1 for v in c)


def _raw_is_order(alg: QuatAlg, mat, den) -> bool:
    if not _raw_contains(mat, den, (1, 0, 0, 0)):
        return False
    quats = [alg.quat(*(Fraction(v, den) for v in row)) for row in mat]
    return all(
        _raw_contains(mat, den, (x * y).coords()) for x in quats for y in quats
    )


def _raw_reduced_discriminant(basis: list[Quat]):
    G = [[(x * y.conj()).trd() for y in basis] for x in basis]
    d = intmat.det(G)
    num, dn = abs(d.numerator), d.denominator
    rn, rd = isqrt(num), isqrt(dn)
    if rn * rn != num or rd * rd != dn:
        raise TheoremViolation("trace form determinant is not a perfect square")
    val = Fraction(rn, rd)
    return int(val) if val.denominator == 1 else val


def _find_integral_extension(alg: QuatAlg, mat, den, p: int):
    """First (1/p)-combination that stays integral and keeps an order closed."""
    quats = [alg.quat(*(Fraction(v, den) for v in row)) for row in mat]
    base_rows = [[Fraction(v, den) for v in row] for row in mat]
    for c0 in range(p):
        for c1 in range(p):
            for c2 in range(p):
                for c3 in range(p):
                    if not (c0 or c1 or c2 or c3):
                        continue
                    x = (c0 * quats[0] + c1 * quats[1] + c2 * quats[2] + c3 * quats[3]) * Fraction(1, p)
                    if x.trd().denominator != 1 or x.nrd().denominator != 1:
                        continue
                    if _raw_contains(mat, den, x.coords()):
                        continue
                    nmat, nden = _ijk_canonical(base_rows + [list(x.coords())])
                    if _raw_is_order(alg, nmat, nden):
                        return x.coords()
    return None
