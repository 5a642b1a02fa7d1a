"""Counting lattice elements of given norms inside a hyperbolic ball.

The central object is the injection witness: integer matrices and residues
that send a lattice element with coordinates (a0; a1, a2, a3) to the tuple
(a0, A, B, a3) through an invertible column operation, with A, B, a3 pinned
down modulo the shape divisors M1, M2, M3.  Multiplying the resulting choice
counts gives a fully explicit upper bound on how many lattice elements of
norm up to L can move a base point by at most delta.

Counts themselves come from an exact sweep: the trace-zero projection of the
lattice is walked point by point, each slice is completed by an integer
square root, and the hyperbolic condition is tested with the same primitive
as the one-norm-at-a-time reference enumerator.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, sqrt

from . import coprime, intmat
from .arith import divisor_count, is_square, sqrt_ceil_of_product
from .errors import ContainmentError, SearchExhausted, TheoremViolation, UsageError
from .lattice import Lattice4, Shape, norm_elements, traceless_slices
from .quat import BoxConstant, Quat, UpperHalfPoint, ZBox, apply_quat, u_dist

U_SLACK = 1e-9


def in_ball(alpha: Quat, z: UpperHalfPoint, delta: float) -> bool:
    """Shared ball membership test: u(z, alpha z) <= delta plus fixed slack."""
    return u_dist(z, apply_quat(alpha, z)) <= delta + U_SLACK


@dataclass(frozen=True)
class CountQuery:
    lat: Lattice4
    z: UpperHalfPoint
    delta: float
    l_max: int
    squares_only: bool = False

    def __post_init__(self):
        if self.delta <= 0 or self.l_max < 1:
            raise UsageError("delta and l_max must be positive")
        if not self.lat.contains_one():
            raise UsageError("counting needs a lattice containing 1")


@dataclass(frozen=True)
class ProjectedTuple:
    a0: int
    a_a: int
    a_b: int
    a3: int


@dataclass(frozen=True)
class InjectionWitness:
    """Matrices and residues realizing the injective tuple map.

    Built on the split lattice (scalars plus trace-zero part), whose level is
    the modulus used for every inverse below.
    """

    lat: Lattice4
    delta_mat: tuple[tuple[int, ...], ...]
    r2: int
    r3: int
    s2: int
    s3: int
    big_r: int
    big_r_inv: int
    big_s: int
    s_prime: int
    h_mat: tuple[tuple[int, ...], ...]
    g_mat: tuple[tuple[int, ...], ...]
    shape: Shape

    @property
    def modulus(self) -> int:
        return self.shape.level

    @property
    def big_r2(self) -> int:
        d = self.delta_mat
        return d[1][0] + self.r2 * d[1][1] + self.r3 * d[1][2]

    @property
    def s_inv(self) -> int:
        return pow(self.big_s, -1, self.modulus)


def build_injection(lat: Lattice4, bound: int | None = None) -> InjectionWitness:
    """Construct the witness for (the split companion of) a lattice.

    The trace-zero part is put in Smith form to get a basis of the ambient
    trace-zero lattice adapted to it; the coprime solver then picks the
    residues making the required minors invertible modulo the level.
    """
    sh = lat.shape()
    m1, m2, m3 = sh.tuple3()
    split = lat.z_plus_trace_zero()
    n_mod = split.level()
    if n_mod != 2 * m1 * m2 * m3:
        raise TheoremViolation("split lattice level must be twice the shape product")
    wshape = Shape(m1, m2, m3, 2)

    b0 = [list(r) for r in lat.trace_zero_mat()]
    d, _, v = intmat.snf_with_transforms(b0)
    if (d[0][0], d[1][1], d[2][2]) != (m1, m2, m3):
        raise TheoremViolation("Smith form disagrees with shape")
    v_inv = intmat.inverse_frac(v)
    delta_mat = tuple(
        tuple(int(x) for x in row) for row in v_inv
    )
    if abs(intmat.det([list(r) for r in delta_mat])) != 1:
        raise TheoremViolation("adapted basis must be unimodular")

    dm = delta_mat
    r2, r3 = coprime.solve(
        coprime.CombinationProblem((dm[0][0], dm[0][1], dm[0][2]), n_mod, 2, bound)
    )[0]
    big_r = dm[0][0] + r2 * dm[0][1] + r3 * dm[0][2]
    big_r_inv = pow(big_r, -1, n_mod)
    big_r2 = dm[1][0] + r2 * dm[1][1] + r3 * dm[1][2]

    h_mat = (
        (1, 0, 0),
        ((-big_r2 * big_r_inv) % n_mod, 1, 0),
        (0, 0, 1),
    )
    hd = intmat.matmul([list(r) for r in h_mat], [list(r) for r in dm])
    s1, s2_, s3_ = hd[1]
    g = n_mod
    for v_ in (s1, s2_, s3_):
        g = __import__("math").gcd(g, v_)
    if g != 1:
        raise TheoremViolation("middle row must be unimodular mod the level")

    picks = coprime.solve(coprime.CombinationProblem((s1, s2_, s3_), n_mod, 2, bound))
    chosen = None
    for tup in picks:
        if tup[0] != r2:
            chosen = tup
            break
    if chosen is None:
        raise TheoremViolation("projection property should give a distinct s2")
    s2, s3 = chosen
    big_s = s1 + s2 * s2_ + s3 * s3_
    s_prime = dm[0][0] + s2 * dm[0][1] + s3 * dm[0][2]
    g_mat = ((1, 1, 0), (r2, s2, 0), (r3, s3, 1))
    if s2 - r2 == 0:
        raise TheoremViolation("g must be invertible")

    w = InjectionWitness(
        lat=split,
        delta_mat=delta_mat,
        r2=r2,
        r3=r3,
        s2=s2,
        s3=s3,
        big_r=big_r,
        big_r_inv=big_r_inv,
        big_s=big_s,
        s_prime=s_prime,
        h_mat=h_mat,
        g_mat=g_mat,
        shape=wshape,
    )
    _check_product_pattern(w)
    return w


def _check_product_pattern(w: InjectionWitness) -> None:
    """The triple product must reduce to the upper-triangular pattern."""
    n = w.modulus
    hdg = intmat.matmul(
        intmat.matmul([list(r) for r in w.h_mat], [list(r) for r in w.delta_mat]),
        [list(r) for r in w.g_mat],
    )
    dm = w.delta_mat
    want = (
        (w.big_r, w.s_prime, dm[0][2]),
        (0, w.big_s, dm[1][2] - w.big_r2 * w.big_r_inv * dm[0][2]),
    )
    for i in range(2):
        for j in range(3):
            if (hdg[i][j] - want[i][j]) % n:
                raise TheoremViolation(f"product pattern fails at ({i},{j})")


def _int_coords(w: InjectionWitness, alpha: Quat) -> tuple[int, int, int, int]:
    coords = w.lat.order.frame_coords(alpha)
    if any(v.denominator != 1 for v in coords):
        raise ContainmentError("element is not in the split lattice (integer coords)")
    if not w.lat.contains_coords(coords):
        raise ContainmentError("element is not in the witness lattice")
    return tuple(int(v) for v in coords)


def project_alpha(w: InjectionWitness, alpha: Quat) -> ProjectedTuple:
    """Injective tuple (a0, A, B, a3): right-multiply the coords by g."""
    a0, a1, a2, a3 = _int_coords(w, alpha)
    g = w.g_mat
    aa = a1 * g[0][0] + a2 * g[1][0] + a3 * g[2][0]
    ab = a1 * g[0][1] + a2 * g[1][1] + a3 * g[2][1]
    a3p = a1 * g[0][2] + a2 * g[1][2] + a3 * g[2][2]
    return ProjectedTuple(a0, aa, ab, a3p)


def verify_congruences(w: InjectionWitness, alpha: Quat) -> bool:
    """The three residue constraints every lattice element must satisfy."""
    t = project_alpha(w, alpha)
    m1, m2, m3 = w.shape.tuple3()
    dm = w.delta_mat
    if t.a_a % m1:
        return False
    if (t.a_b - t.a_a * w.big_r_inv * w.s_prime) % m2:
        return False
    rhs = t.a_a * w.big_r_inv * dm[0][2] + w.s_inv * (
        t.a_b - t.a_a * w.big_r_inv * w.s_prime
    ) * (dm[1][2] - w.big_r2 * w.big_r_inv * dm[0][2])
    return (t.a3 - rhs) % m3 == 0


def _count_in_range(c: int, modulus: int, zero_class: bool) -> int:
    """How many integers in [-c, c] a congruence class can hit, at worst."""
    if zero_class:
        return 2 * (c // modulus) + 1
    return (2 * c) // modulus + 1


def _max_divisor_count(c_max: int) -> int:
    """Largest d(n) for 1 <= n <= c_max; sieved when small, else 2*sqrt."""
    if c_max < 1:
        return 1
    if c_max <= 3_000_000:
        counts = [0] * (c_max + 1)
        for d in range(1, c_max + 1):
            for k in range(d, c_max + 1, d):
                counts[k] += 1
        return max(counts[1:])
    return 2 * isqrt(c_max) + 1


def explicit_bound(
    w: InjectionWitness, t: BoxConstant, l_max: int, squares_only: bool = False
) -> int:
    """Product of exact choice counts for the tuple (a0, A, B, a3).

    Each factor counts the integers a congruence class can hit inside the
    coordinate box; the raw box count caps the product, since the tuple map
    can never exceed plain coordinate enumeration.
    """
    if l_max < 1:
        raise UsageError("l_max must be positive")
    m1, m2, m3 = w.shape.tuple3()
    k_a = 1 + w.r2 + w.r3
    k_b = 1 + w.s2 + w.s3
    if not squares_only:
        tl = sqrt_ceil_of_product(t.t, l_max)
        c_a0 = 2 * tl + 1
        c_aa = _count_in_range(sqrt_ceil_of_product(k_a * t.t, l_max), m1, True)
        c_ab = _count_in_range(sqrt_ceil_of_product(k_b * t.t, l_max), m2, False)
        c_a3 = _count_in_range(tl, m3, False)
        return min(c_a0 * c_aa * c_ab * c_a3, (2 * tl + 1) ** 4)
    # norms are squares l^2 with l <= l_max, so coordinates reach t * l_max
    tl = sqrt_ceil_of_product(t.t, l_max * l_max)
    c_aa = _count_in_range(sqrt_ceil_of_product(k_a * t.t, l_max * l_max), m1, True)
    c_ab = _count_in_range(sqrt_ceil_of_product(k_b * t.t, l_max * l_max), m2, False)
    c_a3 = _count_in_range(tl, m3, False)
    gram = w.lat.order.gram0
    s_abs = sum(abs(v) for row in gram for v in row)
    c_max = (s_abs * tl * tl) // 2 + 1
    tau = _max_divisor_count(c_max)
    scalars = 2 * l_max
    return scalars + min(c_aa * c_ab * c_a3, (2 * tl + 1) ** 3) * tau


def enumerate_norm_ball(
    lat: Lattice4, m: int, z: UpperHalfPoint, delta: float, t: BoxConstant
) -> list[Quat]:
    """Exactly the lattice elements of norm m moving z by at most delta.

    The search space is the coordinate box |a_i| <= ceil(t sqrt(m)) walked
    through the lattice's Hermite form; the box constant guarantees no
    qualifying element lies outside it.
    """
    if m < 1:
        raise UsageError("norm must be positive")
    height = sqrt_ceil_of_product(t.t, m)
    return [a for a in norm_elements(lat, m, height) if in_ball(a, z, delta)]


@dataclass(frozen=True)
class CountReport:
    query: CountQuery
    per_m: tuple[tuple[int, int], ...]
    total: int
    explicit_bound: int
    ratio: float
    witness: InjectionWitness
    wall_ms: float


def sweep_counts(q: CountQuery, w: InjectionWitness, t: BoxConstant) -> CountReport:
    """Count all elements of norm up to l_max (or square norms) in the ball.

    One pass over the trace-zero projection serves every norm at once: a
    slice fixes the trace-zero part, the hyperbolic condition becomes a
    two-sided window on the scalar part, and each surviving candidate is
    confirmed with the shared exact test.  The bound is checked against the
    split companion lattice, rescaling norms by 4 when the query lattice is
    strictly larger (doubling embeds it into the companion).
    """
    t0 = time.perf_counter()
    if w.shape.tuple3() != q.lat.shape().tuple3():
        raise UsageError("witness shape does not match the query lattice")
    split_query = q.lat.shape().e == 2
    if split_query and q.lat != w.lat:
        raise UsageError("witness must be built on the query lattice")
    max_norm = q.l_max * q.l_max if q.squares_only else q.l_max
    height = sqrt_ceil_of_product(t.t, max_norm)
    counts: dict[int, int] = {}
    den = q.lat.den
    dd = den * den
    x, y = q.z.x, q.z.y
    order = q.lat.order
    pre_delta = q.delta + 1e-6
    c_hi = 4.0 * pre_delta + 2.0
    box_cache: dict[int, int] = {}
    for wv, j, qs in traceless_slices(q.lat, height):
        v = order.quat_from_frame(
            (Fraction(0), Fraction(wv[0], den), Fraction(wv[1], den), Fraction(wv[2], den))
        )
        (ma, mb), (mc, md) = _iota_conj(v, x, y)
        f_norm = ma * ma + mb * mb + mc * mc + md * md
        h2_cap = dd * max_norm - qs
        if h2_cap < 0:
            continue
        # ball pre-filter: with alpha = x0 + v and m = nrd(alpha), the move
        # condition u <= delta reads 2 x0^2 + F <= (4 delta + 2) m, which is
        # a floor on h^2 (scalars move nothing, so large h only helps)
        floor_f = (dd * f_norm - c_hi * qs) / (4.0 * pre_delta)
        h_lo = 0 if floor_f <= 0 else max(0, isqrt(int(floor_f)) - 2)
        h_hi = isqrt(h2_cap)
        first = h_lo + ((j - h_lo) % den)
        for habs in range(first, h_hi + 1, den):
            for h in ((habs, -habs) if habs else (0,)):
                if h % den != j % den:
                    continue
                num = h * h + qs
                if num <= 0 or num % dd:
                    continue
                m = num // dd
                if m < 1 or m > max_norm:
                    continue
                if q.squares_only and not is_square(m):
                    continue
                hm = box_cache.get(m)
                if hm is None:
                    hm = sqrt_ceil_of_product(t.t, m) * den
                    box_cache[m] = hm
                if abs(h) > hm or any(abs(c) > hm for c in wv):
                    continue
                alpha = order.quat_from_frame(
                    (Fraction(h, den), Fraction(wv[0], den), Fraction(wv[1], den), Fraction(wv[2], den))
                )
                if in_ball(alpha, q.z, q.delta):
                    counts[m] = counts.get(m, 0) + 1
    total = sum(counts.values())
    if split_query:
        bound = explicit_bound(w, t, q.l_max, q.squares_only)
    else:
        dilated = 2 * q.l_max if q.squares_only else 4 * q.l_max
        bound = explicit_bound(w, t, dilated, q.squares_only)
    if total > bound:
        raise TheoremViolation(f"count {total} exceeds explicit bound {bound}")
    wall = (time.perf_counter() - t0) * 1000.0
    return CountReport(
        query=q,
        per_m=tuple(sorted(counts.items())),
        total=total,
        explicit_bound=bound,
        ratio=total / bound,
        witness=w,
        wall_ms=wall,
    )


def square_norm_factor_check(alpha: Quat, ell: int):
    """Exact factorization identity for square norms.

    For nrd(alpha) = ell^2 the scalar part a0 satisfies
    (a0 - ell)(a0 + ell) = -nrd(alpha0) with alpha0 the trace-zero part.
    When alpha0 = 0 (forced whenever its norm vanishes, by anisotropy)
    alpha is the integer scalar a0 = +-ell.  Returns (lhs, rhs, is_scalar).
    """
    if ell < 0:
        raise UsageError("ell must be non-negative")
    if alpha.nrd() != ell * ell:
        raise UsageError("alpha must have norm ell^2")
    a0, a1, a2, a3 = alpha.coords()
    alpha0 = alpha.alg.quat(0, a1, a2, a3)
    lhs = (a0 - ell) * (a0 + ell)
    rhs = -alpha0.nrd()
    if lhs != rhs:
        raise TheoremViolation("square norm factorization identity failed")
    is_scalar = alpha0.is_zero()
    if rhs == 0:
        if not is_scalar:
            raise TheoremViolation("norm-zero trace-zero part must vanish")
        if a0 != ell and a0 != -ell:
            raise TheoremViolation("scalar of square norm must be +-ell")
    return lhs, rhs, is_scalar


@dataclass(frozen=True)
class SmallNormReport:
    level: int
    modulus: int
    t_prime: float
    m_star: int
    m_star_certified: int
    per_m: tuple[tuple[int, int], ...]
    pair_count: int
    warnings: tuple[str, ...]


def order_small_norm_check(
    order_lat: Lattice4,
    z: UpperHalfPoint,
    delta: float,
    t: BoxConstant,
    m_cap: int,
    count_factor: int = 8,
) -> SmallNormReport:
    """Certify the small-norm structure of an order around a point.

    Elements of norm m that barely move z generate, for m below a threshold
    m_star, a commutative subring: the trace-zero parts of any alpha, beta
    and their product span a sublattice whose 3x3 determinant is divisible
    by the shape product, while a Hadamard bound keeps it below that modulus,
    forcing determinant zero and hence (by anisotropy of the norm form on
    trace-zero elements of a division algebra) commutation.

    Every pair is checked exactly: the divisibility always, and commutation
    whenever the determinant is small enough for the argument to bite, no
    matter whether m is below the a priori threshold.  Counts above
    count_factor * d(m) are reported as warnings, not failures.
    """
    if not order_lat.is_order():
        raise UsageError("small norm check needs an order")
    if abs(t.delta - delta) > 1e-12:
        raise UsageError("box constant was calibrated for a different delta")
    if m_cap < 1:
        raise UsageError("m_cap must be positive")
    sh = order_lat.shape()
    modulus = sh.m1 * sh.m2 * sh.m3
    level = sh.level
    t_prime = 2.0 * t.t * sqrt(1.0 + delta)
    # |det| <= 24 sqrt(3) t^2 t' m^2 for pairs of norm <= m and their product
    had = 24.0 * sqrt(3.0) * t.t * t.t * t_prime
    m_star = isqrt(max(0, int(modulus / had)))
    while m_star > 0 and had * m_star * m_star >= modulus * (1.0 - 1e-9):
        m_star -= 1
    m_eff = min(max(m_cap, m_star), 10_000)

    pool: list[tuple[int, Quat]] = []
    per_m = []
    warnings = []
    for m in range(1, m_eff + 1):
        els = enumerate_norm_ball(order_lat, m, z, delta, t)
        per_m.append((m, len(els)))
        if len(els) > count_factor * divisor_count(m):
            warnings.append(
                f"norm {m}: {len(els)} elements exceeds {count_factor}*d({m})"
            )
        pool.extend((m, a) for a in els)

    worst_uncertified = m_eff + 1
    pair_count = 0
    for i in range(len(pool)):
        m_i, a = pool[i]
        for j in range(i + 1, len(pool)):
            m_j, b = pool[j]
            pair_count += 1
            d_val = _pair_det(a, b)
            if d_val % modulus:
                raise TheoremViolation("shape product must divide the pair determinant")
            commute = a * b == b * a
            if d_val == 0 and not commute:
                raise TheoremViolation("zero determinant must force commutation")
            if d_val != 0:
                worst_uncertified = min(worst_uncertified, max(m_i, m_j))
    m_cert = min(worst_uncertified - 1, m_eff)
    if m_cert < m_star:
        raise TheoremViolation("a priori threshold exceeded certified range")
    return SmallNormReport(
        level=level,
        modulus=modulus,
        t_prime=t_prime,
        m_star=m_star,
        m_star_certified=m_cert,
        per_m=tuple(per_m),
        pair_count=pair_count,
        warnings=tuple(warnings),
    )


def _pair_det(a: Quat, b: Quat) -> int:
    """det of the doubled trace-zero parts of (a, b, ab), exactly."""
    rows = []
    for q in (a, b, a * b):
        coords = q.coords()
        doubled = [2 * coords[k] for k in (1, 2, 3)]
        if any(v.denominator != 1 for v in doubled):
            raise TheoremViolation("doubled trace-zero parts must be integral")
        rows.append([int(v) for v in doubled])
    return intmat.det(rows)


def reduce_into_box(z: UpperHalfPoint, box: ZBox, mo, height_cap: int = 64):
    """Move z into the box by a norm-1 unit of the maximal order.

    Searches units by doubling coordinate height and returns (z', gamma)
    for the first unit (in deterministic coordinate order) that lands z in
    the box.  Raises SearchExhausted at the height cap; the unit group is
    cocompact, so a cap adequate for the box always exists but may need to
    grow with the box.
    """
    if box.contains(z):
        return z, mo.alg.one()
    seen = set()
    h = 1
    while h <= height_cap:
        for gamma in norm_elements(mo.lattice, 1, h):
            key = gamma.coords()
            if key in seen:
                continue
            seen.add(key)
            w = apply_quat(gamma, z)
            cand = UpperHalfPoint(w.real, w.imag)
            if box.contains(cand):
                return cand, gamma
        h *= 2
    raise SearchExhausted(f"no unit moved the point into the box at height {height_cap}")


def _iota_conj(v: Quat, x: float, y: float):
    """Embed v and conjugate by the matrix sending i to x + iy.

    With g = [[s, x/s], [0, 1/s]], s = sqrt(y), the conjugate g^-1 M g of
    M = [[a, b], [c, d]] works out entrywise to the expressions below.
    """
    from .quat import iota_inf

    (a, b), (c, d) = iota_inf(v)
    e11 = a - x * c
    e12 = (x * (a - d) + b - x * x * c) / y
    e21 = c * y
    e22 = x * c + d
    return ((e11, e12), (e21, e22))
