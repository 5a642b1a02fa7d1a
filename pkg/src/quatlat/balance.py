"""Search for balanced conjugates of orders inside the maximal order.

An order is balanced when its largest invariant factor in the maximal order
divides the rounded square root of its index.  Not every order is balanced,
but a conjugate with the same level often is; this module searches for such
a conjugate among elements of the maximal order whose norm is a product of
the order's bad primes.  The search is bounded, deterministic, and may miss:
a miss is reported as absence, never as impossibility.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import gcd

from .arith import factorize
from .errors import UsageError
from .lattice import Lattice4, norm_elements
from .quat import Quat


@dataclass(frozen=True)
class BalanceSearchSpec:
    ord: Lattice4
    primes: frozenset[int]
    k_max: int
    height_max: int

    def __post_init__(self):
        if not self.ord.is_order():
            raise UsageError("balance search needs an order")
        if self.k_max < 1 or self.height_max < 1:
            raise UsageError("k_max and height_max must be positive")
        level_primes = set(factorize(self.ord.level()))
        if not level_primes <= set(self.primes):
            raise UsageError("primes must cover the prime divisors of the level")


def smith_condition(ord_prime: Lattice4) -> bool:
    """Per-prime ceiling condition on the invariant factor exponents.

    With local exponents (m1, m2, m3) of the last three invariant factors
    at p, requires m3 <= ceil((m1 + m2 + m3) / 2).  Equivalent to the
    divisibility form of balancedness, prime by prime.
    """
    inv = ord_prime.invariant_factors_in(ord_prime.order.lattice)
    a2, a3, a4 = inv.factors[1], inv.factors[2], inv.factors[3]
    index = a2 * a3 * a4
    for p in factorize(index):
        m1 = _valuation(a2, p)
        m2 = _valuation(a3, p)
        m3 = _valuation(a4, p)
        if m3 > -((m1 + m2 + m3) // -2):
            return False
    return True


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _candidate_norms(primes, k_max: int) -> list[int]:
    """Products of the given primes with total exponent in [1, k_max], ascending."""
    norms = {1}
    for _ in range(k_max):
        norms |= {n * p for n in norms for p in primes}
    norms.discard(1)
    return sorted(norms)


def balanced_search(spec: BalanceSearchSpec, threads: int = 1):
    """Find a conjugate of the order that is balanced in the maximal order.

    Returns (conjugator, conjugate) or None when the bounded search misses.
    Already-balanced input returns the identity immediately.  Candidates are
    scanned by increasing norm, then increasing coordinate height, elements
    in sorted coordinate order; the first hit in that order is returned
    regardless of thread count.
    """
    ord_lat = spec.ord
    mo = ord_lat.order
    if ord_lat.is_balanced():
        return mo.alg.one(), ord_lat
    level = ord_lat.level()
    bad = sorted(spec.primes)
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for n in _candidate_norms(bad, spec.k_max):
            height = 2
            tried = set()
            while height <= spec.height_max:
                batch = []
                for gamma in norm_elements(mo.lattice, n, height):
                    key = gamma.coords()
                    if key not in tried:
                        tried.add(key)
                        batch.append(gamma)
                results = (
                    pool.map(lambda g: _try_conjugator(ord_lat, level, g), batch)
                    if pool
                    else map(lambda g: _try_conjugator(ord_lat, level, g), batch)
                )
                for gamma, conj in zip(batch, results):
                    if conj is not None:
                        return gamma, conj
                height *= 2
            if height // 2 < spec.height_max:
                # one final pass exactly at the cap
                batch = [
                    g
                    for g in norm_elements(mo.lattice, n, spec.height_max)
                    if g.coords() not in tried
                ]
                for gamma in batch:
                    conj = _try_conjugator(ord_lat, level, gamma)
                    if conj is not None:
                        return gamma, conj
        return None
    finally:
        if pool:
            pool.shutdown()


def _try_conjugator(ord_lat: Lattice4, level: int, gamma: Quat):
    """Conjugate, require containment in the maximal order, check balance."""
    conj = ord_lat.conjugate_by(gamma)
    mo_lat = ord_lat.order.lattice
    if not conj.is_sublattice_of(mo_lat):
        return None
    if conj.level() != level:
        return None
    if not conj.is_balanced():
        return None
    return conj


def eichler_invariant_profile(n: int) -> tuple[int, int, int, int]:
    """Expected balanced invariant factors (1, 1, a, b) for level n.

    Each prime power p^e in n contributes p^floor(e/2) to a and
    p^ceil(e/2) to b; squarefree n gives (1, 1, 1, n).
    """
    if n < 1:
        raise UsageError("level must be positive")
    a = b = 1
    for p, e in factorize(n).items():
        a *= p ** (e // 2)
        b *= p ** (e - e // 2)
    if gcd(a, b) != a:
        raise UsageError("profile must be a divisibility chain")
    return (1, 1, a, b)
