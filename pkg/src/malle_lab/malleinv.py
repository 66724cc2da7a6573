"""Orbit-index invariants of transitive permutation groups.

For g acting on d points, index(g) = d minus the number of orbits of g.
The group invariant is the minimum of index(g) over nonidentity g, and the
counting exponent is its reciprocal.  Two closed forms are provided for the
families used throughout: the natural degree-m action of C_m x| C_t and the
regular action of an arbitrary finite group.  Both are cross-validated
against the direct orbit computation in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .groupstruct import smallest_prime_divisor
from .permcore import PermGroup, Permutation


@dataclass(frozen=True)
class MalleExponent:
    value: Fraction          # 1/ind(G)
    ind: int                 # min index over nonidentity elements
    witness: Permutation     # lexicographically first attaining element
    d: int                   # degree


def ind_element(g: Permutation) -> int:
    """degree minus orbit count; 0 exactly for the identity."""
    return g.degree - g.orbit_count()


def ind_group(G: PermGroup):
    """(min index, witness) over nonidentity elements, witness lex-first."""
    best = None
    witness = None
    for g in G.elements:
        if g.is_identity():
            continue
        i = ind_element(g)
        if best is None or i < best:
            best, witness = i, g
    if best is None:
        raise PreconditionError("trivial group has no index invariant")
    return best, witness


def malle_a(G: PermGroup) -> MalleExponent:
    """Exact counting exponent 1/ind(G) with its witness element."""
    if G.order == 1:
        raise PreconditionError("group must be nontrivial")
    if not G.is_transitive():
        raise PreconditionError("group must be transitive")
    ind, witness = ind_group(G)
    return MalleExponent(value=Fraction(1, ind), ind=ind, witness=witness,
                         d=G.degree)


def malle_a_frobenius_closed_form(m: int, t: int, p: int, p1: int) -> Fraction:
    """Exponent of C_m x| C_t in its natural degree-m action.

    Equals 1/(m - max(m/p, 1 + (m-1)/p1)) where p, p1 are the smallest prime
    divisors of m and t.
    """
    if m < 2 or t < 2:
        raise PreconditionError("need m >= 2 and t >= 2")
    if m % p:
        raise PreconditionError(f"p={p} must divide m={m}")
    if t % p1:
        raise PreconditionError(f"p1={p1} must divide t={t}")
    if (m - 1) % t:
        raise PreconditionError(f"t={t} must divide m-1={m - 1}")
    if p != smallest_prime_divisor(m) or p1 != smallest_prime_divisor(t):
        raise PreconditionError("p and p1 must be the smallest prime divisors")
    inner = max(Fraction(m, p), 1 + Fraction(m - 1, p1))
    return 1 / (m - inner)


def malle_a_regular_closed_form(order: int, p: int) -> Fraction:
    """Exponent of any group of the given order in its regular action."""
    if order < 2:
        raise PreconditionError("order must be at least 2")
    if p != smallest_prime_divisor(order):
        raise PreconditionError(
            f"p={p} is not the smallest prime divisor of {order}")
    return Fraction(p, order * (p - 1))
