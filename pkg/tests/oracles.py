"""Frozen reference values and independent cross-check helpers.

Everything in this module was produced by tooling that shares no code with
``malle_lab``: sympy's ``round_two`` maximal-order routine over a brute-force
coefficient box (cubic field census), a numpy square-free sieve (quadratic
counts), direct binary-quadratic-form composition (class numbers), and the
conductor product formula (cyclic cubic counts).  Tests compare package
output against these constants, so each assertion keeps two independent
routes.  Do not regenerate these values with package code.

The one executable helper, :func:`min_ind_affine`, computes the minimal index
``min_g (m - #orbits(g))`` of a degree-``m`` affine Frobenius action directly
from the permutation action using numpy pointer jumping.  It exists so the
full sweep over semidirect products ``C_m : C_t`` with ``m`` odd prime below
200 fits the acceptance time budget; tests validate it against the package's
pure orbit enumeration for every ``m <= 31`` before trusting it beyond.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy

# ---------------------------------------------------------------------------
# Quadratic fields
# ---------------------------------------------------------------------------

# All fundamental discriminants with |D| <= 10 (and therefore all quadratic
# fields with |disc| <= 10).
QUADRATIC_DISCS_X10 = {-3, -4, -7, -8, 5, 8}

# numpy sieve counts of fundamental discriminants with |D| <= X.
QUADRATIC_COUNT_1E5 = 60786
QUADRATIC_COUNT_1E6 = 607925


def quadratic_count_sieve(limit: int) -> int:
    """Count fundamental discriminants with |D| <= limit (numpy sieve)."""
    sq = np.ones(limit + 1, dtype=bool)
    sq[0] = False
    for p in range(2, int(limit**0.5) + 1):
        sq[p * p :: p * p] = False
    m = np.arange(limit + 1)
    pos1 = int(np.sum(sq & (m % 4 == 1))) - (1 if limit >= 1 else 0)
    neg1 = int(np.sum(sq & (m % 4 == 3)))
    quarter = limit // 4
    m4 = np.arange(quarter + 1)
    sq4 = sq[: quarter + 1]
    pos4 = int(np.sum(sq4 & ((m4 % 4 == 2) | (m4 % 4 == 3))))
    neg4 = int(np.sum(sq4 & ((m4 % 4 == 1) | (m4 % 4 == 2))))
    return pos1 + neg1 + pos4 + neg4


# ---------------------------------------------------------------------------
# Cubic fields (sympy round_two over an oversized coefficient box, fields
# deduplicated by factorization fingerprints at ~50 good primes)
# ---------------------------------------------------------------------------

# Field count per *negative* discriminant for |disc| <= 1000.  Exactly one
# discriminant (-972) carries two non-isomorphic fields in this range.
CUBIC_NEG_COUNTS_1000 = {
    -23: 1, -31: 1, -44: 1, -59: 1, -76: 1, -83: 1,
    -87: 1, -104: 1, -107: 1, -108: 1, -116: 1, -135: 1,
    -139: 1, -140: 1, -152: 1, -172: 1, -175: 1, -199: 1,
    -200: 1, -204: 1, -211: 1, -212: 1, -216: 1, -231: 1,
    -239: 1, -243: 1, -244: 1, -247: 1, -255: 1, -268: 1,
    -283: 1, -300: 1, -307: 1, -324: 1, -327: 1, -331: 1,
    -335: 1, -339: 1, -351: 1, -356: 1, -364: 1, -367: 1,
    -379: 1, -411: 1, -419: 1, -424: 1, -431: 1, -436: 1,
    -439: 1, -440: 1, -451: 1, -459: 1, -460: 1, -472: 1,
    -484: 1, -491: 1, -492: 1, -499: 1, -503: 1, -515: 1,
    -516: 1, -519: 1, -524: 1, -527: 1, -543: 1, -547: 1,
    -563: 1, -567: 1, -588: 1, -620: 1, -628: 1, -643: 1,
    -648: 1, -652: 1, -655: 1, -671: 1, -675: 1, -676: 1,
    -679: 1, -680: 1, -687: 1, -695: 1, -696: 1, -707: 1,
    -716: 1, -728: 1, -731: 1, -743: 1, -744: 1, -748: 1,
    -751: 1, -755: 1, -756: 1, -759: 1, -771: 1, -780: 1,
    -804: 1, -808: 1, -812: 1, -815: 1, -823: 1, -835: 1,
    -839: 1, -843: 1, -856: 1, -863: 1, -867: 1, -876: 1,
    -883: 1, -888: 1, -891: 1, -907: 1, -908: 1, -931: 1,
    -932: 1, -940: 1, -948: 1, -959: 1, -964: 1, -971: 1,
    -972: 2, -980: 1, -983: 1, -984: 1, -996: 1, -999: 1,
}

# Cyclic cubic discriminants are conductor squares; conductors <= 31 are
# {7, 9, 13, 19, 31}, one field each.
C3_DISCS_1000 = {49: 1, 81: 1, 169: 1, 361: 1, 961: 1}
CUBIC_TOTAL_500 = 70
CUBIC_TOTAL_1000 = 154

# Small oracle-pinned counts.
S3_COUNT_X23 = 1          # exactly x^3 - x - 1, disc -23
C3_COUNT_X48 = 0          # smallest cyclic cubic disc is 49
C3_COUNT_X81 = 2          # discs 49 and 81

# Conductor-formula counts of cyclic cubic fields with disc = f^2 <= X.
C3_COUNT_1E4 = 16
C3_COUNT_1E5 = 50
C3_COUNT_1E6 = 159

# ---------------------------------------------------------------------------
# Quartic fields
# ---------------------------------------------------------------------------

# The only quartic field with |disc| <= 200 is the cyclotomic field of
# conductor 5: disc 125, defining polynomial x^4 - x^3 + x^2 - x + 1 (C4).
QUARTIC_X200 = {125: ("C4", (1, -1, 1, -1, 1))}

# ---------------------------------------------------------------------------
# S3 towers (quadratic resolvent k, cubic K, Galois closure N)
# ---------------------------------------------------------------------------

# (cubic disc, quadratic disc, sextic closure disc, relative norm factor)
TOWER_FIXTURES = {
    -23: (-23, -23, -12167, 1),     # x^3 - x - 1: |d_N| = 23^3
    -108: (-108, -3, -34992, 1296),  # x^3 - 2
}
S3_TOWER_50TH_ABS_DISC = 411
S3_TOWER_FIRST50_POSITIVE = {148, 229, 257, 316, 321, 404}

# ---------------------------------------------------------------------------
# Imaginary quadratic class groups (forms composition + Dirichlet formula)
# ---------------------------------------------------------------------------

KNOWN_CLASS_NUMBERS = {
    -3: 1, -4: 1, -7: 1, -8: 1, -11: 1, -15: 2, -19: 1, -20: 2, -23: 3,
    -24: 2, -31: 3, -35: 2, -39: 4, -40: 2, -43: 1, -47: 5, -51: 2,
    -52: 2, -55: 4, -56: 4, -59: 3, -67: 1, -71: 7, -163: 1,
}

# max over fundamental D with |D| <= X of log|Cl_D[m]| / log|D| (first
# maximizer D), for the scan fixtures.
TORSION_RATIO_FIXTURES = {
    (3, 23): (0.350379, -23),
    (2, 20): (0.255958, -15),
    (5, 47): (0.418020, -47),
}

# ---------------------------------------------------------------------------
# Bound-engine rationals (hand-derived from the closed formulas, recorded
# before the engine was written)
# ---------------------------------------------------------------------------

REFINED_BOUND_FIXTURES = {
    (5, 2, 5, 2): Fraction(7, 10),
    (7, 3, 7, 3): Fraction(27, 56),
    (8, 7, 2, 7): Fraction(21, 32),
    (103, 17, 103, 17): Fraction(1853, 19776),
}
REFINED_103_DECIMAL = 0.09369

# ---------------------------------------------------------------------------
# Affine Frobenius sweep helper
# ---------------------------------------------------------------------------


def min_ind_affine(m: int, t: int) -> int:
    """Minimal ``m - #orbits(g)`` over non-identity affine maps x -> v^j x + i.

    Here v is a fixed element of multiplicative order t modulo the odd prime
    m, so the maps form the natural degree-m action of the semidirect product
    of C_m by C_t.  Orbits are counted with numpy pointer jumping (minimum
    label propagation along the functional graph), independent of the
    package's permutation machinery.
    """
    g = sympy.primitive_root(m)
    v = pow(g, (m - 1) // t, m)
    xs = np.arange(m, dtype=np.int64)
    jump_rounds = int(np.ceil(np.log2(m))) + 1
    best = m - 1  # translations x -> x + i (i != 0) have a single orbit
    vj = v % m
    for _ in range(1, t):
        perm_base = (vj * xs) % m
        for i in range(m):
            perm = (perm_base + i) % m
            labels = np.minimum(xs, perm)
            hop = perm
            for _ in range(jump_rounds):
                labels = np.minimum(labels, labels[hop])
                hop = hop[hop]
            orbit_count = int(np.sum(labels == xs))
            best = min(best, m - orbit_count)
        vj = (vj * v) % m
    return best


def frobenius_sweep_pairs(max_m: int):
    """All (m, t) with m an odd prime <= max_m and t | m-1, t >= 2."""
    for m in sympy.primerange(3, max_m + 1):
        for t in sympy.divisors(m - 1):
            if t >= 2:
                yield m, t
