"""Exact number-field arithmetic at desk scale.

Monic integer polynomials, resultant-based discriminants, maximal orders by
the Dedekind criterion with a Round-2 fallback, Galois-group labels
(certified in degrees 2-4, cycle-type sampling in degrees 5-6), canonical
defining polynomials by minimal T2 norm, splitting fields of non-Galois
cubics, and the exact integer discriminant identities used to verify
Galois-closure towers.

All hot-path arithmetic is exact integer or rational; floating point (via
mpmath at 60 digits) appears only to bound search boxes and order T2 norms,
with exact tie-breaking on polynomial coefficients.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import (CapacityError, InvariantViolationError,
                     PreconditionError)

MAX_IRREDUCIBILITY_DEGREE = 8
MAX_ORDER_DEGREE = 6
OWN_FACTOR_LIMIT = 10 ** 15      # beyond this, factoring defers to sympy
GENERATOR_SEARCH_CAP = 500_000   # lattice points per canonicalization

# Hermite constants gamma_k^k for k = 1..5 (exact rationals), used in the
# T2 bound for a minimal generator: T2 <= (n/2)^2/n + gamma_{n-1}(|d|/n)^{1/(n-1)}
_HERMITE_POW = {1: Fraction(1), 2: Fraction(4, 3), 3: Fraction(2),
                4: Fraction(4), 5: Fraction(8)}


# ---------------------------------------------------------------------------
# Monic integer polynomials
# ---------------------------------------------------------------------------

class IntegerPolynomial:
    """A monic polynomial with integer coefficients, degree >= 1.

    Coefficients are exposed leading-first (constant term last), which is
    also the print format.
    """

    __slots__ = ("asc", "_irreducible")

    def __init__(self, coefficients):
        coeffs = [int(c) for c in coefficients]
        while len(coeffs) > 1 and coeffs[0] == 0:
            coeffs.pop(0)
        if len(coeffs) < 2:
            raise PreconditionError("polynomial must have degree >= 1")
        if coeffs[0] != 1:
            raise PreconditionError(
                f"polynomial must be monic; leading coefficient {coeffs[0]}")
        self.asc = tuple(reversed(coeffs))   # asc[k] = coefficient of x^k
        self._irreducible: bool | None = None  # set only by a completed test

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_ascending(cls, asc):
        return cls(list(reversed(list(asc))))

    @classmethod
    def parse(cls, text: str) -> "IntegerPolynomial":
        """Parse '[1, 0, -1, -1]', '1,0,-1,-1', or 'x^3 - x - 1'."""
        s = text.strip()
        if re.fullmatch(r"\[?\s*-?\d+(\s*,\s*-?\d+)*\s*\]?", s):
            return cls([int(v) for v in re.findall(r"-?\d+", s)])
        compact = s.replace("**", "^").replace(" ", "")
        if not compact:
            raise PreconditionError("empty polynomial")
        terms = re.findall(r"[+-]?[^+-]+", compact)
        coeffs: dict = {}
        for term in terms:
            m = re.fullmatch(r"([+-]?)(\d+)?(?:\*?(x)(?:\^(\d+))?)?", term)
            if not m or (m.group(2) is None and m.group(3) is None):
                raise PreconditionError(f"cannot parse polynomial term {term!r}")
            sign = -1 if m.group(1) == "-" else 1
            coef = int(m.group(2)) if m.group(2) else 1
            if m.group(3) is None:
                power = 0
            else:
                power = int(m.group(4)) if m.group(4) else 1
            coeffs[power] = coeffs.get(power, 0) + sign * coef
        deg = max(coeffs)
        return cls([coeffs.get(k, 0) for k in range(deg, -1, -1)])

    # -- basics ------------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.asc) - 1

    @property
    def coefficients(self) -> tuple:
        """Leading coefficient first, constant term last."""
        return tuple(reversed(self.asc))

    def __call__(self, x):
        out = 0
        for c in reversed(self.asc):
            out = out * x + c
        return out

    def derivative_asc(self) -> tuple:
        return tuple(k * c for k, c in enumerate(self.asc) if k >= 1)

    def __eq__(self, other):
        return (isinstance(other, IntegerPolynomial)
                and self.asc == other.asc)

    def __hash__(self):
        return hash(self.asc)

    def __lt__(self, other):
        return (self.degree, self.coefficients) < (other.degree,
                                                   other.coefficients)

    def __repr__(self):
        return f"IntegerPolynomial({list(self.coefficients)})"

    def __str__(self):
        return "[" + ", ".join(str(c) for c in self.coefficients) + "]"

    def pretty(self, var: str = "x") -> str:
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.asc[k]
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            elif k == 1:
                body = f"{var}" if mag == 1 else f"{mag}*{var}"
            else:
                body = f"{var}^{k}" if mag == 1 else f"{mag}*{var}^{k}"
            parts.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(parts)
        return text.removeprefix("+ ").replace("+ -", "- ") if text else "0"


# ---------------------------------------------------------------------------
# Ascending-coefficient polynomial helpers over Z
# ---------------------------------------------------------------------------

def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _trim(out)


def _poly_sub(a, b):
    out = [0] * max(len(a), len(b))
    for i, ai in enumerate(a):
        out[i] += ai
    for i, bi in enumerate(b):
        out[i] -= bi
    return _trim(out)


def _poly_divmod_monic(a, b):
    """Exact division with remainder by a MONIC divisor, over Z."""
    if b[-1] != 1:
        raise PreconditionError("divisor must be monic")
    a = list(a)
    q = [0] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        c = a[-1]
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] -= c * bi
        a = _trim(a)
        if a == [0]:
            break
    return _trim(q), _trim(a)


# ---------------------------------------------------------------------------
# Resultants and discriminants (Sylvester matrix + fraction-free Bareiss)
# ---------------------------------------------------------------------------

def _bareiss_det(mat) -> int:
    """Exact integer determinant by fraction-free Gaussian elimination."""
    m = [row[:] for row in mat]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def resultant_asc(a, b) -> int:
    """Resultant of two integer polynomials in ascending form."""
    a, b = _trim(a), _trim(b)
    da, db = len(a) - 1, len(b) - 1
    if da < 1 and db < 1:
        raise PreconditionError("resultant needs at least one nonconstant input")
    if da < 1:
        return a[0] ** db if da == 0 else 0
    if db < 1:
        return b[0] ** da if db == 0 else 0
    n = da + db
    rows = []
    desc_a = list(reversed(a))
    desc_b = list(reversed(b))
    for i in range(db):
        rows.append([0] * i + desc_a + [0] * (n - da - 1 - i))
    for i in range(da):
        rows.append([0] * i + desc_b + [0] * (n - db - 1 - i))
    return _bareiss_det(rows)


def poly_disc(f: IntegerPolynomial) -> int:
    """disc(f) = (-1)^{n(n-1)/2} Res(f, f') for monic f."""
    n = f.degree
    res = resultant_asc(list(f.asc), list(f.derivative_asc()))
    return (-1) ** (n * (n - 1) // 2) * res


# ---------------------------------------------------------------------------
# F_p[x] utilities (ascending dense lists of residues)
# ---------------------------------------------------------------------------

def _pmod(a, p):
    return _trim([c % p for c in a])


def _pmul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _pdivmod(a, b, p):
    a = list(a)
    if b == [0]:
        raise ZeroDivisionError
    inv = pow(b[-1], -1, p)
    q = [0] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and a != [0]:
        shift = len(a) - len(b)
        c = a[-1] * inv % p
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a = _trim(a)
    return _trim(q), _trim(a)


def _pgcd(a, b, p):
    a, b = _pmod(a, p), _pmod(b, p)
    while b != [0]:
        a, b = b, _pdivmod(a, b, p)[1]
    if a != [0]:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _pderiv(a, p):
    return _trim([k * c % p for k, c in enumerate(a) if k >= 1])


def _pth_root(a, p):
    """p-th root of a polynomial of the form sum c_i x^{p i} over F_p."""
    out = [0] * ((len(a) - 1) // p + 1)
    for k, c in enumerate(a):
        if c:
            if k % p:
                raise InvariantViolationError("polynomial is not a p-th power")
            out[k // p] = c
    return _trim(out)


def _pradical(a, p):
    """Product of the distinct monic irreducible factors of a over F_p."""
    a = _pmod(a, p)
    inv = pow(a[-1], -1, p)
    a = [c * inv % p for c in a]
    rad = [1]
    while len(a) > 1:
        da = _pderiv(a, p)
        if da == [0]:
            a = _pth_root(a, p)
            continue
        g = _pgcd(a, da, p)
        v = _pdivmod(a, g, p)[0]          # squarefree part of the non-p-power factors
        rad = _pdivmod(_pmul(rad, v, p), _pgcd(rad, v, p), p)[0]
        a = g
    return rad


def _ppowmod(base, e, mod, p):
    result = [1]
    base = _pdivmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _pdivmod(_pmul(result, base, p), mod, p)[1]
        base = _pdivmod(_pmul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def factor_pattern_mod_p(f: IntegerPolynomial, p: int):
    """Multiset of irreducible-factor degrees of f mod p (squarefree case).

    Computed by distinct-degree splitting: gcd(f, x^{p^d} - x) collects all
    factors of degree dividing d.  Requires p not to divide disc(f).
    """
    fp = _pmod(list(f.asc), p)
    if len(fp) - 1 != f.degree:
        raise PreconditionError("leading coefficient vanished mod p")
    if _pgcd(fp, _pderiv(fp, p), p) != [1]:
        raise PreconditionError(f"f is not squarefree mod {p}")
    pattern = []
    rem = fp
    x = [0, 1]
    xq = x
    d = 0
    while len(rem) - 1 > 0:
        d += 1
        if (len(rem) - 1) < 2 * d:
            pattern.extend([len(rem) - 1])
            break
        xq = _ppowmod(xq, p, rem, p)
        g = _pgcd(_psub_mod(xq, x, p), rem, p)
        if len(g) > 1:
            deg = len(g) - 1
            pattern.extend([d] * (deg // d))
            rem = _pdivmod(rem, g, p)[0]
            xq = _pdivmod(xq, rem, p)[1]
    return tuple(sorted(pattern, reverse=True))


def _psub_mod(a, b, p):
    out = [0] * max(len(a), len(b))
    for i, ai in enumerate(a):
        out[i] = ai % p
    for i, bi in enumerate(b):
        out[i] = (out[i] - bi) % p
    return _trim(out)


# ---------------------------------------------------------------------------
# Primality and square-part factoring
# ---------------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _sieve_primes(limit: int):
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i::i] = b"\x00" * len(sieve[i * i::i])
    return [i for i in range(limit + 1) if sieve[i]]


_SMALL_PRIMES = _sieve_primes(1000)


def square_prime_divisors(n: int):
    """Primes p with p^2 | n, exactly, for |n| <= OWN_FACTOR_LIMIT.

    Trial-divides by primes up to |n|^(1/3); the remaining cofactor has at
    most two prime factors, so it contributes a square divisor exactly when
    it is a perfect square (of a prime).  Larger inputs use a library
    factorization.
    """
    n = abs(n)
    if n <= 3:
        return ()
    if n > OWN_FACTOR_LIMIT:
        from sympy import factorint
        return tuple(sorted(p for p, e in factorint(n).items() if e >= 2))
    bound = round(n ** (1 / 3)) + 2
    out = []
    primes = (_SMALL_PRIMES if bound <= 1000 else _sieve_primes(bound))
    for p in primes:
        if p > bound and n % p:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e >= 2:
                out.append(p)
    if n > 1:
        r = isqrt(n)
        if r * r == n:
            out.append(r)      # cofactor has <= 2 prime factors; square => prime^2
    return tuple(out)


# ---------------------------------------------------------------------------
# Irreducibility
# ---------------------------------------------------------------------------

def is_irreducible(f: IntegerPolynomial) -> bool:
    """Exact irreducibility over Q for degree <= 8.

    Degrees 1-3 are decided by the rational-root test; higher degrees use a
    library factorization.  The result is cached on the polynomial.
    """
    if f._irreducible is not None:
        return f._irreducible
    n = f.degree
    if n > MAX_IRREDUCIBILITY_DEGREE:
        raise PreconditionError(
            f"irreducibility test capped at degree {MAX_IRREDUCIBILITY_DEGREE}")
    if n == 1:
        result = True
    elif n <= 3:
        result = not _has_rational_root(f)
    elif n == 4:
        result = not _has_rational_root(f) and not _quartic_splits(f)
    else:
        from sympy import Poly, Symbol
        x = Symbol("x")
        result = Poly(list(f.coefficients), x, domain="ZZ").is_irreducible
    f._irreducible = result
    return result


def _quartic_splits(f: IntegerPolynomial) -> bool:
    """Whether a monic quartic factors into two monic integer quadratics.

    By Gauss's lemma any rational factorization can be taken monic integral,
    so with the rational-root test this decides quartic irreducibility.
    """
    a0, a1, a2, a3, _ = f.asc
    if a0 == 0:
        return True
    for b in _signed_divisors(a0):
        d, r = divmod(a0, b)
        if r:
            continue
        # (x^2+ax+b)(x^2+cx+d): a+c = a3, ac = a2-b-d, ad+bc = a1
        s, p = a3, a2 - b - d
        disc = s * s - 4 * p
        if disc < 0:
            continue
        rt = isqrt(disc)
        if rt * rt != disc or (s + rt) % 2:
            continue
        a = (s + rt) // 2
        c = s - a
        if a * d + b * c == a1 or c * d + b * a == a1:
            return True
    return False


def _signed_divisors(n: int):
    n = abs(n)
    out = []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.extend((d, -d, n // d, -(n // d)))
    return sorted(set(out))


def _has_rational_root(f: IntegerPolynomial) -> bool:
    a0 = f.asc[0]
    if a0 == 0:
        return True
    for d in range(1, isqrt(abs(a0)) + 1):
        if a0 % d == 0:
            for r in (d, -d, a0 // d, -(a0 // d)):
                if f(r) == 0:
                    return True
    return False


# ---------------------------------------------------------------------------
# Dedekind criterion
# ---------------------------------------------------------------------------

def dedekind_p_maximal(f: IntegerPolynomial, p: int) -> bool:
    """True iff Z[x]/(f) is maximal at p (Dedekind's criterion).

    With f = g*h mod p (g the radical), lift G, H monic to Z[x] and set
    T = (G H - f)/p; the order is p-maximal iff gcd(T, g, h) = 1 mod p.
    Cubics take a specialized constant-size path; the generic route below
    is the reference it is tested against.
    """
    if f.degree == 3:
        return _dedekind_cubic_maximal(f.asc, p)
    return _dedekind_generic(f, p)


def _dedekind_generic(f: IntegerPolynomial, p: int) -> bool:
    fa = list(f.asc)
    fp = _pmod(fa, p)
    g = _pradical(fp, p)
    h = _pdivmod(fp, g, p)[0]
    G = _lift_monic(g, p)
    H = _lift_monic(h, p)
    GH = _poly_mul(G, H)
    diff = _poly_sub(GH, fa)
    T = []
    for c in diff:
        if c % p:
            raise InvariantViolationError("Dedekind lift failed divisibility")
        T.append(c // p)
    T = _trim(T)
    d1 = _pgcd(g, h, p)
    d2 = _pgcd(d1, _pmod(T, p), p)
    return d2 == [1]


def _lift_monic(g, p):
    """Lift to Z[x] with coefficients in (-p/2, p/2], keeping it monic."""
    out = [c if c <= p // 2 else c - p for c in g]
    out[-1] = 1
    return out


# Radicals of the eight monic cubics over F_2, keyed by (a, b, c) for
# x^3 + a x^2 + b x + c; values are ascending monic coefficient lists.
_CUBIC_RAD_MOD2 = {
    (0, 0, 0): [0, 1],             # x^3           -> x
    (0, 0, 1): [1, 0, 0, 1],       # (x+1)(x^2+x+1), squarefree
    (0, 1, 0): [0, 1, 1],          # x(x+1)^2      -> x^2+x
    (0, 1, 1): [1, 1, 0, 1],       # irreducible
    (1, 0, 0): [0, 1, 1],          # x^2(x+1)      -> x^2+x
    (1, 0, 1): [1, 0, 1, 1],       # irreducible
    (1, 1, 0): [0, 1, 1, 1],       # x(x^2+x+1), squarefree
    (1, 1, 1): [1, 1],             # (x+1)^3       -> x+1
}


def _cubic_radical_modp(a, b, c, p):
    """Monic radical of x^3 + a x^2 + b x + c over F_p, ascending list.

    Constant-size case analysis; multiplicities in a cubic never reach 5,
    so for p >= 5 the separable squarefree-part formula f / gcd(f, f')
    always applies, and p = 2, 3 are handled explicitly.
    """
    if p == 2:
        return _CUBIC_RAD_MOD2[(a, b, c)]
    if p == 3:
        if a:
            x0 = b * a % 3          # root of f' = -a x + b: x0 = b / a
            if (((x0 + a) * x0 + b) * x0 + c) % 3:
                return [c, b, a, 1]            # f(x0) != 0: squarefree
            q1 = (a + x0) % 3                  # f / (x - x0), double root
            return [(b + x0 * q1) % 3, q1, 1]
        if b:
            return [c, b, 0, 1]                # f' = b != 0: squarefree
        return [c % 3, 1]                      # x^3 + c = (x + c)^3
    inv3 = pow(3, -1, p)
    d1 = 2 * a * inv3 % p                      # monic f'/3 = x^2 + d1 x + d0
    d0 = b * inv3 % p
    e = (a - d1) % p                           # f = (x + e)(x^2+d1x+d0) + r
    r1 = (b - d0 - d1 * e) % p
    r0 = (c - d0 * e) % p
    if r1 == 0:
        if r0:
            return [c, b, a, 1]                # gcd(f, f') = 1
        return [e, 1]                          # f = (x+e) * f'/3: triple-ish
    x0 = -r0 * pow(r1, -1, p) % p              # root of the linear remainder
    if ((3 * x0 + 2 * a) * x0 + b) % p:
        return [c, b, a, 1]                    # f'(x0) != 0: squarefree
    q1 = (a + x0) % p                          # double root x0: f / (x - x0)
    return [(b + x0 * q1) % p, q1, 1]


def _dedekind_cubic_maximal(asc, p) -> bool:
    """Dedekind's criterion for a monic cubic, specialized and allocation-light."""
    c0, c1, c2 = asc[0] % p, asc[1] % p, asc[2] % p
    g = _cubic_radical_modp(c2, c1, c0, p)
    if len(g) == 4:
        return True                            # squarefree mod p
    fp = [c0, c1, c2, 1]
    h = _pdivmod(fp, g, p)[0]
    d1 = _pgcd(g, h, p)
    if d1 == [1]:
        return True
    G = _lift_monic(g, p)
    H = _lift_monic(h, p)
    GH = _poly_mul(G, H)
    T = []
    for x, y in zip(GH, (asc[0], asc[1], asc[2], 1)):
        d, r = divmod(x - y, p)
        if r:
            raise InvariantViolationError("Dedekind lift failed divisibility")
        T.append(d)
    return _pgcd(d1, _pmod(T, p), p) == [1]


# ---------------------------------------------------------------------------
# Exact linear algebra (Fractions / integers), degree <= 6
# ---------------------------------------------------------------------------

def _mat_inv(mat):
    """Inverse of a square Fraction matrix by Gauss-Jordan."""
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j))
                                       for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise InvariantViolationError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _vec_mat(vec, mat):
    n = len(mat[0])
    return [sum(vec[i] * mat[i][j] for i in range(len(vec)))
            for j in range(n)]


def _hnf(rows, n):
    """Row-style Hermite normal form of an integer row lattice of rank n."""
    work = [list(r) for r in rows if any(r)]
    basis = []
    for col in range(n):
        pivots = [r for r in work if r[col] != 0]
        if not pivots:
            raise InvariantViolationError("lattice not full rank")
        while True:
            pivots.sort(key=lambda r: abs(r[col]))
            piv = pivots[0]
            done = True
            for r in pivots[1:]:
                q = r[col] // piv[col]
                for j in range(n):
                    r[j] -= q * piv[j]
                if r[col]:
                    done = False
            pivots = [r for r in pivots if r[col] != 0]
            if done or len(pivots) == 1:
                break
        piv = pivots[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
        rest = [r for r in work if r is not pivots[0] and r[col] == 0]
        leftover = [r for r in work
                    if r is not pivots[0] and r[col] != 0]
        for r in leftover:
            q = r[col] // piv[col]
            for j in range(n):
                r[j] -= q * piv[j]
            if r[col]:
                raise InvariantViolationError("HNF reduction failed")
            rest.append(r)
        work = [r for r in rest if any(r)]
    # reduce entries above each pivot
    for i in range(n - 1, -1, -1):
        for k in range(i):
            q = basis[k][i] // basis[i][i]
            if q:
                for j in range(n):
                    basis[k][j] -= q * basis[i][j]
    return basis


def _nullspace_mod_p(rows, n, p):
    """Basis of the right nullspace of a matrix over F_p (n columns)."""
    a = [[x % p for x in row] for row in rows]
    pivots = {}
    row_i = 0
    for col in range(n):
        piv = next((r for r in range(row_i, len(a)) if a[r][col]), None)
        if piv is None:
            continue
        a[row_i], a[piv] = a[piv], a[row_i]
        inv = pow(a[row_i][col], -1, p)
        a[row_i] = [x * inv % p for x in a[row_i]]
        for r in range(len(a)):
            if r != row_i and a[r][col]:
                factor = a[r][col]
                a[r] = [(x - factor * y) % p for x, y in zip(a[r], a[row_i])]
        pivots[col] = row_i
        row_i += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * n
        vec[fc] = 1
        for col, r in pivots.items():
            vec[col] = (-a[r][fc]) % p
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# Maximal orders: Round-2 p-maximization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaximalOrder:
    poly: IntegerPolynomial
    disc: int                 # field discriminant
    index: int                # [O_K : Z[theta]]
    basis: tuple              # rows of integers; basis_i = row_i / den in theta-powers
    den: int


class _OrderArith:
    """Arithmetic in an order given by a basis matrix over a denominator."""

    def __init__(self, f: IntegerPolynomial, basis, den):
        self.f = f
        self.n = f.degree
        self.basis = [list(map(int, row)) for row in basis]
        self.den = int(den)
        self.inv = _mat_inv([[Fraction(x) for x in row] for row in self.basis])

    def product_coords(self, i, j):
        """Coordinates of basis_i * basis_j in the order basis (integers)."""
        prod = _poly_mul(self.basis[i], self.basis[j])
        _, rem = _poly_divmod_monic(prod, list(self.f.asc))
        rem = rem + [0] * (self.n - len(rem))
        vec = [Fraction(c, self.den) for c in rem]   # theta-coords of b_i b_j
        coords = _vec_mat(vec, self.inv)
        out = []
        for c in coords:
            if c.denominator != 1:
                raise InvariantViolationError(
                    "order basis is not multiplicatively closed")
            out.append(c.numerator)
        return out


def _solve_upper(basis, vec, den, n, errmsg):
    """Integer y with sum_i y[i]*basis[i] = vec/den, basis upper-triangular.

    Forward substitution with exact-divisibility checks; basis rows are the
    integer rows of a Hermite normal form (pivot at position i of row i).
    """
    y = [0] * n
    for j in range(n):
        acc = vec[j]
        for i in range(j):
            if y[i] and basis[i][j]:
                acc -= den * y[i] * basis[i][j]
        q, r = divmod(acc, den * basis[j][j])
        if r:
            raise InvariantViolationError(errmsg)
        y[j] = q
    return y


def _round2_at_p(f: IntegerPolynomial, basis, den, p):
    """p-maximize the order; returns (basis, den, local_index_exponent).

    All linear algebra runs on scaled integers: the order is held as an
    upper-triangular integer row basis over a common denominator, products
    are re-expressed in the basis by forward substitution, and the radical
    and multiplier-ring steps work mod p.  `_round2_at_p_reference` is the
    same algorithm in rational arithmetic and serves as a cross-check.
    """
    n = f.degree
    fa = list(f.asc)
    basis = [list(map(int, row)) for row in basis]
    den = int(den)
    closed_msg = "order basis is not multiplicatively closed"
    ideal_msg = "radical lattice is not an ideal of the order"
    exponent = 0
    while True:
        mult = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                prod = _poly_mul(basis[i], basis[j])
                _, rem = _poly_divmod_monic(prod, fa)
                rem = rem + [0] * (n - len(rem))
                mult[i][j] = mult[j][i] = _solve_upper(
                    basis, rem, den, n, closed_msg)

        def mul_modp(u, v):
            out = [0] * n
            for i, ui in enumerate(u):
                if ui:
                    for j, vj in enumerate(v):
                        if vj:
                            row = mult[i][j]
                            for k in range(n):
                                out[k] = (out[k] + ui * vj * row[k]) % p
            return out

        # Frobenius matrix of x -> x^p on O/pO
        def pow_p(vec):
            result = None
            sq = vec
            e = p
            while e:
                if e & 1:
                    result = sq if result is None else mul_modp(result, sq)
                sq = mul_modp(sq, sq)
                e >>= 1
            return result

        frob_rows = []
        for i in range(n):
            e_i = [1 if k == i else 0 for k in range(n)]
            frob_rows.append(pow_p(e_i))
        # iterate to reach exponent p^e >= n
        e = 1
        while p ** e < n:
            e += 1
        # images as rows: apply e times by matrix multiplication over F_p
        def apply(vec, rows):
            out = [0] * n
            for i, vi in enumerate(vec):
                if vi:
                    for k in range(n):
                        out[k] = (out[k] + vi * rows[i][k]) % p
            return out

        power_rows = [[1 if k == i else 0 for k in range(n)] for i in range(n)]
        for _ in range(e):
            power_rows = [apply(row, frob_rows) for row in power_rows]
        radical = _nullspace_mod_p(
            [[power_rows[i][k] for i in range(n)] for k in range(n)], n, p)
        # I_p lattice in order coordinates
        rows = [vec[:] for vec in radical]
        rows += [[p if k == i else 0 for k in range(n)] for i in range(n)]
        U = _hnf(rows, n)
        # multiplier-ring conditions: y * u_s in p * I_p
        cond_rows = []
        for s in range(n):
            ws = []
            for i in range(n):
                acc = [0] * n
                for k in range(n):
                    c = U[s][k]
                    if c:
                        row = mult[i][k]
                        for t in range(n):
                            acc[t] += c * row[t]
                ws.append(_solve_upper(U, acc, 1, n, ideal_msg))
            for t in range(n):
                cond_rows.append([ws[i][t] % p for i in range(n)])
        kernel = _nullspace_mod_p(cond_rows, n, p)
        if not kernel:
            return basis, den, exponent
        # enlarge: O' = O + (1/p) * kernel lifts
        new_rows = [[p * x for x in row] for row in basis]
        for vec in kernel:
            theta = [0] * n
            for i, vi in enumerate(vec):
                if vi:
                    for j in range(n):
                        theta[j] += vi * basis[i][j]
            new_rows.append(theta)
        new_basis = _hnf(new_rows, n)
        new_den = den * p
        g = new_den
        for row in new_basis:
            for x in row:
                if x:
                    g = gcd(g, abs(x))
        if g > 1:
            new_basis = [[x // g for x in row] for row in new_basis]
            new_den //= g
        # index gain this pass
        old_det = 1
        for i in range(n):
            old_det *= basis[i][i]
        new_det = 1
        for i in range(n):
            new_det *= new_basis[i][i]
        gain_num = old_det * new_den ** n
        gain_den = new_det * den ** n
        if gain_num % gain_den:
            raise InvariantViolationError("index gain is not integral")
        gain = gain_num // gain_den
        add = 0
        while gain % p == 0:
            gain //= p
            add += 1
        if gain != 1 or add == 0:
            raise InvariantViolationError(
                f"p-maximization step gained a non-p-power index at p={p}")
        exponent += add
        basis, den = new_basis, new_den


def _round2_at_p_reference(f: IntegerPolynomial, basis, den, p):
    """Rational-arithmetic twin of `_round2_at_p`, kept as a cross-check.

    Same radical/multiplier-ring iteration, but products are re-expressed in
    the order basis through an explicit Fraction matrix inverse.  Slower by a
    large factor; tests compare the two routes on random inputs.
    """
    n = f.degree
    exponent = 0
    while True:
        arith = _OrderArith(f, basis, den)
        mult = [[arith.product_coords(i, j) for j in range(n)]
                for i in range(n)]

        def mul_modp(u, v):
            out = [0] * n
            for i, ui in enumerate(u):
                if ui:
                    for j, vj in enumerate(v):
                        if vj:
                            row = mult[i][j]
                            for k in range(n):
                                out[k] = (out[k] + ui * vj * row[k]) % p
            return out

        def pow_p(vec):
            result = None
            sq = vec
            e = p
            while e:
                if e & 1:
                    result = sq if result is None else mul_modp(result, sq)
                sq = mul_modp(sq, sq)
                e >>= 1
            return result

        frob_rows = []
        for i in range(n):
            e_i = [1 if k == i else 0 for k in range(n)]
            frob_rows.append(pow_p(e_i))
        e = 1
        while p ** e < n:
            e += 1

        def apply(vec, rows):
            out = [0] * n
            for i, vi in enumerate(vec):
                if vi:
                    for k in range(n):
                        out[k] = (out[k] + vi * rows[i][k]) % p
            return out

        power_rows = [[1 if k == i else 0 for k in range(n)] for i in range(n)]
        for _ in range(e):
            power_rows = [apply(row, frob_rows) for row in power_rows]
        radical = _nullspace_mod_p(
            [[power_rows[i][k] for i in range(n)] for k in range(n)], n, p)
        rows = [vec[:] for vec in radical]
        rows += [[p if k == i else 0 for k in range(n)] for i in range(n)]
        U = _hnf(rows, n)
        Uinv = _mat_inv([[Fraction(x) for x in row] for row in U])
        cond_rows = []
        for s in range(n):
            base_rows = []
            for i in range(n):
                acc = [0] * n
                for k in range(n):
                    c = U[s][k]
                    if c:
                        row = mult[i][k]
                        for t in range(n):
                            acc[t] += c * row[t]
                base_rows.append(acc)
            for t in range(n):
                cond = []
                for i in range(n):
                    w = _vec_mat([Fraction(x) for x in base_rows[i]], Uinv)
                    val = w[t]
                    if val.denominator != 1:
                        raise InvariantViolationError(
                            "radical lattice is not an ideal of the order")
                    cond.append(val.numerator % p)
                cond_rows.append(cond)
        kernel = _nullspace_mod_p(cond_rows, n, p)
        if not kernel:
            return basis, den, exponent
        new_rows = [[p * x for x in row] for row in basis]
        for vec in kernel:
            theta = [0] * n
            for i, vi in enumerate(vec):
                if vi:
                    for j in range(n):
                        theta[j] += vi * basis[i][j]
            new_rows.append(theta)
        new_basis = _hnf(new_rows, n)
        new_den = den * p
        g = new_den
        for row in new_basis:
            for x in row:
                if x:
                    g = gcd(g, abs(x))
        if g > 1:
            new_basis = [[x // g for x in row] for row in new_basis]
            new_den //= g
        old_det = 1
        for i in range(n):
            old_det *= basis[i][i]
        new_det = 1
        for i in range(n):
            new_det *= new_basis[i][i]
        gain_num = old_det * new_den ** n
        gain_den = new_det * den ** n
        if gain_num % gain_den:
            raise InvariantViolationError("index gain is not integral")
        gain = gain_num // gain_den
        add = 0
        while gain % p == 0:
            gain //= p
            add += 1
        if gain != 1 or add == 0:
            raise InvariantViolationError(
                f"p-maximization step gained a non-p-power index at p={p}")
        exponent += add
        basis, den = new_basis, new_den


def maximal_order(f: IntegerPolynomial, square_primes=None,
                  poly_discriminant=None,
                  dedekind_tested=False) -> MaximalOrder:
    """Field discriminant, index, and an integral basis via Dedekind+Round-2.

    `square_primes` may supply the primes p with p^2 | disc(f) when the
    caller has already factored the discriminant, and `poly_discriminant`
    may supply disc(f) itself when the caller has already computed it.
    `dedekind_tested` skips the per-prime Dedekind screen when the caller
    already ran it; a p-maximal prime slipping through only costs a no-op
    p-maximization pass, never a wrong result.
    """
    if f.degree > MAX_ORDER_DEGREE:
        raise PreconditionError(
            f"maximal order computation capped at degree {MAX_ORDER_DEGREE}")
    if not is_irreducible(f):
        raise PreconditionError("maximal order requires an irreducible input")
    D = poly_disc(f) if poly_discriminant is None else int(poly_discriminant)
    if D == 0:
        raise InvariantViolationError("irreducible polynomial with zero discriminant")
    n = f.degree
    if square_primes is None:
        square_primes = square_prime_divisors(D)
    basis = [[1 if j == i else 0 for j in range(n)] for i in range(n)]
    den = 1
    index = 1
    for p in square_primes:
        if not dedekind_tested and dedekind_p_maximal(f, p):
            continue
        basis, den, exp = _round2_at_p(f, basis, den, p)
        index *= p ** exp
    if D % (index * index):
        raise InvariantViolationError("index squared does not divide disc")
    disc = D // (index * index)
    return MaximalOrder(poly=f, disc=disc, index=index,
                        basis=tuple(tuple(r) for r in basis), den=den)


def maximal_order_disc(f: IntegerPolynomial, square_primes=None):
    """(field discriminant, index) with poly_disc = field_disc * index^2."""
    order = maximal_order(f, square_primes)
    return order.disc, order.index


# ---------------------------------------------------------------------------
# Signatures (Sturm chains, exact)
# ---------------------------------------------------------------------------

def signature(f: IntegerPolynomial):
    """(real embeddings, complex-conjugate pairs) by exact Sturm counting."""
    chain = [[Fraction(c) for c in f.asc],
             [Fraction(c) for c in f.derivative_asc()]]
    while len(chain[-1]) > 1 or chain[-1][0] != 0:
        a, b = chain[-2], chain[-1]
        if all(x == 0 for x in b):
            chain.pop()
            break
        rem = _frac_poly_rem(a, b)
        if all(x == 0 for x in rem):
            break
        chain.append([-x for x in rem])
    def variations(at_pos: bool):
        signs = []
        for poly in chain:
            lead = poly[-1]
            if lead == 0:
                continue
            deg = len(poly) - 1
            if at_pos:
                s = 1 if lead > 0 else -1
            else:
                s = (1 if lead > 0 else -1) * (1 if deg % 2 == 0 else -1)
            signs.append(s)
        return sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])
    r1 = variations(False) - variations(True)
    if (f.degree - r1) % 2:
        raise InvariantViolationError("real-root count parity mismatch")
    return r1, (f.degree - r1) // 2


def _frac_poly_rem(a, b):
    a = list(a)
    db = len(b) - 1
    while len(a) - 1 >= db and any(a):
        shift = len(a) - len(b)
        c = a[-1] / b[-1]
        for i, bi in enumerate(b):
            a[shift + i] -= c * bi
        while len(a) > 1 and a[-1] == 0:
            a.pop()
        if all(x == 0 for x in a):
            return [Fraction(0)]
    return a


# ---------------------------------------------------------------------------
# Galois labels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaloisLabel:
    label: str
    confidence: str          # "certified" | "sampled"


def _is_square(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def galois_label(f: IntegerPolynomial, field_disc: int | None = None) -> GaloisLabel:
    """Galois group of the splitting field, as a transitive-group label.

    Degrees 2-4 are decided exactly (discriminant squareness and, in degree
    4, the cubic resolvent); degrees 5-6 sample Frobenius cycle types at the
    first 200 primes of good reduction and match them against the cycle-type
    sets of the candidate transitive groups.
    """
    if not is_irreducible(f):
        raise PreconditionError("Galois label requires an irreducible input")
    n = f.degree
    D = field_disc if field_disc is not None else poly_disc(f)
    if n == 1:
        return GaloisLabel("C1", "certified")
    if n == 2:
        return GaloisLabel("C2", "certified")
    if n == 3:
        return GaloisLabel("C3" if _is_square(D) else "S3", "certified")
    if n == 4:
        return GaloisLabel(_quartic_label(f), "certified")
    if n in (5, 6):
        return _sampled_label(f)
    raise PreconditionError("Galois labels capped at degree 6")


def _quartic_label(f: IntegerPolynomial) -> str:
    d, c, b, a, _one = f.asc      # f = x^4 + a x^3 + b x^2 + c x + d
    D = poly_disc(f)
    resolvent = IntegerPolynomial(
        [1, -b, a * c - 4 * d, -(a * a * d - 4 * b * d + c * c)])
    roots = _integer_roots(resolvent)
    rational_roots = len(roots)
    if rational_roots == 0:
        return "A4" if _is_square(D) else "S4"
    if rational_roots >= 3:
        return "C2xC2"
    y0 = roots[0]
    u = y0 * y0 - 4 * d
    v = a * a - 4 * (b - y0)
    def d_square(w):
        return w == 0 or _is_square(w) or _is_square(w * D)
    return "C4" if d_square(u) and d_square(v) else "D4"


def _integer_roots(f: IntegerPolynomial):
    asc = list(f.asc)
    found = set()
    while asc[0] == 0:                 # strip x | f; 0 is a root
        found.add(0)
        asc.pop(0)
        if len(asc) == 1:
            return sorted(found)
    a0 = asc[0]

    def ev(r):
        out = 0
        for c in reversed(asc):
            out = out * r + c
        return out

    for d in range(1, isqrt(abs(a0)) + 1):
        if a0 % d == 0:
            for r in (d, -d, a0 // d, -(a0 // d)):
                if r not in found and ev(r) == 0:
                    found.add(r)
    return sorted(found)


# candidate transitive groups for sampled labels: descriptor + display label
_SAMPLED_CANDIDATES = {
    5: (("C5", "cyclic(5)"),
        ("D5", "dihedral(5)"),
        ("C5:C4", "semidirect(5,4;v=2)"),
        ("A5", "alternating(5)"),
        ("S5", "symmetric(5)")),
    6: (("C6", "cyclic(6)"),
        ("S3", "semidirect(3,2;v=2)@regular"),
        ("D6", "dihedral(6)"),
        ("A4(6)", "coset(alternating(4),[(1 2)(3 4)])"),
        ("S4(6)", "coset(symmetric(4),[(1 2 3 4)])"),
        ("A5(6)", "coset(alternating(5),[(1 2 3 4 5),(2 5)(3 4)])"),
        ("S5(6)", "coset(symmetric(5),[(1 2 3 4 5),(2 3 5 4)])"),
        ("A6", "alternating(6)"),
        ("S6", "symmetric(6)")),
}

_SAMPLE_PRIME_COUNT = 200
_SAMPLE_SCAN_LIMIT = 100_000


def _group_cycle_types(descriptor: str):
    from .permcore import named_group
    G = named_group(descriptor)
    return G, frozenset(g.cycle_type() for g in G.elements)


def _sampled_label(f: IntegerPolynomial) -> GaloisLabel:
    D = poly_disc(f)
    observed = set()
    good = 0
    p = 1
    while good < _SAMPLE_PRIME_COUNT:
        p = _next_prime(p)
        if p > _SAMPLE_SCAN_LIMIT:
            if good == 0:
                raise PreconditionError(
                    "no primes of good reduction in the sampling window")
            break
        if D % p == 0:
            continue
        observed.add(factor_pattern_mod_p(f, p))
        good += 1
    candidates = []
    for label, desc in _SAMPLED_CANDIDATES[f.degree]:
        G, types = _group_cycle_types(desc)
        if observed <= types:
            candidates.append((types == observed, -G.order, label))
    if not candidates:
        raise PreconditionError(
            "sampled cycle types match no candidate transitive group; "
            f"observed {sorted(observed)}")
    candidates.sort(key=lambda c: (not c[0], -c[1], c[2]))
    return GaloisLabel(candidates[0][2], "sampled")


def _next_prime(n: int) -> int:
    n += 1
    while not is_prime(n):
        n += 1
    return n


# ---------------------------------------------------------------------------
# Canonical generators (minimal T2, then lexicographic)
# ---------------------------------------------------------------------------

def canonical_generator(f: IntegerPolynomial,
                        order: MaximalOrder | None = None) -> IntegerPolynomial:
    """Canonical defining polynomial of the field Q[x]/(f).

    Enumerates maximal-order elements inside the T2 ball that provably
    contains a minimal generator (Hunter/Minkowski bound), keeps those whose
    characteristic polynomial is squarefree (equivalently: generators), and
    returns the minimal (T2, lexicographic-coefficient) characteristic
    polynomial.  Isomorphic inputs map to the identical output.

    T2 values are ranked per candidate polynomial from that polynomial's own
    roots, so the ranking is independent of which defining polynomial seeded
    the search; near-ties within 1e-6 are re-scored at 60 digits before the
    lexicographic tie-break.
    """
    order = order or maximal_order(f)
    n = f.degree
    if n == 1:
        return f
    bound = t2_search_bound(n, abs(order.disc))
    radius = float(bound) * 1.01 + 1e-9
    try:
        points = _enumerate_ball_float(_t2_gram_float(f, order), radius)
    except InvariantViolationError:
        # ill-conditioned double-precision Gram matrix; redo at 60 digits
        points = _ball_high_precision(f, order, radius)
    if len(points) > GENERATOR_SEARCH_CAP:
        raise CapacityError(
            f"generator search box holds {len(points)} points "
            f"(cap {GENERATOR_SEARCH_CAP}); raise the cap to proceed",
            checkpoint=None)
    # Process points by ascending form value and stop as soon as no
    # unprocessed point can still enter the tie window: its exact T2 equals
    # its form value up to the Gram rounding error, far below the slack.
    points.sort(key=lambda qc: qc[0])
    seen: dict[tuple, IntegerPolynomial] = {}
    scored: list = []
    best = None
    for q, coords in points:
        if best is not None and q > best + 2e-6:
            break
        if not any(coords):
            continue
        charpoly = _char_poly(order, coords)
        if charpoly is None or charpoly.coefficients in seen:
            continue
        seen[charpoly.coefficients] = charpoly
        t2 = _poly_t2_float(charpoly)
        scored.append((t2, charpoly))
        if best is None or t2 < best:
            best = t2
    if not scored:
        raise InvariantViolationError(
            "generator search ball contained no generator; the T2 bound "
            f"{float(bound):.3f} must contain one")
    scored.sort()          # (T2, poly): equal T2 falls through to lex order
    t2_min = scored[0][0]
    close = [sg for sg in scored if sg[0] <= t2_min + 1e-6]
    if any(sg[0] != t2_min for sg in close):
        # genuine near-tie between distinct T2 values: settle at 60 digits
        rescored = sorted((_poly_t2_mp(g), g.coefficients, g) for _, g in close)
        return rescored[0][2]
    return close[0][1]


def _t2_gram_float(f: IntegerPolynomial, order: MaximalOrder):
    """Gram matrix G[i][j] = sum_k sigma_k(w_i) conj(sigma_k(w_j)) in floats."""
    import numpy as np
    n = f.degree
    roots = np.roots([1.0] + [float(c) for c in f.coefficients[1:]])
    P = np.vander(roots, N=n, increasing=True)        # P[k][j] = roots[k]^j
    B = np.array([[float(c) for c in row] for row in order.basis],
                 dtype=np.float64) / float(order.den)
    E = P @ B.T                                        # E[k][i] = sigma_k(w_i)
    G = (E.T @ E.conj()).real
    G = (G + G.T) / 2.0
    return [[float(G[i][j]) for j in range(n)] for i in range(n)]


def _poly_t2_float(g: IntegerPolynomial) -> float:
    n = g.degree
    if n == 2:
        b, a = g.asc[0], g.asc[1]
        if a * a - 4 * b > 0:
            return float(a * a - 2 * b)       # two real roots: sum of squares
        return float(2 * b)                   # conjugate pair: 2 |z|^2 = 2b
    if n == 3:
        c, b, a = g.asc[0], g.asc[1], g.asc[2]
        if (18 * a * b * c - 4 * a ** 3 * c + a * a * b * b
                - 4 * b ** 3 - 27 * c * c) > 0:
            return float(a * a - 2 * b)       # totally real: sum of squares
        rho = _cubic_real_root(a, b, c)
        return rho * rho - 2 * c / rho        # rho^2 + 2 |z|^2, rho |z|^2 = -c
    import numpy as np
    roots = np.roots([1.0] + [float(c) for c in g.coefficients[1:]])
    return float((roots * roots.conj()).real.sum())


def _cubic_real_root(a: int, b: int, c: int) -> float:
    """The unique real root of x^3 + a x^2 + b x + c (negative discriminant)."""
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    delta = q * q / 4.0 + p ** 3 / 27.0
    s = math.sqrt(max(delta, 0.0))
    u = -q / 2.0 + s
    v = -q / 2.0 - s
    rho = (math.copysign(abs(u) ** (1.0 / 3.0), u)
           + math.copysign(abs(v) ** (1.0 / 3.0), v) - a / 3.0)
    for _ in range(3):                         # Newton polish
        fr = ((rho + a) * rho + b) * rho + c
        dfr = (3.0 * rho + 2.0 * a) * rho + b
        if dfr:
            rho -= fr / dfr
    return rho


def _poly_t2_mp(g: IntegerPolynomial):
    import mpmath as mp
    with mp.workdps(60):
        roots = mp.polyroots([mp.mpf(1)] + [mp.mpf(c) for c in g.coefficients[1:]],
                             maxsteps=200, extraprec=200)
        return sum((r * mp.conj(r)).real for r in roots)


def _ball_high_precision(f: IntegerPolynomial, order: MaximalOrder, radius):
    import mpmath as mp
    n = f.degree
    with mp.workdps(60):
        roots = mp.polyroots([mp.mpf(1)] + [mp.mpf(c) for c in f.coefficients[1:]],
                             maxsteps=200, extraprec=200)
        emb = [[_eval_row(order.basis[i], order.den, r, mp)
                for i in range(n)] for r in roots]   # emb[k][i] = sigma_k(w_i)
        gram = [[sum((emb[k][i] * mp.conj(emb[k][j])).real for k in range(n))
                 for j in range(n)] for i in range(n)]
        return _enumerate_ball(gram, radius, mp)


def _eval_row(row, den, r, mp):
    acc = mp.mpc(0)
    powr = mp.mpc(1)
    for c in row:
        if c:
            acc += c * powr
        powr *= r
    return acc / den


def t2_search_bound(n: int, disc_abs: int) -> Fraction:
    """Rational T2 radius certain to contain a degree-n field generator.

    Any field of degree n and |disc| <= disc_abs has a generator with trace
    normalized into 0..floor(n/2) and T2 at most
    (floor(n/2))^2/n + gamma_{n-1} (disc_abs/n)^{1/(n-1)}; the returned
    Fraction over-approximates that value.
    """
    if not 2 <= n <= len(_HERMITE_POW) + 1:
        raise PreconditionError(
            f"T2 search bound supports degrees 2..{len(_HERMITE_POW) + 1}")
    return (Fraction((n // 2) ** 2, n)
            + _hermite_root(n - 1, disc_abs, n))


def _hermite_root(k: int, disc_abs: int, n: int) -> Fraction:
    """Rational over-approximation of gamma_k * (|d|/n)^{1/k}."""
    base = _HERMITE_POW[k] * Fraction(disc_abs, n)
    if base <= 0:
        return Fraction(0)
    est = float(base) ** (1.0 / k) * (1.0 + 1e-12) + 1e-12
    cand = Fraction(math.ceil(est * (1 << 20)), 1 << 20)
    while cand ** k < base:                    # exact certificate of >= root
        cand *= Fraction(1 << 20 | 1, 1 << 20)
    return cand


def _cholesky_rows(gram, sqrtfn, zero):
    """Upper-triangular R with Q(c) = sum_i (R c)_i^2, from G = L L^T."""
    n = len(gram)
    L = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = gram[i][j] - sum(L[i][k] * L[j][k] for k in range(j))
            if i == j:
                if s <= 0:
                    raise InvariantViolationError("T2 form not positive definite")
                L[i][i] = sqrtfn(s)
            else:
                L[i][j] = s / L[j][j]
    return [[L[j][i] for j in range(n)] for i in range(n)]


def _enumerate_quadratic_ball(R, radius, sqrtfn, ceilfn, floorfn, zero):
    """(Q(c), c) for integer vectors with Q(c) = c^T G c <= radius.

    Back-substitution on the Cholesky rows R; the reported Q value is the
    accumulated form value (same precision as R).
    """
    n = len(R)
    out = []
    coords = [0] * n

    def recurse(i, partial, residual):
        if len(out) > GENERATOR_SEARCH_CAP:
            return
        if i < 0:
            out.append((float(radius - residual), tuple(coords)))
            return
        rii = R[i][i]
        center = -partial[i] / rii
        half = sqrtfn(residual) / abs(rii)
        lo = int(ceilfn(center - half))
        hi = int(floorfn(center + half))
        for c in range(lo, hi + 1):
            coords[i] = c
            term = rii * c + partial[i]
            new_res = residual - term * term
            if new_res < -1e-9:
                continue
            new_partial = [partial[j] + R[j][i] * c
                           for j in range(i)] + [zero] * (n - i)
            recurse(i - 1, new_partial, max(new_res, zero))
        coords[i] = 0

    recurse(n - 1, [zero] * n, radius)
    return out


def _enumerate_ball_float(gram, radius):
    R = _cholesky_rows(gram, math.sqrt, 0.0)
    return _enumerate_quadratic_ball(R, float(radius), math.sqrt,
                                     math.ceil, math.floor, 0.0)


def _enumerate_ball(gram, radius, mp):
    R = _cholesky_rows(gram, mp.sqrt, mp.mpf(0))
    return _enumerate_quadratic_ball(R, mp.mpf(radius), mp.sqrt,
                                     mp.ceil, mp.floor, mp.mpf(0))


def _char_poly(order: MaximalOrder, coords):
    """Characteristic polynomial of sum coords_i * w_i, or None if it does
    not generate (detected by a non-squarefree characteristic polynomial)."""
    n = order.poly.degree
    theta = [0] * n
    for i, ci in enumerate(coords):
        if ci:
            for j in range(n):
                theta[j] += ci * order.basis[i][j]
    # multiplication matrix of x on the power basis, with denominator
    fasc = list(order.poly.asc)
    cols = []
    for j in range(n):
        prod = [0] * j + theta                 # theta * x^j
        _, rem = _poly_divmod_monic(prod, fasc)
        rem = rem + [0] * (n - len(rem))
        cols.append(rem)                       # true entries are cols[j][i]/den
    if n <= 3:
        return _char_poly_small(cols, order.den, n)
    A = [[Fraction(cols[j][i], order.den) for j in range(n)] for i in range(n)]
    cp = _char_poly_frac(A)
    coeffs = []
    for c in cp:
        if c.denominator != 1:
            raise InvariantViolationError(
                "integral element has non-integral characteristic polynomial")
        coeffs.append(c.numerator)
    poly_asc = coeffs
    # squarefree <=> generates the field
    der = [k * c for k, c in enumerate(poly_asc) if k >= 1]
    res = resultant_asc(poly_asc, der)
    if res == 0:
        return None
    return IntegerPolynomial.from_ascending(poly_asc)


def _exact_div(num: int, den: int) -> int:
    q, r = divmod(num, den)
    if r:
        raise InvariantViolationError(
            "integral element has non-integral characteristic polynomial")
    return q


def _char_poly_small(cols, den: int, n: int):
    """Integer charpoly for n <= 3 via trace / 2x2 minors / determinant."""
    if n == 1:
        return IntegerPolynomial.from_ascending([-_exact_div(cols[0][0], den), 1])
    if n == 2:
        tr = _exact_div(cols[0][0] + cols[1][1], den)
        det = _exact_div(cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1],
                         den * den)
        if tr * tr - 4 * det == 0:
            return None
        return IntegerPolynomial.from_ascending([det, -tr, 1])
    a00, a01, a02 = cols[0][0], cols[1][0], cols[2][0]
    a10, a11, a12 = cols[0][1], cols[1][1], cols[2][1]
    a20, a21, a22 = cols[0][2], cols[1][2], cols[2][2]
    tr = _exact_div(a00 + a11 + a22, den)
    s2 = _exact_div(a00 * a11 - a01 * a10 + a00 * a22 - a02 * a20
                    + a11 * a22 - a12 * a21, den * den)
    det = _exact_div(a00 * (a11 * a22 - a12 * a21)
                     - a01 * (a10 * a22 - a12 * a20)
                     + a02 * (a10 * a21 - a11 * a20), den ** 3)
    p, q, r = -tr, s2, -det                    # x^3 + p x^2 + q x + r
    disc = (18 * p * q * r - 4 * p ** 3 * r + p * p * q * q
            - 4 * q ** 3 - 27 * r * r)
    if disc == 0:
        return None
    return IntegerPolynomial.from_ascending([r, q, p, 1])


def _char_poly_frac(M):
    """char poly det(xI - M) by Faddeev-LeVerrier, ascending Fraction list."""
    n = len(M)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        MMk = [[sum(M[i][t] * Mk[t][j] for t in range(n)) for j in range(n)]
               for i in range(n)]
        ck = -sum(MMk[i][i] for i in range(n)) / k
        coeffs[n - k] = ck
        Mk = [[MMk[i][j] + (ck if i == j else 0) for j in range(n)]
              for i in range(n)]
    return coeffs


# ---------------------------------------------------------------------------
# Splitting field of an S3 cubic
# ---------------------------------------------------------------------------

def splitting_sextic(f: IntegerPolynomial) -> IntegerPolynomial:
    """Degree-6 defining polynomial of the Galois closure of an S3 cubic.

    Primary generator: a difference of two roots; its minimal polynomial is
    Res_y(f(y), f(x+y)) / x^3.  If the differences collide (degenerate), the
    generator r1 + 2 r2 is used instead via Res_y(f(y), f(x-2y)) divided by
    the exact root-tripling factor.
    """
    if f.degree != 3:
        raise PreconditionError("splitting sextic requires a cubic")
    if galois_label(f).label != "S3":
        raise PreconditionError("splitting sextic requires an S3 cubic")
    res = _resultant_in_shifted_roots(f, lambda k: _shift_poly(f, k))
    quot, rem = _poly_divmod_monic(res, [0, 0, 0, 1])
    if rem == [0] and len(quot) == 7:
        g = IntegerPolynomial.from_ascending(quot)
        if is_irreducible(g):
            return g
    # fallback: roots x = a + 2b, remove the a=b component 27 f(x/3)
    res2 = _resultant_in_shifted_roots(
        f, lambda k: _scale_shift_poly(f, k))
    triple = [27 * f.asc[0], 9 * f.asc[1], 3 * f.asc[2], 1]   # 27 f(x/3)
    quot2, rem2 = _poly_divmod_monic(res2, triple)
    if rem2 != [0] or len(quot2) != 7:
        raise InvariantViolationError(
            "both closure generators degenerated for " + str(f))
    g2 = IntegerPolynomial.from_ascending(quot2)
    if not is_irreducible(g2):
        raise InvariantViolationError(
            "closure generator polynomial is reducible for " + str(f))
    return g2


def _shift_poly(f: IntegerPolynomial, k: int):
    """Ascending coefficients of f(k + y) as a polynomial in y... evaluated
    implicitly: returns f(x+y) evaluated at x=k, i.e. the poly y -> f(k+y)."""
    # expand f(k+y) via synthetic shifts
    asc = list(f.asc)
    n = len(asc) - 1
    out = [0] * (n + 1)
    for i in range(n, -1, -1):
        new = [0] * (n + 1)            # Horner step: out = out*(y + k) + asc[i]
        for j in range(n, 0, -1):
            new[j] = out[j - 1] + k * out[j]
        new[0] = k * out[0] + asc[i]
        out = new
    return out


def _scale_shift_poly(f: IntegerPolynomial, k: int):
    """Ascending coefficients of y -> f(k - 2y)."""
    asc = list(f.asc)
    n = len(asc) - 1
    out = [0] * (n + 1)
    for i in range(n, -1, -1):
        new = [0] * (n + 1)
        for j in range(1, n + 1):
            new[j] = -2 * out[j - 1] + k * out[j]
        new[0] = k * out[0] + asc[i]
        out = new
    return out


def _resultant_in_shifted_roots(f: IntegerPolynomial, shifted):
    """Interpolate R(x) = Res_y(f(y), g_x(y)) from integer evaluations.

    `shifted(k)` must return the ascending coefficients of y -> g_k(y).
    The result has degree deg(f) * deg(g); here always 9.
    """
    target_deg = 9
    xs = list(range(-(target_deg // 2), target_deg // 2 + 2))
    ys = [resultant_asc(list(f.asc), shifted(k)) for k in xs]
    return _lagrange_integer(xs, ys, target_deg)


def _lagrange_integer(xs, ys, deg):
    """Exact Lagrange interpolation; asserts integer coefficients."""
    coeffs = [Fraction(0)] * (deg + 1)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = [Fraction(1)]          # ascending; product of (x - xj), j != i
        denom = 1
        for j, xj in enumerate(xs):
            if i == j:
                continue
            nxt = [Fraction(0)] * (len(basis) + 1)
            for k, b in enumerate(basis):
                nxt[k] += -xj * b
                nxt[k + 1] += b
            basis = nxt
            denom *= (xi - xj)
        scale = Fraction(yi, denom)
        for k, b in enumerate(basis):
            if k <= deg:
                coeffs[k] += scale * b
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise InvariantViolationError("resultant interpolation non-integral")
        out.append(c.numerator)
    return _trim(out)


# ---------------------------------------------------------------------------
# Discriminant tower identities
# ---------------------------------------------------------------------------

def tower_check(absM: int, absN: int, m: int, relnorm: int) -> bool:
    """absN = absM^m * relnorm, the closure/base discriminant relation."""
    return absN == absM ** m * relnorm


def brauer_check(absK: int, absM: int, absN: int,
                 F_order: int, H_order: int) -> bool:
    """Exact integer form of the kernel-field discriminant relation.

    absK^H_order = absM^(F_order-1) * (absN / absM^F_order); requires the
    tower divisibility absM^F_order | absN.
    """
    if absM <= 0 or absN <= 0 or absK <= 0:
        raise PreconditionError("absolute discriminant norms must be positive")
    if absN % (absM ** F_order):
        raise InvariantViolationError(
            f"tower inconsistency: {absM}^{F_order} does not divide {absN}")
    rel = absN // (absM ** F_order)
    return absK ** H_order == absM ** (F_order - 1) * rel


# ---------------------------------------------------------------------------
# Field records
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class NumberFieldRecord:
    defining_poly: IntegerPolynomial
    degree: int
    field_disc: int
    poly_disc: int
    index_squared: int
    galois_label: str
    confidence: str
    signature: tuple

    def csv_fields(self) -> tuple:
        """Fields in CSV_HEADER order; the polynomial prints constant-last."""
        return (str(self.degree), str(self.field_disc), self.galois_label,
                str(self.defining_poly),
                f"({self.signature[0]},{self.signature[1]})",
                self.confidence)

    def csv_row(self) -> str:
        out = []
        for field in self.csv_fields():
            if "," in field or '"' in field:
                field = '"' + field.replace('"', '""') + '"'
            out.append(field)
        return ",".join(out)

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "field_disc": self.field_disc,
            "galois_label": self.galois_label,
            "canonical_poly": list(self.defining_poly.coefficients),
            "signature": list(self.signature),
            "confidence": self.confidence,
        }


CSV_HEADER = "degree,field_disc,galois_label,canonical_poly,signature,confidence"


def _minkowski_ok(n: int, r2: int, disc_abs: int) -> bool:
    """|d|^(1/2) >= (n^n / n!) (pi/4)^{r2}, checked exactly via squares."""
    from math import factorial
    lhs_sq = Fraction(disc_abs)
    # (n^n/n!)^2 * (pi/4)^(2 r2) <= |d| ; bound pi <= 355/113 from above? we
    # need a LOWER bound certificate, so underestimate pi by 311/99 < pi
    pi_lo = Fraction(311, 99)
    rhs_sq = Fraction(n ** n, factorial(n)) ** 2 * (pi_lo / 4) ** (2 * r2)
    return lhs_sq >= rhs_sq or n == 1


def make_field(f: IntegerPolynomial, canonicalize: bool = True,
               square_primes=None) -> NumberFieldRecord:
    """Full record for the field defined by f (canonicalized by default)."""
    if not is_irreducible(f):
        raise PreconditionError(f"{f} is reducible; not a field")
    order = maximal_order(f, square_primes)
    poly = f
    if canonicalize:
        poly = canonical_generator(f, order)
        if poly != f:
            order2 = maximal_order(poly)
            if order2.disc != order.disc:
                raise InvariantViolationError(
                    "canonical generator changed the field discriminant: "
                    f"{order.disc} vs {order2.disc}")
            order = order2
    pd = poly_disc(poly)
    index_sq = pd // order.disc
    r1, r2 = signature(poly)
    if order.disc < 0 and r2 % 2 == 0 or order.disc > 0 and r2 % 2 == 1:
        raise InvariantViolationError(
            f"sign of discriminant {order.disc} contradicts signature {(r1, r2)}")
    if not _minkowski_ok(poly.degree, r2, abs(order.disc)):
        raise InvariantViolationError(
            f"|disc| = {abs(order.disc)} below the Minkowski lower bound")
    lab = galois_label(poly, order.disc)
    return NumberFieldRecord(
        defining_poly=poly, degree=poly.degree, field_disc=order.disc,
        poly_disc=pd, index_squared=index_sq, galois_label=lab.label,
        confidence=lab.confidence, signature=(r1, r2))
