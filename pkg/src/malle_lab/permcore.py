"""Finite permutation groups on 1-based points, built by full enumeration.

Everything here is deterministic: elements are kept sorted by their image
tuples (the identity is always first), and every construction round-trips
through a one-line descriptor syntax::

    construction[@action]
    construction := cyclic(n) | dihedral(m) | semidirect(m,t;v=V)
                  | affine_gf(q[,gen][,t=K][,frob]) | product(c1,c2)
                  | alternating(n) | symmetric(n) | coset(base,[cycles])
    action       := natural | regular        (natural is the default)

Shorthands ``C5``, ``D7``, ``A4``, ``S6`` are accepted on input and expand to
the canonical spellings.  ``p * q`` means "apply q first, then p".

No Schreier-Sims machinery: groups at the intended scale have a few hundred
elements, and a hard element cap (default 100000) guards runaway closures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd

from .errors import (CapacityError, DescriptorParseError,
                     InvariantViolationError, PreconditionError)

DEFAULT_ELEMENT_CAP = 100_000


# ---------------------------------------------------------------------------
# Permutation
# ---------------------------------------------------------------------------

class Permutation:
    """Immutable permutation of {1..degree}, stored as a tuple of images."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(int(i) for i in images)
        n = len(images)
        if sorted(images) != list(range(1, n + 1)):
            raise PreconditionError(f"not a permutation of 1..{n}: {images}")
        object.__setattr__(self, "images", images)

    # -- construction helpers ------------------------------------------------
    @staticmethod
    def identity(degree: int) -> "Permutation":
        return Permutation(range(1, degree + 1))

    @staticmethod
    def from_cycles(cycles, degree: int) -> "Permutation":
        images = list(range(1, degree + 1))
        for cyc in cycles:
            if len(set(cyc)) != len(cyc):
                raise PreconditionError(f"repeated point in cycle {cyc}")
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                if not 1 <= a <= degree:
                    raise PreconditionError(f"point {a} outside 1..{degree}")
                images[a - 1] = b
        return Permutation(images)

    @staticmethod
    def parse(text: str, degree: int) -> "Permutation":
        """Parse disjoint-cycle notation like ``(1 2)(3 4)`` or ``()``."""
        cycles = _parse_cycle_list(text)
        return Permutation.from_cycles(cycles, degree)

    # -- core operations -----------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (p * q)(x) = p(q(x)): apply q first.
        if self.degree != other.degree:
            raise PreconditionError("degree mismatch in composition")
        img = self.images
        return Permutation(tuple(img[j - 1] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return Permutation(inv)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images, start=1))

    def cycles(self):
        """Disjoint cycles covering every point (fixed points included),
        each rotated to start at its smallest point, sorted by that point."""
        seen = [False] * self.degree
        out = []
        for start in range(1, self.degree + 1):
            if seen[start - 1]:
                continue
            cyc = [start]
            seen[start - 1] = True
            nxt = self(start)
            while nxt != start:
                cyc.append(nxt)
                seen[nxt - 1] = True
                nxt = self(nxt)
            out.append(tuple(cyc))
        return out

    def cycle_type(self):
        """Multiset of cycle lengths (fixed points included), descending."""
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def orbit_count(self) -> int:
        return len(self.cycles())

    def fixed_points(self):
        return tuple(i for i, j in enumerate(self.images, start=1) if i == j)

    def cycle_string(self) -> str:
        parts = ["(" + " ".join(str(p) for p in c) + ")"
                 for c in self.cycles() if len(c) > 1]
        return "".join(parts) if parts else "()"

    # -- dunder plumbing -----------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __lt__(self, other):
        return self.images < other.images

    def __le__(self, other):
        return self.images <= other.images

    def __repr__(self):
        return f"Permutation({self.cycle_string()!r} deg {self.degree})"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Composition with q applied first (same as ``p * q``)."""
    return p * q


def _parse_cycle_list(text: str):
    text = text.strip()
    if text in ("()", ""):
        return []
    if not re.fullmatch(r"(\(\s*\d+(?:[ ,]\s*\d+)*\s*\))+", text):
        raise DescriptorParseError(f"bad cycle notation: {text!r}")
    cycles = []
    for grp in re.findall(r"\(([^()]*)\)", text):
        pts = [int(tok) for tok in re.split(r"[ ,]+", grp.strip()) if tok]
        if pts:
            cycles.append(tuple(pts))
    return cycles


# ---------------------------------------------------------------------------
# Closure and orbits
# ---------------------------------------------------------------------------

def group_closure(generators, degree: int | None = None,
                  cap: int = DEFAULT_ELEMENT_CAP):
    """All elements of the group generated by ``generators``, sorted.

    Breadth-first product closure starting from the identity; in a finite
    group the generated semigroup already contains all inverses.  Raises
    :class:`CapacityError` when more than ``cap`` elements appear.
    """
    gens = list(generators)
    if degree is None:
        if not gens:
            raise PreconditionError("need a degree for an empty generating set")
        degree = gens[0].degree
    for g in gens:
        if g.degree != degree:
            raise PreconditionError("mixed degrees in generating set")
    ident = Permutation.identity(degree)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for cur in frontier:
            for g in gens:
                cand = g * cur
                if cand not in seen:
                    seen.add(cand)
                    if len(seen) > cap:
                        raise CapacityError(
                            f"group closure exceeded the element cap of {cap}")
                    nxt.append(cand)
        frontier = nxt
    return tuple(sorted(seen))


def orbits(perms, degree: int):
    """Orbits of <perms> on {1..degree}, as a sorted tuple of sorted tuples."""
    parent = list(range(degree + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for g in perms:
        for i in range(1, degree + 1):
            ra, rb = find(i), find(g(i))
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    buckets = {}
    for i in range(1, degree + 1):
        buckets.setdefault(find(i), []).append(i)
    return tuple(tuple(v) for _, v in sorted(buckets.items()))


# ---------------------------------------------------------------------------
# PermGroup
# ---------------------------------------------------------------------------

class PermGroup:
    """A concrete permutation group: full element list plus provenance."""

    def __init__(self, generators, degree: int | None = None,
                 descriptor: str | None = None,
                 cap: int = DEFAULT_ELEMENT_CAP):
        gens = tuple(generators)
        if degree is None:
            if not gens:
                raise PreconditionError("cannot infer degree without generators")
            degree = gens[0].degree
        self.degree = degree
        self.generators = gens
        self.elements = group_closure(gens, degree, cap=cap)
        self.descriptor = descriptor
        self._elem_set = frozenset(self.elements)
        self._cache: dict = {}    # derived structural data, keyed by name

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Permutation:
        return self.elements[0]

    def __contains__(self, perm: Permutation) -> bool:
        return perm in self._elem_set

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return (isinstance(other, PermGroup)
                and self.degree == other.degree
                and self.elements == other.elements)

    def __hash__(self):
        return hash((self.degree, self.elements))

    def __repr__(self):
        name = self.descriptor or f"<{len(self.generators)} generators>"
        return f"PermGroup({name}, degree={self.degree}, order={self.order})"

    def is_transitive(self) -> bool:
        return len(orbits(self.generators, self.degree)) == 1

    def stabilizer(self, point: int):
        """All elements fixing ``point`` (a subgroup), sorted."""
        return tuple(g for g in self.elements if g(point) == point)

    def is_subgroup(self, subset) -> bool:
        sub = set(subset)
        if not sub or any(g not in self._elem_set for g in sub):
            return False
        if Permutation.identity(self.degree) not in sub:
            return False
        return all(a * b in sub for a in sub for b in sub)

    def is_abelian_set(self, subset) -> bool:
        elems = list(subset)
        return all(a * b == b * a for i, a in enumerate(elems)
                   for b in elems[i + 1:])


def coset_action(G: PermGroup, subgroup) -> PermGroup:
    """Action of G on the left cosets of a subgroup, degree [G : U].

    Cosets are numbered 1..index in order of their lexicographically smallest
    member, so coset 1 is U itself.  The resulting group is transitive; its
    kernel is the core of U in G.
    """
    U = tuple(sorted(set(subgroup)))
    if not G.is_subgroup(U):
        raise PreconditionError("coset action requires a subgroup of G")
    # coset of g = { g*u }, canonical representative = min element
    rep_cache = {}

    def coset_rep(g: Permutation) -> Permutation:
        if g in rep_cache:
            return rep_cache[g]
        members = [g * u for u in U]
        rep = min(members)
        for mem in members:
            rep_cache[mem] = rep
        return rep

    reps = sorted({coset_rep(g) for g in G.elements})
    index_of = {rep: i + 1 for i, rep in enumerate(reps)}

    def act(g: Permutation) -> Permutation:
        return Permutation(tuple(index_of[coset_rep(g * rep)] for rep in reps))

    gens = [act(g) for g in G.generators] or [Permutation.identity(len(reps))]
    sub_desc = "{" + ",".join(u.cycle_string() for u in U if not u.is_identity()) + "}"
    desc = None
    if G.descriptor:
        desc = f"cosets({G.descriptor},{sub_desc})"
    H = PermGroup(gens, degree=len(reps), descriptor=desc)
    return H


def regular_action(G: PermGroup) -> PermGroup:
    """The regular representation of G (degree |G|), via trivial-coset action."""
    return coset_action(G, (Permutation.identity(G.degree),))


# ---------------------------------------------------------------------------
# Small finite fields for the affine constructions
# ---------------------------------------------------------------------------

class _SmallField:
    """GF(p^e) with elements encoded as integers 0..q-1 (base-p digit vectors)."""

    def __init__(self, q: int):
        p, e = _prime_power(q)
        self.q, self.p, self.e = q, p, e
        self.modulus = self._find_irreducible(p, e)
        self._mul = {}

    @staticmethod
    def _find_irreducible(p: int, e: int):
        """Lexicographically smallest monic irreducible of degree e over F_p."""
        if e == 1:
            return (0, 1)  # x
        def encode(coeffs):  # coeffs low->high, monic assumed
            return coeffs
        def is_irred(coeffs):
            # trial division by all monic polynomials of degree 1..e//2
            for d in range(1, e // 2 + 1):
                for code in range(p ** d):
                    div = [(code // p ** i) % p for i in range(d)] + [1]
                    if _poly_mod(coeffs, div, p) == []:
                        return False
            return True
        for code in range(p ** e):
            coeffs = [(code // p ** i) % p for i in range(e)] + [1]
            if is_irred(coeffs):
                return tuple(coeffs)
        raise InvariantViolationError(f"no irreducible of degree {e} over F_{p}")

    def decode(self, v: int):
        return [(v // self.p ** i) % self.p for i in range(self.e)]

    def encode(self, coeffs) -> int:
        return sum((c % self.p) * self.p ** i for i, c in enumerate(coeffs))

    def add(self, a: int, b: int) -> int:
        ca, cb = self.decode(a), self.decode(b)
        return self.encode([(x + y) % self.p for x, y in zip(ca, cb)])

    def mul(self, a: int, b: int) -> int:
        key = (a, b) if a <= b else (b, a)
        if key in self._mul:
            return self._mul[key]
        ca, cb = self.decode(a), self.decode(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        rem = _poly_mod(prod, list(self.modulus), self.p)
        val = self.encode(rem + [0] * (self.e - len(rem)))
        self._mul[key] = val
        return val

    def pow(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r

    def mult_order(self, a: int) -> int:
        if a == 0:
            raise PreconditionError("0 has no multiplicative order")
        o, x = 1, a
        while x != 1:
            x = self.mul(x, a)
            o += 1
        return o

    def multiplicative_generator(self) -> int:
        for a in range(2, self.q):
            if self.mult_order(a) == self.q - 1:
                return a
        if self.q == 2:
            return 1
        raise InvariantViolationError("no multiplicative generator found")


def _poly_mod(num, den, p):
    """Remainder of num by monic den over F_p; coefficient lists low->high."""
    num = [c % p for c in num]
    d = len(den) - 1
    while len(num) and num[-1] == 0:
        num.pop()
    while len(num) - 1 >= d:
        lead = num[-1]
        shift = len(num) - 1 - d
        for i, c in enumerate(den):
            num[shift + i] = (num[shift + i] - lead * c) % p
        while len(num) and num[-1] == 0:
            num.pop()
    return num


def _prime_power(q: int):
    if q < 2:
        raise PreconditionError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            e = 0
            while q % p == 0:
                q //= p
                e += 1
            if q != 1:
                raise PreconditionError("field size must be a prime power")
            return p, e
    raise PreconditionError(f"{q} is not a prime power")


# ---------------------------------------------------------------------------
# Descriptor grammar
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Descriptor:
    kind: str                      # cyclic|dihedral|semidirect|affine_gf|product|alternating|symmetric|coset
    args: tuple = ()
    action: str = "natural"       # natural | regular

    def canonical(self) -> str:
        return f"{_print_construction(self)}@{self.action}"


def _print_construction(d: Descriptor) -> str:
    k, a = d.kind, d.args
    if k in ("cyclic", "dihedral", "alternating", "symmetric"):
        return f"{k}({a[0]})"
    if k == "semidirect":
        return f"semidirect({a[0]},{a[1]};v={a[2]})"
    if k == "affine_gf":
        q, t, frob = a
        parts = [str(q)]
        if t is not None:
            parts.append(f"t={t}")
        if frob:
            parts.append("frob")
        return f"affine_gf({','.join(parts)})"
    if k == "product":
        return f"product({_print_construction(a[0])},{_print_construction(a[1])})"
    if k == "coset":
        base, perms = a
        def one(cycles):
            return "".join("(" + " ".join(str(p) for p in c) + ")"
                           for c in cycles) or "()"
        cyc = ",".join(one(c) for c in perms) or "()"
        return f"coset({_print_construction(base)},[{cyc}])"
    raise DescriptorParseError(f"unknown construction kind {k!r}")


_SHORTHAND = {"A": "alternating", "S": "symmetric", "C": "cyclic", "D": "dihedral"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise DescriptorParseError(f"{msg} in descriptor {self.text!r}", self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        self.skip_ws()
        if not self.text.startswith(ch, self.pos):
            self.error(f"expected {ch!r}")
        self.pos += len(ch)

    def number(self) -> int:
        self.skip_ws()
        m = re.match(r"\d+", self.text[self.pos:])
        if not m:
            self.error("expected a number")
        self.pos += m.end()
        return int(m.group())

    def word(self) -> str:
        self.skip_ws()
        m = re.match(r"[A-Za-z_][A-Za-z_0-9]*", self.text[self.pos:])
        if not m:
            self.error("expected a name")
        self.pos += m.end()
        return m.group()

    def parse(self) -> Descriptor:
        d = self.construction()
        action = "natural"
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == "@":
            self.pos += 1
            action = self.word()
            if action not in ("natural", "regular"):
                self.error(f"unknown action {action!r}")
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("trailing characters")
        return Descriptor(d.kind, d.args, action)

    def construction(self) -> Descriptor:
        name = self.word()
        m = re.fullmatch(r"([ASCD])(\d+)", name)
        if m and self.peek() != "(":
            return Descriptor(_SHORTHAND[m.group(1)], (int(m.group(2)),))
        if name in ("cyclic", "dihedral", "alternating", "symmetric"):
            self.expect("(")
            n = self.number()
            self.expect(")")
            return Descriptor(name, (n,))
        if name == "semidirect":
            self.expect("(")
            m_ = self.number()
            self.expect(",")
            t_ = self.number()
            self.expect(";")
            kw = self.word()
            if kw != "v":
                self.error("expected v=...")
            self.expect("=")
            v_ = self.number()
            self.expect(")")
            return Descriptor("semidirect", (m_, t_, v_))
        if name == "affine_gf":
            self.expect("(")
            q = self.number()
            t = None
            frob = False
            while self.peek() == ",":
                self.expect(",")
                if self.peek().isdigit():
                    t = self.number()
                    continue
                w = self.word()
                if w == "gen":
                    continue  # explicit "full multiplicative group" marker
                if w == "frob":
                    frob = True
                elif w == "t":
                    self.expect("=")
                    t = self.number()
                else:
                    self.error(f"unknown affine_gf option {w!r}")
            self.expect(")")
            return Descriptor("affine_gf", (q, t, frob))
        if name == "product":
            self.expect("(")
            c1 = self.construction()
            self.expect(",")
            c2 = self.construction()
            self.expect(")")
            return Descriptor("product", (c1, c2))
        if name == "coset":
            self.expect("(")
            base = self.construction()
            self.expect(",")
            self.expect("[")
            self.skip_ws()
            end = self.text.find("]", self.pos)
            if end < 0:
                self.error("unterminated cycle list")
            cyc_text = self.text[self.pos:end]
            self.pos = end + 1
            # generators are separated by commas outside parentheses
            perms = []
            for chunk in _split_top_level(cyc_text):
                cycles = tuple(_parse_cycle_list(chunk))
                if cycles:
                    perms.append(cycles)
            self.expect(")")
            return Descriptor("coset", (base, tuple(perms)))
        self.error(f"unknown construction {name!r}")


def _split_top_level(text: str):
    """Split on commas that sit outside any parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def parse_descriptor(text: str) -> Descriptor:
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# named_group: build PermGroups from descriptors
# ---------------------------------------------------------------------------

def named_group(spec, cap: int = DEFAULT_ELEMENT_CAP) -> PermGroup:
    """Build the permutation group described by ``spec`` (string or Descriptor)."""
    d = parse_descriptor(spec) if isinstance(spec, str) else spec
    G = _build_natural(d, cap)
    if d.action == "regular":
        reg = regular_action(G)
        return PermGroup(reg.generators, reg.degree,
                         descriptor=Descriptor(d.kind, d.args, "regular").canonical(),
                         cap=cap)
    return G


def _build_natural(d: Descriptor, cap: int) -> PermGroup:
    canon = Descriptor(d.kind, d.args, "natural").canonical()
    if d.kind == "cyclic":
        n, = d.args
        if n < 1:
            raise PreconditionError("cyclic(n) needs n >= 1")
        gen = Permutation.from_cycles([tuple(range(1, n + 1))], n) if n > 1 \
            else Permutation.identity(1)
        return PermGroup([gen], n, descriptor=canon, cap=cap)
    if d.kind == "dihedral":
        m, = d.args
        if m < 3:
            raise PreconditionError("dihedral(m) needs m >= 3")
        rot = Permutation(tuple((i % m) + 1 for i in range(1, m + 1)))
        refl = Permutation(tuple(((m - (i - 1)) % m) + 1 for i in range(1, m + 1)))
        return PermGroup([rot, refl], m, descriptor=canon, cap=cap)
    if d.kind == "semidirect":
        m, t, v = d.args
        if m < 2 or t < 1:
            raise PreconditionError("semidirect(m,t;v) needs m >= 2, t >= 1")
        if gcd(v, m) != 1:
            raise PreconditionError(f"v={v} is not invertible mod {m}")
        if _mult_order(v, m) != t:
            raise PreconditionError(
                f"v={v} has multiplicative order {_mult_order(v, m)} mod {m}, not {t}")
        sigma = Permutation(tuple(((i - 1 + 1) % m) + 1 for i in range(1, m + 1)))
        psi = Permutation(tuple(((v * (i - 1)) % m) + 1 for i in range(1, m + 1)))
        return PermGroup([sigma, psi], m, descriptor=canon, cap=cap)
    if d.kind == "affine_gf":
        q, t, frob = d.args
        F = _SmallField(q)
        if t is None:
            t = q - 1
        if t < 1 or (q - 1) % t != 0:
            raise PreconditionError(f"t={t} must divide q-1={q - 1}")
        gens = []
        # translations by a basis of the additive group
        for i in range(F.e):
            b = F.p ** i
            gens.append(Permutation(tuple(F.add(x, b) + 1 for x in range(q))))
        if t > 1:
            g = F.multiplicative_generator()
            s = F.pow(g, (q - 1) // t)
            gens.append(Permutation(tuple(F.mul(s, x) + 1 for x in range(q))))
        if frob:
            if F.e == 1:
                raise PreconditionError("frob requires a non-prime field")
            gens.append(Permutation(tuple(F.pow(x, F.p) + 1 for x in range(q))))
        return PermGroup(gens, q, descriptor=canon, cap=cap)
    if d.kind == "product":
        c1, c2 = d.args
        G1 = _build_natural(c1, cap)
        G2 = _build_natural(c2, cap)
        d1, d2 = G1.degree, G2.degree
        deg = d1 * d2

        def left(g):
            return Permutation(tuple((g(i) - 1) * d2 + j
                                     for i in range(1, d1 + 1)
                                     for j in range(1, d2 + 1)))

        def right(h):
            return Permutation(tuple((i - 1) * d2 + h(j)
                                     for i in range(1, d1 + 1)
                                     for j in range(1, d2 + 1)))

        gens = [left(g) for g in G1.generators] + [right(h) for h in G2.generators]
        return PermGroup(gens, deg, descriptor=canon, cap=cap)
    if d.kind in ("alternating", "symmetric"):
        n, = d.args
        if n < 1:
            raise PreconditionError("degree must be >= 1")
        if d.kind == "symmetric":
            gens = [Permutation.from_cycles([(1, 2)], n)] if n >= 2 else []
            if n >= 2:
                gens.append(Permutation.from_cycles([tuple(range(1, n + 1))], n))
        else:
            if n <= 2:
                gens = []
            elif n % 2 == 1:
                gens = [Permutation.from_cycles([(1, 2, 3)], n),
                        Permutation.from_cycles([tuple(range(1, n + 1))], n)]
            else:
                gens = [Permutation.from_cycles([(1, 2, 3)], n),
                        Permutation.from_cycles([tuple(range(2, n + 1))], n)]
        gens = gens or [Permutation.identity(max(n, 1))]
        return PermGroup(gens, n, descriptor=canon, cap=cap)
    if d.kind == "coset":
        base, perms = d.args
        G = _build_natural(base, cap)
        sub_gens = [Permutation.from_cycles(cycles, G.degree) for cycles in perms]
        U = group_closure(sub_gens or [Permutation.identity(G.degree)],
                          G.degree, cap=cap)
        for u in U:
            if u not in G:
                raise PreconditionError(
                    f"subgroup generator closure leaves the base group: {u.cycle_string()}")
        act = coset_action(G, U)
        return PermGroup(act.generators, act.degree, descriptor=canon, cap=cap)
    raise DescriptorParseError(f"unknown construction kind {d.kind!r}")


def _mult_order(v: int, m: int) -> int:
    o, x = 1, v % m
    while x != 1:
        x = (x * v) % m
        o += 1
        if o > m:
            raise PreconditionError("order computation ran away")
    return o
