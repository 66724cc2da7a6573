"""Structural analysis of finite permutation groups.

Provides conjugacy classes, the complete normal-subgroup lattice (built by
joining normal closures of conjugacy classes — sound and complete for normal
subgroups), Frobenius classification with two independently checked
characterizations, and the (m, t, p, p1) parameter block describing a
decomposition 1 -> F -> G -> H -> 1 with F abelian and normal.

Class membership conventions:
  * ``in_F1``: G has a nontrivial abelian normal subgroup (witnessed by F).
  * ``in_F``: G is a Frobenius group whose kernel is exactly F.  Tested
    abstractly (gcd(|F|, |G:F|) = 1 and every nonidentity element of F has
    its centralizer inside F) and, when the given action has degree |F|,
    cross-checked against the permutation-action classification.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd, lcm

from .errors import InvariantViolationError, PreconditionError
from .permcore import (PermGroup, Permutation, coset_action, group_closure,
                       orbits)


def smallest_prime_divisor(n: int) -> int:
    if n < 2:
        raise PreconditionError(f"{n} has no prime divisor")
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def element_order(g: Permutation) -> int:
    return lcm(*(len(c) for c in g.cycles()))


# ---------------------------------------------------------------------------
# Conjugacy classes and the normal subgroup lattice
# ---------------------------------------------------------------------------

def conjugacy_classes(G: PermGroup):
    """Conjugacy classes as sorted tuples, ordered by their smallest member."""
    cached = G._cache.get("conjugacy_classes")
    if cached is not None:
        return cached
    inverses = {g: g.inverse() for g in G.elements}
    seen = set()
    classes = []
    for h in G.elements:
        if h in seen:
            continue
        cls = tuple(sorted({g * h * inverses[g] for g in G.elements}))
        classes.append(cls)
        seen.update(cls)
    result = tuple(classes)
    G._cache["conjugacy_classes"] = result
    return result


def centralizer(G: PermGroup, x: Permutation):
    return tuple(g for g in G.elements if g * x == x * g)


def center(G: PermGroup):
    return tuple(g for g in G.elements
                 if all(g * h == h * g for h in G.generators))


def normal_subgroups(G: PermGroup):
    """Complete list of normal subgroups, sorted by order then element list.

    Every normal subgroup is a union of conjugacy classes, hence the join of
    the normal closures of the classes it contains; conversely any join of
    such closures is normal.  Iterating joins to a fixed point therefore
    enumerates exactly the normal subgroups.
    """
    cached = G._cache.get("normal_subgroups")
    if cached is not None:
        return cached
    classes = conjugacy_classes(G)
    # normal closure of each nonidentity class, deduplicated, with a small
    # generating set so joins stay cheap
    atom_map = {}
    for cls in classes:
        if len(cls) == 1 and cls[0].is_identity():
            continue
        closure = group_closure(cls, G.degree)
        if closure not in atom_map:
            atom_map[closure] = minimal_generators(closure, G.degree)
    atoms = sorted(atom_map.items(), key=lambda kv: len(kv[0]))
    trivial = (Permutation.identity(G.degree),)
    found = {trivial: ()}        # subgroup -> generating set
    frontier = [trivial]
    while frontier:
        new = []
        for N in frontier:
            Nset = set(N)
            Ngens = found[N]
            for A, Agens in atoms:
                if len(A) <= len(N) and all(a in Nset for a in A):
                    continue
                Jgens = Ngens + tuple(g for g in Agens if g not in Nset)
                J = group_closure(Jgens, G.degree)
                if J not in found:
                    found[J] = Jgens
                    new.append(J)
        frontier = new
    result = tuple(sorted(found,
                          key=lambda N: (len(N), [g.images for g in N])))
    G._cache["normal_subgroups"] = result
    return result


def is_abelian(elems) -> bool:
    elems = list(elems)
    return all(a * b == b * a for i, a in enumerate(elems) for b in elems[i + 1:])


def abelian_normal_subgroups(G: PermGroup):
    """Nontrivial abelian normal subgroups (the whole group included if abelian)."""
    return tuple(N for N in normal_subgroups(G) if len(N) > 1 and is_abelian(N))


# ---------------------------------------------------------------------------
# Frobenius classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrobeniusData:
    kernel: tuple                 # fixed-point-free elements plus identity
    complement: tuple             # stabilizer of point 1
    kernel_is_abelian: bool


def frobenius_classify(G: PermGroup):
    """Classify the given transitive action; None when not Frobenius.

    Runs two independent characterizations — trivial intersection of the
    point stabilizer with its conjugates, and the fixed-point condition (no
    nonidentity element fixes two points, some nonidentity element fixes
    one) — and demands they agree.  On success the kernel (fixed-point-free
    elements plus identity) is verified to be a normal subgroup whose order
    equals the degree.
    """
    if not G.is_transitive():
        raise PreconditionError("Frobenius classification requires a transitive action")
    H = G.stabilizer(1)
    Hset = frozenset(H)

    # characterization 1: H nontrivial, proper, and H ∩ H^g = {1} for g ∉ H
    by_definition = 1 < len(H) < G.order
    if by_definition:
        inverses = {g: g.inverse() for g in G.elements}
        for g in G.elements:
            if g in Hset:
                continue
            conj = {g * h * inverses[g] for h in H}
            if len(conj & Hset) != 1:
                by_definition = False
                break

    # characterization 2: fixed-point counts
    fixed_counts = [len(g.fixed_points()) for g in G.elements if not g.is_identity()]
    by_fixed_points = (bool(fixed_counts)
                       and max(fixed_counts) == 1
                       and any(c == 1 for c in fixed_counts))

    if by_definition != by_fixed_points:
        raise InvariantViolationError(
            "Frobenius characterizations disagree: "
            f"stabilizer-intersection says {by_definition}, "
            f"fixed-point condition says {by_fixed_points}")
    if not by_definition:
        return None

    kernel = tuple(sorted([g for g in G.elements
                           if not g.is_identity() and not g.fixed_points()]
                          + [G.identity]))
    if len(kernel) != G.degree:
        raise InvariantViolationError(
            f"Frobenius kernel size {len(kernel)} != degree {G.degree}")
    if not G.is_subgroup(kernel):
        raise InvariantViolationError("Frobenius kernel is not a subgroup")
    kset = frozenset(kernel)
    for g in G.elements:
        gi = g.inverse()
        if any(g * f * gi not in kset for f in kernel):
            raise InvariantViolationError("Frobenius kernel is not normal")
    if len(kernel) * len(H) != G.order or len(kset & Hset) != 1:
        raise InvariantViolationError("kernel/complement orders inconsistent")
    return FrobeniusData(kernel=kernel, complement=H,
                         kernel_is_abelian=is_abelian(kernel))


def _frobenius_over_kernel(G: PermGroup, F: tuple) -> bool:
    """Abstract test: G is Frobenius with kernel exactly F.

    Criterion (classical, via Schur–Zassenhaus): gcd(|F|, [G:F]) = 1 and the
    centralizer of every nonidentity element of F lies inside F.  This does
    not need any particular permutation action.
    """
    m = len(F)
    t = G.order // m
    if gcd(m, t) != 1:
        return False
    Fset = frozenset(F)
    for f in F:
        if f.is_identity():
            continue
        for g in G.elements:
            if g * f == f * g and g not in Fset:
                return False
    return True


# ---------------------------------------------------------------------------
# Parameter block
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupAnalysis:
    group: PermGroup
    abelian_normal_subgroups: tuple
    frobenius: FrobeniusData | None
    kernel: tuple                 # the chosen F
    quotient: PermGroup           # H = G/F in its regular coset action
    m: int
    t: int
    p: int
    p1: int
    in_F1: bool
    in_F: bool

    def to_json(self) -> str:
        gens = minimal_generators(self.kernel, self.group.degree)
        payload = {
            "group": self.group.descriptor or "<anonymous>",
            "order": self.group.order,
            "degree": self.group.degree,
            "m": self.m,
            "t": self.t,
            "p": self.p,
            "p1": self.p1,
            "frobenius": self.in_F,
            "kernel_generators": [g.cycle_string() for g in gens],
        }
        return json.dumps(payload)


def minimal_generators(elems, degree: int):
    """Greedy minimal generating subset of a subgroup, deterministic."""
    target = set(elems)
    gens: list = []
    have = {Permutation.identity(degree)}
    for g in sorted(target):
        if g in have:
            continue
        gens.append(g)
        have = set(group_closure(gens, degree))
        if have == target:
            break
    if have != target:
        raise InvariantViolationError("generating-set search failed to span the subgroup")
    return tuple(gens)


def notation_parameters(G: PermGroup, F) -> GroupAnalysis:
    """Build the (m, t, p, p1) parameter block for a chosen abelian normal F.

    F must be a nontrivial proper abelian normal subgroup (t = 1 is rejected:
    that makes the quotient trivial and the group abelian, which is handled
    by the abelian count registry, not by the two-step bound).
    """
    F = tuple(sorted(set(F)))
    cached = G._cache.get(("analysis", F))
    if cached is not None:
        return cached
    if len(F) < 2:
        raise PreconditionError("F must be nontrivial")
    if not G.is_subgroup(F):
        raise PreconditionError("F is not a subgroup of G")
    if not is_abelian(F):
        raise PreconditionError("F is not abelian")
    Fset = frozenset(F)
    for g in G.elements:
        gi = g.inverse()
        if any(g * f * gi not in Fset for f in F):
            raise PreconditionError("F is not normal in G")
    m = len(F)
    if G.order % m:
        raise InvariantViolationError("subgroup order does not divide group order")
    t = G.order // m
    if t == 1:
        raise PreconditionError(
            "F = G leaves a trivial quotient; abelian groups take the "
            "abelian-count route instead of the two-step bound")
    p = smallest_prime_divisor(m)
    p1 = smallest_prime_divisor(t)

    in_F = _frobenius_over_kernel(G, F)
    frob = None
    if G.degree == m and G.is_transitive():
        frob = frobenius_classify(G)
        direct = frob is not None and frozenset(frob.kernel) == Fset
        if direct != in_F:
            raise InvariantViolationError(
                "abstract Frobenius-kernel test disagrees with the "
                f"permutation-action classification ({in_F} vs {direct})")
    quotient = coset_action(G, F)
    if quotient.order != t or quotient.degree != t:
        raise InvariantViolationError(
            "coset action on a normal subgroup must be the regular "
            f"quotient action; got order {quotient.order}, degree "
            f"{quotient.degree}, expected {t}")
    analysis = GroupAnalysis(group=G,
                             abelian_normal_subgroups=abelian_normal_subgroups(G),
                             frobenius=frob,
                             kernel=F,
                             quotient=quotient,
                             m=m, t=t, p=p, p1=p1,
                             in_F1=True, in_F=in_F)
    G._cache[("analysis", F)] = analysis
    return analysis


def analyses_for(G: PermGroup):
    """One GroupAnalysis per nontrivial proper abelian normal subgroup."""
    out = []
    for F in abelian_normal_subgroups(G):
        if len(F) == G.order:
            continue
        out.append(notation_parameters(G, F))
    return tuple(out)


# ---------------------------------------------------------------------------
# Structural labels (used by the bound registries and reports)
# ---------------------------------------------------------------------------

def abelian_invariant_factors(elems) -> tuple:
    """Invariant factors d1 | d2 | ... of an abelian group of permutations.

    Derived from element-order counts: for each prime p, the number of
    solutions of x^(p^k) = 1 determines how many factors have p-exponent
    at least k.
    """
    n = len(elems)
    if n == 1:
        return ()
    orders = [element_order(g) for g in elems]
    primes = []
    nn = n
    d = 2
    while d * d <= nn:
        if nn % d == 0:
            primes.append(d)
            while nn % d == 0:
                nn //= d
        d += 1
    if nn > 1:
        primes.append(nn)
    exps_by_prime = {}
    for p in primes:
        a = 0
        nn = n
        while nn % p == 0:
            nn //= p
            a += 1
        # deltas[k-1] = number of cyclic factors with p-exponent >= k,
        # recovered from the p^k-torsion counts
        deltas = []
        prev = 0
        k = 1
        while prev < a:
            count = sum(1 for o in orders if (p ** k) % o == 0)
            v, c = 0, count
            while c % p == 0:
                c //= p
                v += 1
            if c != 1:
                raise InvariantViolationError(
                    "torsion count not a prime power; input not abelian?")
            deltas.append(v - prev)
            prev = v
            k += 1
        mult = []
        for e in range(len(deltas), 0, -1):
            exactly = deltas[e - 1] - (deltas[e] if e < len(deltas) else 0)
            mult.extend([e] * exactly)
        exps_by_prime[p] = mult  # descending exponents
    width = max(len(v) for v in exps_by_prime.values())
    factors = []
    for i in range(width):
        f = 1
        for p, exps in exps_by_prime.items():
            if i < len(exps):
                f *= p ** exps[i]
        factors.append(f)
    factors.sort()
    prod = 1
    for f in factors:
        prod *= f
    if prod != n:
        raise InvariantViolationError("invariant factors do not multiply to the order")
    return tuple(factors)


def structural_label(elems) -> str:
    """Coarse isomorphism label: C6, C2xC2, D5, C5:C4, C7:C3, or G<n>."""
    elems = tuple(sorted(elems))
    n = len(elems)
    if n == 1:
        return "C1"
    if is_abelian(elems):
        factors = abelian_invariant_factors(elems)
        return "x".join(f"C{f}" for f in factors)
    degree = elems[0].degree
    # dihedral: cyclic subgroup of index 2 inverted by an outside involution
    if n % 2 == 0:
        half = n // 2
        for r in elems:
            if element_order(r) == half:
                R = set(group_closure([r], degree))
                ri = r.inverse()
                if any(element_order(s) == 2 and s not in R
                       and s * r * s.inverse() == ri for s in elems):
                    return f"D{half}"
                break  # any other order-n/2 element generates a conjugate subgroup
    # nonabelian of order p*q (p < q primes): unique up to isomorphism
    sp = smallest_prime_divisor(n)
    if sp != n and n // sp != sp and smallest_prime_divisor(n // sp) == n // sp:
        return f"C{n // sp}:C{sp}"
    if n == 20:
        # distinguish the order-20 Frobenius group from the dicyclic group:
        # in the former the centralizer of an order-5 element has order 5
        for f in elems:
            if element_order(f) == 5:
                cent = sum(1 for g in elems if g * f == f * g)
                if cent == 5:
                    return "C5:C4"
                break
    return f"G{n}"
