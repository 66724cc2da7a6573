"""Built-in group catalog and the reference bound table.

The catalog holds the eight benchmark groups used throughout the test suite
and the CLI.  `example_table` recomputes a published table of upper-bound
exponents A(G, d) and orbit-index exponents a(G, d) row by row through the
bound engine, comparing each engine value against the published reference
value and marking every row `match` or `flag`.  Two rows are flagged by
identity because the published entries are known to be irreproducible
(one) and transposed (the other); the notes carry the evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .boundengine import (conjecture_count_registry,
                          conjecture_torsion_registry, default_count_registry,
                          default_torsion_registry, refined_ptbw_bound,
                          special_degree_bound, theorem_bound)
from .errors import PreconditionError
from .groupstruct import (GroupAnalysis, abelian_normal_subgroups,
                          analyses_for, element_order,
                          smallest_prime_divisor)
from .malleinv import (malle_a, malle_a_frobenius_closed_form,
                       malle_a_regular_closed_form)
from .permcore import PermGroup, coset_action, group_closure, named_group

CATALOG_SPECS = (
    ("D5", "dihedral(5)"),
    ("D7", "dihedral(7)"),
    ("A4", "alternating(4)"),
    ("C5:C4", "semidirect(5,4;v=2)"),
    ("C7:C3", "semidirect(7,3;v=2)"),
    ("C2^3:C7", "affine_gf(8)"),
    ("C2^3:(C7:C3)", "affine_gf(8,frob)"),
    ("C3^2:C4", "affine_gf(9,t=4)"),
)


def catalog_names():
    return tuple(name for name, _ in CATALOG_SPECS)


def catalog_descriptor(name: str) -> str:
    for key, desc in CATALOG_SPECS:
        if key == name:
            return desc
    raise PreconditionError(
        f"unknown catalog group {name!r}; known: {list(catalog_names())}")


@lru_cache(maxsize=None)
def catalog_group(name: str) -> PermGroup:
    return named_group(catalog_descriptor(name))


@lru_cache(maxsize=None)
def catalog_analysis(name: str) -> GroupAnalysis:
    """The canonical decomposition 1 -> F -> G -> H -> 1 of a catalog group.

    Every catalog group has exactly one nontrivial proper abelian normal
    subgroup, so the choice of F is forced.
    """
    G = catalog_group(name)
    analyses = analyses_for(G)
    if len(analyses) != 1:
        raise PreconditionError(
            f"catalog group {name} has {len(analyses)} abelian normal "
            f"decompositions; expected exactly one")
    return analyses[0]


def _mult_order(v: int, n: int) -> int:
    k, x = 1, v % n
    while x != 1:
        x = x * v % n
        k += 1
    return k


def primitive_root(ell: int) -> int:
    for v in range(2, ell):
        if _mult_order(v, ell) == ell - 1:
            return v
    raise PreconditionError(f"{ell} has no primitive root (is it prime?)")


@lru_cache(maxsize=None)
def frobenius_full_group(ell: int) -> PermGroup:
    """C_ell x| C_{ell-1} in its natural degree-ell action, ell an odd prime."""
    if ell < 3 or smallest_prime_divisor(ell) != ell:
        raise PreconditionError(f"ell={ell} must be an odd prime")
    return named_group(f"semidirect({ell},{ell - 1};v={primitive_root(ell)})")


# ---------------------------------------------------------------------------
# Degree-6 faithful actions for the two intermediate-degree rows
# ---------------------------------------------------------------------------

def degree6_action(name: str) -> PermGroup:
    """A faithful transitive degree-6 coset action of A4 or C3^2 x| C4."""
    if name == "A4":
        G = catalog_group("A4")
        seed = next(g for g in G.elements if g.cycle_type() == (2, 2))
        U = group_closure((seed,), G.degree)
    elif name == "C3^2:C4":
        G = catalog_group("C3^2:C4")
        t3 = next(g for g in G.elements
                  if element_order(g) == 3 and not g.fixed_points())
        U = None
        for s in G.elements:
            if element_order(s) != 2:
                continue
            cand = group_closure((t3, s), G.degree)
            if len(cand) == 6:
                U = cand
                break
        if U is None:
            raise PreconditionError("no order-6 subgroup found")
    else:
        raise PreconditionError(f"no degree-6 construction for {name!r}")
    act = coset_action(G, U)
    if act.degree != 6 or act.order != G.order:
        raise PreconditionError(f"degree-6 action of {name} is not faithful")
    return act


# ---------------------------------------------------------------------------
# Reference-table machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    group: str
    conditions: str
    d: int
    reference_A: str         # published value, verbatim
    engine_A: Fraction
    reference_a: str
    engine_a: Fraction
    status: str              # "match" or "flag"
    notes: tuple = ()


KNOWN_DISCREPANCIES = {
    ("C2^3:C7", 8):
        "reference lists A = 0.595, which is not reproducible from the "
        "two-armed bound under any registered exponent; computed routes: "
        "2/3 (generic torsion), 5/8 (cyclic-family torsion), 21/32 (refined)",
    ("C103:C17", 103):
        "reference lists A = 0.0104 and a = 0.09369; the two columns are "
        "transposed (engine: A = 1853/19776 ~ 0.09370, a = 1/96 ~ 0.01042)",
}


def _ell_rows(ell: int):
    """The two parametric rows for C_ell x| C_{ell-1}, instantiated at ell."""
    G = frobenius_full_group(ell)
    analysis = analyses_for(G)[0]
    D, a1 = default_torsion_registry(), default_count_registry()
    cond = f"ell odd prime; ell={ell}"

    ref_A1 = Fraction(1, 2) + Fraction(2, ell - 1)
    ref_a1 = Fraction(2, ell - 1)
    eng_A1 = theorem_bound(analysis, ell, D, a1).value
    eng_a1 = malle_a(G).value
    row1 = TableRow(
        group=f"C{ell}:C{ell - 1}", conditions=cond, d=ell,
        reference_A=f"1/2+2/(ell-1) = {ref_A1}", engine_A=eng_A1,
        reference_a=f"2/(ell-1) = {ref_a1}", engine_a=eng_a1,
        status="match" if (eng_A1 == ref_A1 and eng_a1 == ref_a1) else "flag")

    d2 = ell * ell - ell
    ref_A2 = Fraction(1, 2 * ell) + Fraction(2, ell * (ell - 1))
    ref_a2 = Fraction(2, ell * (ell - 1))
    eng_A2 = theorem_bound(analysis, d2, D, a1).value
    eng_a2 = malle_a_regular_closed_form(G.order, 2)
    row2 = TableRow(
        group=f"C{ell}:C{ell - 1}", conditions=cond, d=d2,
        reference_A=f"1/(2 ell)+2/(ell(ell-1)) = {ref_A2}", engine_A=eng_A2,
        reference_a=f"2/(ell(ell-1)) = {ref_a2}", engine_a=eng_a2,
        status="match" if (eng_A2 == ref_A2 and eng_a2 == ref_a2) else "flag")
    return row1, row2


def example_table(ells=(3, 5, 7, 11)) -> tuple:
    """Recompute the published A/a table; exact rationals throughout."""
    D, a1 = default_torsion_registry(), default_count_registry()
    Dfam = default_torsion_registry().with_cyclic_family()
    Dc, a1c = conjecture_torsion_registry(), conjecture_count_registry()
    rows = []

    first, second = [], []
    for ell in ells:
        r1, r2 = _ell_rows(ell)
        first.append(r1)
        second.append(r2)
    rows.extend(first)
    rows.extend(second)

    # A4 at its natural degree.
    a4 = catalog_analysis("A4")
    engine_A = theorem_bound(a4, 4, D, a1).value
    engine_a = malle_a(catalog_group("A4")).value
    ok = abs(float(engine_A) - 0.7783) < 1e-3 and engine_a == Fraction(1, 2)
    rows.append(TableRow(
        group="A4", conditions="", d=4,
        reference_A="0.7783", engine_A=engine_A,
        reference_a="1/2", engine_a=engine_a,
        status="match" if ok else "flag",
        notes=(f"reference decimal 0.7783 vs exact {engine_A} = "
               f"{float(engine_A):.5f}; agreement within 1e-3",)))

    # C2^3 x| (C7 x| C3), unconditional and under the torsion conjecture.
    g168 = catalog_analysis("C2^3:(C7:C3)")
    eng = theorem_bound(g168, 168, D, a1).value
    eng_a168 = malle_a_regular_closed_form(168, 2)
    rows.append(TableRow(
        group="C2^3:(C7:C3)", conditions="", d=168,
        reference_A="9/112", engine_A=eng,
        reference_a="1/84", engine_a=eng_a168,
        status="match" if (eng == Fraction(9, 112)
                           and eng_a168 == Fraction(1, 84)) else "flag"))
    engc = theorem_bound(g168, 168, Dc, a1c).value
    rows.append(TableRow(
        group="C2^3:(C7:C3)", conditions="l-torsion conjecture", d=168,
        reference_A="1/84", engine_A=engc,
        reference_a="1/84", engine_a=eng_a168,
        status="match" if (engc == Fraction(1, 84)
                           and eng_a168 == Fraction(1, 84)) else "flag",
        notes=("assumes the l-torsion conjecture for class groups",)))

    # C2^3 x| C7 at kernel degree 8: flagged by identity (irreproducible).
    g56 = catalog_analysis("C2^3:C7")
    eng56 = theorem_bound(g56, 8, Dfam, a1).value
    eng56_default = theorem_bound(g56, 8, D, a1).value
    eng56_refined = refined_ptbw_bound(8, 7, 2, 7).value
    eng56_a = malle_a(catalog_group("C2^3:C7")).value
    rows.append(TableRow(
        group="C2^3:C7", conditions="k=Q", d=8,
        reference_A="0.595", engine_A=eng56,
        reference_a="1/4", engine_a=eng56_a,
        status="flag",
        notes=(KNOWN_DISCREPANCIES[("C2^3:C7", 8)],
               f"engine values: generic {eng56_default}, cyclic-family "
               f"{eng56}, refined {eng56_refined}")))

    # C103 x| C17 at kernel degree 103: flagged by identity (transposed).
    eng103 = refined_ptbw_bound(103, 17, 103, 17).value
    eng103_a = malle_a_frobenius_closed_form(103, 17, 103, 17)
    rows.append(TableRow(
        group="C103:C17", conditions="k=Q", d=103,
        reference_A="0.0104", engine_A=eng103,
        reference_a="0.09369", engine_a=eng103_a,
        status="flag",
        notes=(KNOWN_DISCREPANCIES[("C103:C17", 103)],
               f"cross-check: engine A {float(eng103):.5f} matches the "
               f"reference a column, engine a {float(eng103_a):.5f} matches "
               f"the reference A column")))

    # Intermediate degree 6.
    for name, case in (("C3^2:C4", "C3sq_C4_deg6"), ("A4", "A4_deg6")):
        engA = special_degree_bound(case).value
        enga = malle_a(degree6_action(name)).value
        rows.append(TableRow(
            group=name, conditions="", d=6,
            reference_A="1/2", engine_A=engA,
            reference_a="1/2", engine_a=enga,
            status="match" if (engA == Fraction(1, 2)
                               and enga == Fraction(1, 2)) else "flag",
            notes=("intermediate-degree bound: census term X^{1/2} "
                   "dominates with the quadratic-step R forced to 2",)))
    return tuple(rows)


# ---------------------------------------------------------------------------
# Dihedral regular-degree comparison (open claim; both values computed)
# ---------------------------------------------------------------------------

def dl_regular_comparison(ell: int) -> dict:
    """Engine vs claimed exponent for D_ell at regular degree 2*ell.

    The engine (cyclic-family torsion) yields 3/(2 ell) - 1/(2 ell^2); the
    published claim is 3/(2 ell) - 3/(2 ell^2).  Both are reported; neither
    is preferred.
    """
    if ell < 3 or smallest_prime_divisor(ell) != ell:
        raise PreconditionError(f"ell={ell} must be an odd prime")
    G = named_group(f"dihedral({ell})")
    analysis = analyses_for(G)[0]
    res = theorem_bound(analysis, 2 * ell,
                        default_torsion_registry().with_cyclic_family(),
                        default_count_registry())
    claimed = Fraction(3, 2 * ell) - Fraction(3, 2 * ell * ell)
    return {
        "ell": ell,
        "engine": res.value,
        "claimed": claimed,
        "result": res,
        "note": (f"engine gives {res.value} = 3/(2*{ell}) - 1/(2*{ell}^2); "
                 f"published claim is {claimed} = 3/(2*{ell}) - 3/(2*{ell}^2);"
                 f" the two differ by {res.value - claimed} and neither is "
                 f"silently preferred"),
    }


def known_discrepancy_note(group_label: str, d: int):
    """Note text if (group, degree) is a known-irreproducible table row."""
    return KNOWN_DISCREPANCIES.get((group_label, d))
