"""Command-line front door.

Parses group descriptors and run configuration, orchestrates the other
modules, and emits human-readable tables alongside machine-readable CSV and
JSON.  Every emitted artifact starts with a header block carrying the tool
version, a hash of the resolved configuration, and the run seed, so any
output can be reproduced from its own header.  Subcommands:

  invariants     orbit-index exponents a(G, d) by direct enumeration
  analyze        structural analysis: Frobenius data and decompositions
  bound          upper-bound exponent A(G, d) with a replayable trace
  table          the built-in reference table plus the dihedral appendix
  census         exact field catalogs with completeness certificates
  slopes         log-log slope fit of a catalog against reference exponents
  towers         Galois-closure towers of non-Galois cubic fields
  class-torsion  class-group torsion over imaginary quadratic fields
  limitations    intermediate-degree bounds settled by census-term dominance

Exit codes: 0 success, 2 invariant violation (including bad preconditions),
3 capacity or budget exhaustion, 4 parse failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .boundengine import (conjecture_count_registry,
                          conjecture_torsion_registry, default_count_registry,
                          default_torsion_registry, limitation_analysis,
                          load_registries, refined_ptbw_bound, replay_trace,
                          special_degree_bound, theorem_bound)
from .catalog import (dl_regular_comparison, example_table,
                      known_discrepancy_note)
from .census import (default_checkpoints, build_s3_towers, catalog_csv_text,
                     count_series, enumerate_c3_conductors, enumerate_fields,
                     read_catalog, scan_resumable, write_catalog)
from .errors import (CapacityError, DescriptorParseError,
                     InvariantViolationError, MalleLabError,
                     PreconditionError)
from .groupstruct import analyses_for, frobenius_classify, structural_label
from .malleinv import malle_a
from .permcore import named_group
from .quadclass import empirical_torsion_exponent, torsion_scan

DEFAULT_SEED = 2024

_SPECIAL_CASE_NAMES = ("A4_deg6", "C2cube_C7_deg14", "C3sq_C2_deg6",
                       "C3sq_C4_deg6", "D6_deg6")


# ---------------------------------------------------------------------------
# Run configuration: resolved options, stable hash, output headers
# ---------------------------------------------------------------------------

class RunConfig:
    """Fully resolved options of one invocation plus their stable hash."""

    def __init__(self, command: str, seed: int, options: dict):
        self.command = command
        self.seed = seed
        self.options = {k: v for k, v in sorted(options.items())
                        if k not in ("command", "config") and v is not None}
        payload = {"command": command, "seed": seed, **self.options}
        blob = json.dumps(payload, sort_keys=True, default=str)
        self.config_hash = hashlib.sha256(blob.encode()).hexdigest()[:16]

    def header_lines(self) -> list:
        return [f"# malle-lab {__version__}",
                f"# config: {self.config_hash}",
                f"# seed: {self.seed}"]

    def json_fields(self) -> dict:
        return {"tool_version": __version__,
                "config_hash": self.config_hash,
                "seed": self.seed}

    def file_metadata(self) -> dict:
        return {"tool": f"malle-lab {__version__}",
                "config": self.config_hash,
                "seed": self.seed}


def _deliver(cfg: RunConfig, body: str, out: str | None) -> None:
    """Emit a text artifact, header block first, to stdout or a file."""
    text = "\n".join(cfg.header_lines()) + "\n" + body
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


def _deliver_json(cfg: RunConfig, payload: dict, out: str | None) -> None:
    doc = {**cfg.json_fields(), **payload}
    text = json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n"
    if out:
        Path(out).write_text(text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


def _frac(q) -> str:
    return f"{q} ({float(q):.5f})"


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def _cmd_invariants(cfg: RunConfig, ns) -> int:
    groups = []
    for text in ns.descriptors:
        G = named_group(text)
        res = malle_a(G)
        groups.append((text, G, res))
    if ns.json:
        payload = {"groups": [{
            "descriptor": G.descriptor or text,
            "degree": res.d,
            "order": G.order,
            "ind": res.ind,
            "a": str(res.value),
            "a_float": float(res.value),
            "witness": res.witness.cycle_string(),
        } for text, G, res in groups]}
        _deliver_json(cfg, payload, ns.out)
        return 0
    lines = []
    for text, G, res in groups:
        lines.append(f"group {G.descriptor or text}: order {G.order}, "
                     f"degree {res.d}")
        lines.append(f"  min index ind(G) = {res.ind}, "
                     f"witness {res.witness.cycle_string()}")
        lines.append(f"  a(G, {res.d}) = {_frac(res.value)}")
    _deliver(cfg, "\n".join(lines), ns.out)
    return 0


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def _analysis_dict(an) -> dict:
    return {
        "m": an.m, "t": an.t, "p": an.p, "p1": an.p1,
        "kernel": structural_label(an.kernel),
        "quotient": structural_label(an.quotient.elements),
        "in_F1": an.in_F1, "in_F": an.in_F,
    }


def _cmd_analyze(cfg: RunConfig, ns) -> int:
    reports = []
    for text in ns.descriptors:
        G = named_group(text)
        fr = frobenius_classify(G)
        analyses = analyses_for(G)
        reports.append((text, G, fr, analyses))
    if ns.json:
        payload = {"groups": [{
            "descriptor": G.descriptor or text,
            "order": G.order,
            "degree": G.degree,
            "label": structural_label(G.elements),
            "frobenius": None if fr is None else {
                "kernel_order": len(fr.kernel),
                "complement_order": len(fr.complement),
                "kernel_is_abelian": fr.kernel_is_abelian,
            },
            "decompositions": [_analysis_dict(an) for an in analyses],
        } for text, G, fr, analyses in reports]}
        _deliver_json(cfg, payload, ns.out)
        return 0
    lines = []
    for text, G, fr, analyses in reports:
        lines.append(f"group {G.descriptor or text}: order {G.order}, "
                     f"degree {G.degree}, label "
                     f"{structural_label(G.elements)}")
        if fr is None:
            lines.append("  Frobenius: no (this action has no Frobenius "
                         "kernel/complement split)")
        else:
            kind = "abelian" if fr.kernel_is_abelian else "non-abelian"
            lines.append(f"  Frobenius: yes — kernel order {len(fr.kernel)} "
                         f"({kind}), complement order {len(fr.complement)}")
        if not analyses:
            lines.append("  no nontrivial proper abelian normal subgroup "
                         "(outside class F1)")
        for an in analyses:
            d = _analysis_dict(an)
            lines.append(
                f"  decomposition m={d['m']} t={d['t']}: kernel "
                f"{d['kernel']}, quotient {d['quotient']}, p={d['p']}, "
                f"p1={d['p1']}, in_F1={'yes' if d['in_F1'] else 'no'}, "
                f"in_F={'yes' if d['in_F'] else 'no'}")
    _deliver(cfg, "\n".join(lines), ns.out)
    return 0


# ---------------------------------------------------------------------------
# bound
# ---------------------------------------------------------------------------

def _registries(ns):
    if ns.assume_l_torsion:
        D, a1 = conjecture_torsion_registry(), conjecture_count_registry()
    else:
        D, a1 = default_torsion_registry(), default_count_registry()
    if ns.cyclic_family:
        D = D.with_cyclic_family()
    if ns.registry:
        D, a1 = load_registries(ns.registry, D, a1)
    return D, a1


def _compact_label(label: str) -> str:
    """C2xC2xC2 -> C2^3; composite quotients get parentheses when joined."""
    parts = label.split("x")
    if len(parts) > 1 and all(p == parts[0] for p in parts):
        return f"{parts[0]}^{len(parts)}"
    return label


def _decomposition_label(an) -> str:
    kernel = _compact_label(structural_label(an.kernel))
    quotient = structural_label(an.quotient.elements)
    if ":" in quotient:
        quotient = f"({quotient})"
    return f"{kernel}:{quotient}"


def _degrees_for(analysis, selector):
    """Degrees of `analysis` matched by 'kernel' | 'regular' | integer."""
    m, t = analysis.m, analysis.t
    if selector == "kernel":
        return [m]
    if selector == "regular":
        return [m * t]
    d = int(selector)
    return [d] if d in (m, m * t) else []


def _cmd_bound(cfg: RunConfig, ns) -> int:
    G = named_group(ns.descriptor)
    D, a1 = _registries(ns)
    analyses = analyses_for(G)
    if not analyses:
        raise PreconditionError(
            f"{ns.descriptor} has no nontrivial proper abelian normal "
            "subgroup; the two-armed bound does not apply")
    results = []
    errors = []
    for an in analyses:
        for d in _degrees_for(an, ns.degree):
            try:
                res = theorem_bound(an, d, D, a1, base=ns.base)
            except MalleLabError as exc:
                errors.append((an, d, exc))
                continue
            if not replay_trace(res):
                raise InvariantViolationError(
                    "trace replay failed: recorded max-steps do not "
                    "reproduce the bound value")
            results.append((an, d, res))
    if not results:
        if errors:
            raise errors[0][2]
        raise PreconditionError(
            f"degree selector {ns.degree!r} matches no decomposition of "
            f"{ns.descriptor}; use 'kernel', 'regular', or one of the "
            f"admissible degrees")
    results.sort(key=lambda item: item[2].value)
    an, d, best = results[0]

    refined = None
    if ns.refined:
        refined = refined_ptbw_bound(an.m, an.t, an.p, an.p1)

    label = structural_label(G.elements)
    deco_label = _decomposition_label(an)
    if label == f"G{G.order}":
        label = deco_label
    note = (known_discrepancy_note(label, d)
            or known_discrepancy_note(deco_label, d))

    if ns.json:
        payload = {
            "descriptor": G.descriptor or ns.descriptor,
            "label": label,
            "d": d,
            "m": an.m, "t": an.t,
            "value": str(best.value),
            "value_float": float(best.value),
            "epsilon": best.epsilon,
            "branch": best.branch,
            "trace": [step.render() for step in best.trace],
            "notes": list(best.notes),
            "known_discrepancy": note,
            "alternatives": [
                {"d": dd, "value": str(r.value)} for _, dd, r in results[1:]],
        }
        if refined is not None:
            payload["refined"] = {
                "value": str(refined.value),
                "value_float": float(refined.value),
                "trace": [step.render() for step in refined.trace],
                "notes": list(refined.notes),
            }
        _deliver_json(cfg, payload, ns.out)
        return 0

    lines = [f"bound for {G.descriptor or ns.descriptor} "
             f"(label {label}) at d = {d}"]
    lines.append(f"decomposition: m = {an.m}, t = {an.t}, p = {an.p}, "
                 f"p1 = {an.p1}")
    lines.append("trace:")
    lines.extend(f"  {step.render()}" for step in best.trace)
    lines.append(f"A({label}, {d}) <= {best.value} + eps "
                 f"({float(best.value):.5f})  [branch: {best.branch}]")
    for extra_note in best.notes:
        lines.append(f"note: {extra_note}")
    for _, dd, r in results[1:]:
        lines.append(f"alternative decomposition at d = {dd}: {r.value}")
    if refined is not None:
        lines.append("refined cyclic-prime bound:")
        lines.extend(f"  {step.render()}" for step in refined.trace)
        lines.append(f"refined value: {_frac(refined.value)}")
        for extra_note in refined.notes:
            lines.append(f"note: {extra_note}")
    if note:
        lines.append(f"known discrepancy: {note}")
    _deliver(cfg, "\n".join(lines), ns.out)
    return 0


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------

def _cmd_table(cfg: RunConfig, ns) -> int:
    ells = tuple(int(x) for x in ns.ells.split(","))
    rows = example_table(ells)
    appendix = [dl_regular_comparison(ell)
                for ell in tuple(int(x) for x in ns.dl_ells.split(","))]
    if ns.json:
        payload = {
            "rows": [{
                "group": r.group, "conditions": r.conditions, "d": r.d,
                "reference_A": r.reference_A, "engine_A": str(r.engine_A),
                "reference_a": r.reference_a, "engine_a": str(r.engine_a),
                "status": r.status, "notes": list(r.notes),
            } for r in rows],
            "dihedral_regular_appendix": [{
                "ell": c["ell"], "engine": str(c["engine"]),
                "claimed": str(c["claimed"]), "note": c["note"],
            } for c in appendix],
        }
        _deliver_json(cfg, payload, ns.out)
        return 0
    headers = ("group", "cond", "d", "reference A", "engine A",
               "reference a", "engine a", "status")
    cells = [(r.group, r.conditions, str(r.d), r.reference_A,
              _frac(r.engine_A), r.reference_a, _frac(r.engine_a), r.status)
             for r in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells))
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for r, c in zip(rows, cells):
        lines.append("  ".join(v.ljust(w)
                               for v, w in zip(c, widths)).rstrip())
        for extra_note in r.notes:
            lines.append(f"    note: {extra_note}")
    flagged = sum(1 for r in rows if r.status == "flag")
    lines.append(f"{len(rows)} rows, {len(rows) - flagged} match, "
                 f"{flagged} flagged")
    lines.append("")
    lines.append("appendix: dihedral groups at the regular degree 2*ell")
    for c in appendix:
        lines.append(f"  ell={c['ell']}: engine {_frac(c['engine'])}, "
                     f"claimed {_frac(c['claimed'])}")
        lines.append(f"    {c['note']}")
    _deliver(cfg, "\n".join(lines), ns.out)
    return 0


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------

def _parse_labels(text: str | None):
    if not text:
        return None
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _parse_checkpoints(text: str | None, max_abs_disc: int):
    if text is None:
        return None
    if text == "auto":
        return default_checkpoints(max_abs_disc)
    return tuple(int(part) for part in text.split(","))


def _checkpoint_path(ns) -> Path:
    if ns.out:
        return Path(str(ns.out) + ".checkpoint.json")
    return Path(f"census-deg{ns.degree}-{ns.max_disc}.checkpoint.json")


def _cmd_census(cfg: RunConfig, ns) -> int:
    labels = _parse_labels(ns.labels)
    method = ns.method
    if method == "auto":
        method = ("conductor"
                  if ns.degree == 3 and labels == ("C3",) else "box")
    if method == "conductor":
        if ns.degree != 3 or (labels is not None and labels != ("C3",)):
            raise PreconditionError(
                "the conductor method enumerates cyclic cubics only; use "
                "--degree 3 --labels C3")
        catalog = enumerate_c3_conductors(ns.max_disc)
    elif ns.resume:
        checkpoint = json.loads(Path(ns.resume).read_text())
        state = checkpoint.get("state", checkpoint)
        try:
            if "row_cursor" in state:
                catalog = scan_resumable(ns.degree, ns.max_disc, labels,
                                         checkpoint=state)
            else:
                catalog = enumerate_fields(ns.degree, ns.max_disc, labels,
                                           budget=ns.budget, resume=state)
        except CapacityError as exc:
            return _write_checkpoint(cfg, ns, exc)
    elif ns.budget is not None:
        try:
            catalog = enumerate_fields(ns.degree, ns.max_disc, labels,
                                       budget=ns.budget)
        except CapacityError as exc:
            return _write_checkpoint(cfg, ns, exc)
    elif ns.workers > 1:
        catalog = enumerate_fields(ns.degree, ns.max_disc, labels,
                                   workers=ns.workers)
    else:
        try:
            catalog = scan_resumable(ns.degree, ns.max_disc, labels)
        except CapacityError as exc:
            return _write_checkpoint(cfg, ns, exc)

    metadata = cfg.file_metadata()
    metadata["method"] = catalog.method
    checkpoints = _parse_checkpoints(ns.checkpoints, ns.max_disc)
    count_rows = ()
    if checkpoints:
        count_rows = tuple(zip(checkpoints, catalog.counts(checkpoints)))
        metadata["counts"] = ",".join(f"{x}:{c}" for x, c in count_rows)

    if ns.out:
        write_catalog(catalog, ns.out, metadata)
        lines = cfg.header_lines()
        lines.append(f"census: degree {catalog.degree}, labels "
                     f"{','.join(catalog.labels) or 'all'}, |disc| <= "
                     f"{catalog.max_abs_disc}, method {catalog.method}")
        lines.append(f"fields: {len(catalog.records)}")
        for x, c in count_rows:
            lines.append(f"  count at X={x}: {c}")
        lines.append(f"wrote {ns.out} (+ {ns.out}.json sidecar)")
        print("\n".join(lines))
    else:
        sys.stdout.write(catalog_csv_text(catalog, metadata))
    return 0


def _write_checkpoint(cfg: RunConfig, ns, exc: CapacityError) -> int:
    path = _checkpoint_path(ns)
    doc = {**cfg.json_fields(), "state": exc.checkpoint}
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    print(f"capacity: {exc}", file=sys.stderr)
    print(f"checkpoint written to {path}; resume with --resume {path}",
          file=sys.stderr)
    return 3


# ---------------------------------------------------------------------------
# slopes
# ---------------------------------------------------------------------------

def _cmd_slopes(cfg: RunConfig, ns) -> int:
    catalog = read_catalog(ns.catalog)
    checkpoints = _parse_checkpoints(ns.checkpoints,
                                     catalog.max_abs_disc)
    fit = count_series(catalog, checkpoints, group=ns.group)
    if ns.json:
        payload = {
            "catalog": str(ns.catalog),
            "degree": catalog.degree,
            "labels": list(catalog.labels),
            "max_abs_disc": catalog.max_abs_disc,
            "records": len(catalog.records),
            "checkpoints": [[x, c] for x, c in fit.checkpoints],
            "window": [[x, c] for x, c in fit.window],
            "slope": fit.slope,
            "group": fit.group_descriptor,
            "reference_a": None if fit.reference_a is None
            else str(fit.reference_a),
            "reference_A": None if fit.reference_A is None
            else str(fit.reference_A),
        }
        _deliver_json(cfg, payload, ns.out)
        return 0
    lines = [f"slope fit: {ns.catalog}"]
    lines.append(f"degree {catalog.degree}, labels "
                 f"{','.join(catalog.labels) or 'all'}, |disc| <= "
                 f"{catalog.max_abs_disc}, {len(catalog.records)} fields, "
                 f"method {catalog.method}")
    lines.append("checkpoints (X, count):")
    window = set(fit.window)
    for x, c in fit.checkpoints:
        mark = "  *" if (x, c) in window else ""
        lines.append(f"  {x} {c}{mark}")
    lines.append("(* = top-decade fit window)")
    lines.append(f"slope = {fit.slope:.4f}")
    if fit.group_descriptor:
        lines.append(f"reference group: {fit.group_descriptor}")
    if fit.reference_a is not None:
        lines.append(f"reference a = {_frac(fit.reference_a)}; "
                     f"slope - a = {fit.slope - float(fit.reference_a):+.4f}")
    if fit.reference_A is not None:
        lines.append(f"reference A = {_frac(fit.reference_A)}")
    _deliver(cfg, "\n".join(lines), ns.out)
    return 0


# ---------------------------------------------------------------------------
# towers
# ---------------------------------------------------------------------------

def _cmd_towers(cfg: RunConfig, ns) -> int:
    if ns.catalog:
        catalog = read_catalog(ns.catalog)
    else:
        catalog = enumerate_fields(3, ns.max_disc, ("S3",))
    towers = build_s3_towers(catalog, limit=ns.limit)
    if ns.json:
        payload = {"towers": [{
            "cubic": str(tw.cubic.defining_poly),
            "d_K": tw.cubic.field_disc,
            "d_M": tw.quadratic.field_disc,
            "d_N": tw.sextic.field_disc,
            "relative_norm": tw.relative_norm,
        } for tw in towers]}
        _deliver_json(cfg, payload, ns.out)
        return 0
    if ns.out:
        buf = io.StringIO()
        for line in cfg.header_lines():
            buf.write(line + "\n")
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(("cubic_poly", "d_K", "d_M", "d_N", "relative_norm"))
        for tw in towers:
            writer.writerow((str(tw.cubic.defining_poly),
                             tw.cubic.field_disc, tw.quadratic.field_disc,
                             tw.sextic.field_disc, tw.relative_norm))
        Path(ns.out).write_text(buf.getvalue())
        print(f"wrote {ns.out} ({len(towers)} towers)")
        return 0
    lines = [f"towers: {len(towers)} non-Galois cubic fields "
             f"(catalog |disc| <= {catalog.max_abs_disc})"]
    for tw in towers:
        lines.append(f"  {tw.cubic.defining_poly}: d_K="
                     f"{tw.cubic.field_disc} d_M={tw.quadratic.field_disc} "
                     f"d_N={tw.sextic.field_disc} "
                     f"norm(d_N/M)={tw.relative_norm}")
    lines.append(f"all {len(towers)} towers satisfy |d_N| = |d_M|^3 * norm "
                 "and |d_K|^2 = |d_M|^2 * norm exactly")
    _deliver(cfg, "\n".join(lines), ns.out)
    return 0


# ---------------------------------------------------------------------------
# class-torsion
# ---------------------------------------------------------------------------

def _cmd_class_torsion(cfg: RunConfig, ns) -> int:
    rows = list(torsion_scan(ns.m, ns.max_disc))
    ratio, at = empirical_torsion_exponent(ns.m, ns.max_disc)
    buf = io.StringIO()
    for line in cfg.header_lines():
        buf.write(line + "\n")
    buf.write(f"# m={ns.m} torsion over imaginary fundamental "
              f"discriminants |D| <= {ns.max_disc}\n")
    if at is None:
        buf.write("# max ratio: 0 (all torsion trivial in range)\n")
    else:
        buf.write(f"# max ratio log|Cl[m]|/log|D| = {float(ratio):.6f} "
                  f"at D = {at}\n")
    buf.write("# reference exponents: generic 1/2")
    if ns.m == 2:
        buf.write(f"; two-torsion refinement 1/2 - 1/(2m) = "
                  f"{Fraction(1, 2) - Fraction(1, 2 * ns.m)}")
    buf.write("; epsilon under the l-torsion conjecture\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(("D", "h", "invariant_factors", "torsion_m", "ratio"))
    for D, h, invariants, t, r in rows:
        inv = ",".join(str(d) for d in invariants) if invariants else "1"
        writer.writerow((D, h, inv, t, f"{r:.6f}"))
    if ns.out:
        Path(ns.out).write_text(buf.getvalue())
        print(f"wrote {ns.out} ({len(rows)} rows)")
    else:
        sys.stdout.write(buf.getvalue())
    return 0


# ---------------------------------------------------------------------------
# limitations
# ---------------------------------------------------------------------------

def _cmd_limitations(cfg: RunConfig, ns) -> int:
    explicit = [v is not None for v in (ns.ah, ns.torsion, ns.rel_degree,
                                        ns.r_value)]
    if any(explicit):
        if not all(explicit):
            raise PreconditionError(
                "explicit mode needs all of --aH, --torsion, --rel-degree, "
                "--R")
        check = limitation_analysis(Fraction(ns.ah), Fraction(ns.torsion),
                                    ns.rel_degree, ns.r_value)
        if ns.json:
            _deliver_json(cfg, {
                "aH": ns.ah, "torsion": ns.torsion,
                "rel_degree": ns.rel_degree, "R": ns.r_value,
                "holds": check["holds"], "exponent": str(check["exponent"]),
            }, ns.out)
            return 0
        state = ("census term X^(1/R) dominates" if check["holds"]
                 else "tower term dominates")
        _deliver(cfg, f"aH={ns.ah} torsion={ns.torsion} "
                 f"rel_degree={ns.rel_degree} R={ns.r_value}\n"
                 f"{state}; count exponent {_frac(check['exponent'])}",
                 ns.out)
        return 0
    cases = [ns.case] if ns.case else list(_SPECIAL_CASE_NAMES)
    results = [(case, special_degree_bound(case)) for case in cases]
    if ns.json:
        payload = {"cases": [{
            "case": case,
            "value": str(res.value),
            "branch": res.branch,
            "trace": [step.render() for step in res.trace],
        } for case, res in results]}
        _deliver_json(cfg, payload, ns.out)
        return 0
    lines = []
    for case, res in results:
        lines.append(f"case {case}: {res.branch}")
        lines.extend(f"  {step.render()}" for step in res.trace)
        lines.append(f"  bound: {_frac(res.value)} + eps")
    _deliver(cfg, "\n".join(lines), ns.out)
    return 0


# ---------------------------------------------------------------------------
# Parser, config file, dispatch
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """argparse with the package's exit-code convention for usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(4)


def build_parser() -> _Parser:
    parser = _Parser(prog="malle-lab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version",
                        version=f"malle-lab {__version__}")
    parser.add_argument("--config", metavar="FILE",
                        help="JSON config file; command-line flags override "
                             "its values")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"run seed recorded in every output header "
                             f"(default {DEFAULT_SEED}); all current "
                             "pipelines are deterministic, so outputs are "
                             "seed-invariant")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("invariants",
                       help="orbit-index exponent a(G, d) by enumeration")
    p.add_argument("descriptors", nargs="+", metavar="DESCRIPTOR")
    p.add_argument("--json", action="store_true", default=None)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(handler=_cmd_invariants)

    p = sub.add_parser("analyze",
                       help="Frobenius classification and decompositions")
    p.add_argument("descriptors", nargs="+", metavar="DESCRIPTOR")
    p.add_argument("--json", action="store_true", default=None)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("bound",
                       help="upper-bound exponent A(G, d) with trace")
    p.add_argument("descriptor", metavar="DESCRIPTOR")
    p.add_argument("--degree", default="kernel",
                   help="'kernel' (d = m), 'regular' (d = m*t), or an "
                        "explicit degree (default kernel)")
    p.add_argument("--base", default="Q", choices=("Q", "any"),
                   help="base field class for registry lookups")
    p.add_argument("--registry", metavar="FILE",
                   help="extra registry entries (text format; see README)")
    p.add_argument("--assume-l-torsion", action="store_true", default=None,
                   help="use the l-torsion-conjecture registries")
    p.add_argument("--cyclic-family", action="store_true", default=None,
                   help="enable the cyclic-base torsion family rule")
    p.add_argument("--refined", action="store_true", default=None,
                   help="also run the refined cyclic-prime bound")
    p.add_argument("--json", action="store_true", default=None)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(handler=_cmd_bound)

    p = sub.add_parser("table",
                       help="reference A/a table plus dihedral appendix")
    p.add_argument("--ells", default="3,5,7,11",
                   help="primes for the parametric rows (default 3,5,7,11)")
    p.add_argument("--dl-ells", default="3,5,7",
                   help="primes for the dihedral appendix (default 3,5,7)")
    p.add_argument("--json", action="store_true", default=None)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(handler=_cmd_table)

    p = sub.add_parser("census",
                       help="exact field catalog with certificate")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--max-disc", type=int, required=True, dest="max_disc")
    p.add_argument("--labels", help="comma-separated Galois labels")
    p.add_argument("--out", metavar="FILE",
                   help="catalog CSV path (sidecar written as FILE.json)")
    p.add_argument("--checkpoints",
                   help="'auto' or comma-separated X values: report counts "
                        "at these bounds")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers over coefficient sub-boxes "
                        "(default 1)")
    p.add_argument("--method", default="auto",
                   choices=("auto", "box", "conductor"),
                   help="box scan or conductor enumeration (C3 only); auto "
                        "picks conductor for --labels C3")
    p.add_argument("--budget", type=int, default=None,
                   help="cap on examined candidates; exceeding it writes a "
                        "checkpoint and exits 3")
    p.add_argument("--resume", metavar="FILE",
                   help="resume from a checkpoint file")
    p.set_defaults(handler=_cmd_census)

    p = sub.add_parser("slopes",
                       help="log-log slope of a catalog's count series")
    p.add_argument("catalog", metavar="CATALOG.csv")
    p.add_argument("--group", metavar="DESCRIPTOR",
                   help="reference group for a/A exponents")
    p.add_argument("--checkpoints",
                   help="'auto' or comma-separated X values")
    p.add_argument("--json", action="store_true", default=None)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(handler=_cmd_slopes)

    p = sub.add_parser("towers",
                       help="Galois-closure towers over non-Galois cubics")
    p.add_argument("--max-disc", type=int, default=None, dest="max_disc",
                   help="build the cubic catalog up to this bound "
                        "(default 500)")
    p.add_argument("--catalog", metavar="FILE",
                   help="use an existing catalog CSV instead of scanning")
    p.add_argument("--limit", type=int, default=None,
                   help="only the first N cubics by |disc|")
    p.add_argument("--json", action="store_true", default=None)
    p.add_argument("--out", metavar="FILE", help="write CSV to this path")
    p.set_defaults(handler=_cmd_towers)

    p = sub.add_parser("class-torsion",
                       help="class-group torsion over imaginary quadratics")
    p.add_argument("--max-disc", type=int, required=True, dest="max_disc")
    p.add_argument("--m", type=int, required=True,
                   help="torsion modulus")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(handler=_cmd_class_torsion)

    p = sub.add_parser("limitations",
                       help="census-term dominance at intermediate degrees")
    p.add_argument("--case", choices=_SPECIAL_CASE_NAMES,
                   help="a single settled case (default: all)")
    p.add_argument("--aH", dest="ah", help="count exponent of the tower step")
    p.add_argument("--torsion", help="torsion exponent D")
    p.add_argument("--rel-degree", type=int, dest="rel_degree")
    p.add_argument("--R", type=int, dest="r_value",
                   help="forced tame-prime power in the census step")
    p.add_argument("--json", action="store_true", default=None)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(handler=_cmd_limitations)
    return parser


def _apply_config_file(ns) -> None:
    """Fill options the command line left unset from the JSON config file.

    Top-level keys apply to every command; a key named after the command
    holds a section that overrides the top level.  Unknown keys are parse
    errors so typos cannot silently change a run.
    """
    if not ns.config:
        return
    try:
        data = json.loads(Path(ns.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DescriptorParseError(f"config file {ns.config}: {exc}") from exc
    if not isinstance(data, dict):
        raise DescriptorParseError(
            f"config file {ns.config} must hold a JSON object")
    flat = {k: v for k, v in data.items() if not isinstance(v, dict)}
    section = data.get(ns.command, {})
    merged = {**flat, **section}
    for key, value in merged.items():
        dest = key.replace("-", "_")
        if not hasattr(ns, dest):
            raise DescriptorParseError(
                f"config file {ns.config}: unknown key {key!r} for "
                f"command {ns.command}")
        if getattr(ns, dest) is None:
            setattr(ns, dest, value)


_FILL_DEFAULTS = {"seed": DEFAULT_SEED, "workers": 1, "max_disc": 500,
                  "json": False, "assume_l_torsion": False,
                  "cyclic_family": False, "refined": False}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        _apply_config_file(ns)
        for key, default in _FILL_DEFAULTS.items():
            if hasattr(ns, key) and getattr(ns, key) is None:
                setattr(ns, key, default)
        for key in ("out", "catalog", "registry", "resume"):
            if getattr(ns, key, None):
                setattr(ns, key, str(Path(getattr(ns, key)).resolve()))
        options = {k: v for k, v in vars(ns).items()
                   if k not in ("handler", "seed") and not callable(v)}
        cfg = RunConfig(ns.command, ns.seed, options)
        return ns.handler(cfg, ns)
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return exc.exit_code
    except DescriptorParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return exc.exit_code
    except MalleLabError as exc:
        kind = type(exc).__name__
        print(f"{kind}: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    raise SystemExit(main())
