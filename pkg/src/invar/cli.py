"""Command-line front end: group-spec files in, analysis reports out.

A group-spec file is a JSON document:

    {
      "name": "f3_order27",
      "field": {"p": 3},                  # optional "ext_modulus": low-first coeffs
      "n": 4,
      "generators": [ [[1,0,0,0], ...], ... ],   # row i = image of x_i
      "sequence": [2, 4],                 # optional declared sequence
      "labels": ["sigma", "tau"]          # optional
    }

Matrix entries are integers or F_p coefficient lists.  Reports come in a
machine (JSON) and a human (text) form carrying identical data; default
reports are byte-deterministic (timing is opt-in via --timing).

Exit codes: 0 success, 2 structural refusal, 3 parse error, 4 internal
assertion failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import hilbert as hmod
from .ffield import FieldSpec, NonPrimeCharacteristic, ReducibleModulus, field_create
from .gaction import (DEFAULT_CLOSURE_CAP, CapExceeded, GroupElement, NotAPGroup,
                      NotInvertible, NotUnipotent, group_closure, pseudo_reflections,
                      triangularize)
from .gbasis import colength, groebner, ideal_equal, is_complete_intersection
from .mpoly import RingSpec, format_poly
from .nakajima import (BadSequence, NakajimaStructure, depth, find_sequence,
                       is_nakajima_classic, verify_structure)


class SpecSyntax(ValueError):
    pass


class BadMatrix(ValueError):
    pass


class BadField(ValueError):
    pass


class GroupSpecFile:
    __slots__ = ("name", "field", "n", "generators", "sequence", "labels")

    def __init__(self, name, field, n, generators, sequence=None, labels=None):
        self.name = name
        self.field = field
        self.n = n
        self.generators = tuple(generators)
        self.sequence = tuple(sequence) if sequence else None
        self.labels = tuple(labels) if labels else None


def parse_spec(path):
    """Load and validate a group-spec file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SpecSyntax(f"cannot read spec file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecSyntax(f"invalid JSON in spec file: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecSyntax("spec document must be a JSON object")

    fblock = doc.get("field")
    if not isinstance(fblock, dict) or "p" not in fblock:
        raise BadField("missing or malformed key 'field' (needs 'p')")
    try:
        field = field_create(int(fblock["p"]), fblock.get("ext_modulus"))
    except (NonPrimeCharacteristic, ReducibleModulus, ValueError) as exc:
        raise BadField(f"key 'field': {exc}") from exc

    n = doc.get("n")
    if not isinstance(n, int) or n < 1:
        raise SpecSyntax("key 'n' must be a positive integer")

    raw_gens = doc.get("generators")
    if not isinstance(raw_gens, list) or not raw_gens:
        raise BadMatrix("key 'generators' must be a non-empty list of matrices")
    generators = []
    for gi, mat in enumerate(raw_gens):
        if not isinstance(mat, list) or len(mat) != n:
            raise BadMatrix(f"generator {gi}: expected {n} rows")
        rows = []
        for ri, row in enumerate(mat):
            if not isinstance(row, list) or len(row) != n:
                raise BadMatrix(f"generator {gi} row {ri}: expected {n} entries")
            try:
                rows.append([field.element(v).code for v in row])
            except (ValueError, TypeError) as exc:
                raise BadMatrix(f"generator {gi} row {ri}: {exc}") from exc
        try:
            generators.append(GroupElement(field, rows))
        except (NotInvertible, ValueError) as exc:
            raise BadMatrix(f"generator {gi}: {exc}") from exc

    sequence = doc.get("sequence")
    if sequence is not None:
        if (not isinstance(sequence, list) or not sequence
                or any(not isinstance(i, int) for i in sequence)):
            raise SpecSyntax("key 'sequence' must be a list of integers")
    labels = doc.get("labels")
    if labels is not None and (not isinstance(labels, list)
                               or len(labels) != len(generators)):
        raise SpecSyntax("key 'labels' must match the number of generators")
    name = doc.get("name") or os.path.splitext(os.path.basename(path))[0]
    return GroupSpecFile(name, field, n, generators, sequence, labels)


class AnalyzeOptions:
    __slots__ = ("method", "sequence", "degree_bound", "verify", "closure_cap", "timing")

    def __init__(self, method="both", sequence=None, degree_bound=None,
                 verify=True, closure_cap=None, timing=False):
        self.method = method
        self.sequence = sequence
        self.degree_bound = degree_bound
        self.verify = verify
        self.closure_cap = closure_cap or _env_cap()
        self.timing = timing


def _env_cap():
    raw = os.environ.get("INVAR_CLOSURE_CAP")
    return int(raw) if raw else DEFAULT_CLOSURE_CAP


class StructuralRefusal(RuntimeError):
    pass


def _field_dict(field):
    return {"p": field.p, "ext_degree": field.k,
            "modulus": list(field.modulus) if field.modulus else None}


def _matrix_rows(field, matrix):
    return [[list(field.from_code(c).coeffs) for c in row] for row in matrix]


def _result_dict(res):
    return {
        "method": res.method,
        "generators": [format_poly(g) for g in res.generators],
        "degrees": list(res.degrees),
        "degree_product": res.degree_product(),
        "saturated_at": res.saturated_at,
        "degree_bound": res.degree_bound,
        "heuristic": res.heuristic,
        "provenance": [dict(p) for p in res.provenance],
        "verification": dict(res.verification),
    }


def analyze(spec, options=None):
    """Full pipeline; returns the machine report as a plain dict."""
    options = options or AnalyzeOptions()
    stamps = {}
    t0 = time.perf_counter()

    def mark(stage):
        stamps[stage] = round(time.perf_counter() - t0, 6)

    try:
        G0 = group_closure(spec.generators, cap=options.closure_cap)
    except (CapExceeded, NotAPGroup) as exc:
        raise StructuralRefusal(f"closure: {exc}") from exc
    mark("closure")

    already = all(g.is_lower_unitriangular() for g in spec.generators)
    try:
        change, tri_gens = triangularize(list(spec.generators))
    except NotUnipotent as exc:
        raise StructuralRefusal(f"triangularize: {exc}") from exc
    G = group_closure(tri_gens, cap=options.closure_cap)
    mark("triangularize")

    refl = pseudo_reflections(G)
    classic = is_nakajima_classic(G)
    mark("classify")

    if options.sequence:
        structure = verify_structure(G, options.sequence)
        source = "declared"
    elif spec.sequence:
        structure = verify_structure(G, spec.sequence)
        source = "declared"
    else:
        structure = find_sequence(G)
        source = "search"
    found = isinstance(structure, NakajimaStructure)
    mark("structure")

    report = {
        "tool": "invar",
        "spec_name": spec.name,
        "options": {
            "method": options.method,
            "sequence": list(options.sequence) if options.sequence else None,
            "degree_bound": options.degree_bound,
            "verify": options.verify,
        },
        "field": _field_dict(spec.field),
        "n": spec.n,
        "group": {
            "order": G.order,
            "num_generators": len(spec.generators),
            "generator_labels": list(spec.labels) if spec.labels else None,
        },
        "triangularization": {
            "already_triangular": already,
            "basis_change": _matrix_rows(spec.field, change),
            "generator_depths": [depth(g) for g in G.gens],
        },
        "pseudo_reflections": {
            "reflection_count": len(refl.reflection_indices),
            "generated_by_reflections": refl.generated_by_reflections,
        },
        "nakajima_classic": classic,
    }
    if found:
        summary = structure.summary()
        summary["found"] = True
        summary["source"] = source
        report["generalised_nakajima"] = summary
    else:
        reason = (structure.reason if structure is not None
                  else "every candidate sequence refuted in this basis")
        seq_tried = (list(structure.sequence) if structure is not None else None)
        report["generalised_nakajima"] = {
            "found": False, "reason": reason, "sequence": seq_tried, "source": source,
        }

    hil = {}
    brute = constructive = None
    if options.method in ("both", "bruteforce"):
        brute = hmod.hilbert_ideal_bruteforce(G, degree_bound=options.degree_bound)
        hil["bruteforce"] = _result_dict(brute)
        mark("bruteforce")
    else:
        hil["bruteforce"] = {"skipped": "method=" + options.method}
    if options.method in ("both", "constructive"):
        if found:
            constructive = hmod.ci_generators(G, structure, verify=options.verify)
            hil["constructive"] = _result_dict(constructive)
            mark("constructive")
        else:
            msg = "no generalised Nakajima structure in this basis"
            hil["constructive"] = {"skipped": msg}
            if options.method == "constructive":
                report["hilbert"] = hil
                raise StructuralRefusal(msg)
    else:
        hil["constructive"] = {"skipped": "method=" + options.method}
    report["hilbert"] = hil

    if brute is not None and constructive is not None:
        report["cross_check"] = {
            "ideal_equal": ideal_equal(list(brute.generators),
                                       list(constructive.generators))
        }
        mark("cross_check")
    else:
        report["cross_check"] = {"skipped": "needs both methods"}

    primary = brute if brute is not None else constructive
    if primary is not None:
        gens = list(primary.generators)
        ci = is_complete_intersection(gens)
        gb = groebner(gens)
        col = colength(gb)
        report["complete_intersection"] = ci
        report["degrees"] = sorted(primary.degrees)
        report["colength"] = col if col != float("inf") else "infinite"
        poly = hmod.polynomiality_report(G, primary)
        report["polynomiality"] = poly.as_dict()
        mark("verdicts")
    else:
        report["complete_intersection"] = None
        report["degrees"] = None
        report["colength"] = None
        report["polynomiality"] = {"verdict": "undetermined",
                                   "reason": "no ideal computed"}

    if options.timing:
        report["timing"] = stamps
    return report


# -- rendering ---------------------------------------------------------------------

def render_text(report, indent=0):
    """Human-readable form carrying exactly the machine report's data."""
    lines = []

    def walk(key, value, pad):
        prefix = " " * pad + (f"{key}: " if key is not None else "")
        if isinstance(value, dict):
            if key is not None:
                lines.append(" " * pad + f"{key}:")
            for k, v in value.items():
                walk(k, v, pad + 2)
        elif isinstance(value, list):
            if all(not isinstance(v, (dict, list)) for v in value):
                lines.append(prefix + "[" + ", ".join(str(v) for v in value) + "]")
            elif all(isinstance(v, list)
                     and all(not isinstance(w, (dict, list)) for w in v)
                     for v in value):
                lines.append(prefix + "[" + ", ".join(str(v) for v in value) + "]")
            else:
                lines.append(" " * pad + f"{key}:")
                for i, v in enumerate(value):
                    walk(f"[{i}]", v, pad + 2)
        else:
            lines.append(prefix + str(value))

    for k, v in report.items():
        walk(k, v, indent)
    return "\n".join(lines) + "\n"


def report_bytes(report, fmt):
    if fmt == "json":
        return (json.dumps(report, indent=2) + "\n").encode()
    return render_text(report).encode()


def _write_out(data, out):
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


# -- entry point -------------------------------------------------------------------

def _add_common(sub):
    sub.add_argument("spec", help="path to a group-spec JSON file")
    sub.add_argument("--out", default=None, help="write the report to a file")
    sub.add_argument("--format", choices=("json", "text"), default="json")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="invar",
        description="Hilbert ideals of p-group representations over finite fields.")
    subs = ap.add_subparsers(dest="command", required=True)

    a = subs.add_parser("analyze", help="run the full analysis pipeline")
    _add_common(a)
    a.add_argument("--method", choices=("both", "constructive", "bruteforce"),
                   default="both")
    a.add_argument("--sequence", default=None,
                   help="comma-separated indices, bypasses the search")
    a.add_argument("--degree-bound", type=int, default=None)
    a.add_argument("--verify", choices=("on", "off"), default="on")
    a.add_argument("--timing", action="store_true",
                   help="include wall-clock stage timings (breaks byte determinism)")

    i = subs.add_parser("invariants", help="invariant basis of one degree")
    _add_common(i)
    i.add_argument("--degree", type=int, required=True)

    h = subs.add_parser("hilbert", help="Hilbert ideal only")
    _add_common(h)
    h.add_argument("--method", choices=("both", "constructive", "bruteforce"),
                   default="both")
    h.add_argument("--degree-bound", type=int, default=None)
    h.add_argument("--sequence", default=None)
    h.add_argument("--verify", choices=("on", "off"), default="on")
    return ap


def _parse_sequence(text):
    if not text:
        return None
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise SpecSyntax(f"bad --sequence value {text!r}") from None


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec = parse_spec(args.spec)
    except (SpecSyntax, BadMatrix, BadField) as exc:
        print(f"invar: parse error: {exc}", file=sys.stderr)
        return 3

    try:
        if args.command == "analyze":
            options = AnalyzeOptions(
                method=args.method,
                sequence=_parse_sequence(args.sequence),
                degree_bound=args.degree_bound,
                verify=args.verify == "on",
                timing=args.timing)
            report = analyze(spec, options)
        elif args.command == "hilbert":
            options = AnalyzeOptions(
                method=args.method,
                sequence=_parse_sequence(args.sequence),
                degree_bound=args.degree_bound,
                verify=args.verify == "on")
            full = analyze(spec, options)
            report = {
                "tool": "invar",
                "spec_name": full["spec_name"],
                "hilbert": full["hilbert"],
                "cross_check": full["cross_check"],
                "complete_intersection": full["complete_intersection"],
                "degrees": full["degrees"],
                "colength": full["colength"],
                "polynomiality": full["polynomiality"],
            }
        else:  # invariants
            G = group_closure(spec.generators, cap=_env_cap())
            basis = hmod.invariants_of_degree(G, args.degree)
            report = {
                "tool": "invar",
                "spec_name": spec.name,
                "degree": args.degree,
                "dimension": len(basis),
                "basis": [format_poly(f) for f in basis],
            }
    except SpecSyntax as exc:
        print(f"invar: parse error: {exc}", file=sys.stderr)
        return 3
    except StructuralRefusal as exc:
        print(f"invar: refused: {exc}", file=sys.stderr)
        return 2
    except (hmod.StructureInvalid, BadSequence, NotUnipotent,
            CapExceeded, NotAPGroup) as exc:
        print(f"invar: refused: {exc}", file=sys.stderr)
        return 2
    except (hmod.ReductionEscape, hmod.NoCandidate, AssertionError) as exc:
        print(f"invar: internal assertion failure: {exc}", file=sys.stderr)
        return 4

    _write_out(report_bytes(report, args.format), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
