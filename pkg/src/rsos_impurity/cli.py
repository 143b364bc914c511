"""Command-line interface: coefficient tables, property suites and
reproduction of the tabulated perturbative data.

Exit codes: 0 pass, 1 mismatch or counterexample, 2 unsupported input or
usage error.  ``--order`` is a q-order (u-exponents up to 2*order); its
default comes from the RSOS_IMPURITY_ORDER environment variable (else 3).
"""
import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .series import QSeries
from .weights import UnsupportedFusion

EXIT_OK, EXIT_MISMATCH, EXIT_UNSUPPORTED = 0, 1, 2


def default_order() -> int:
    try:
        return int(os.environ.get("RSOS_IMPURITY_ORDER", "3"))
    except ValueError:
        return 3


def u_order(q_order: int) -> int:
    """Exclusive u-bound resolving every power q^j with j <= q_order."""
    return 2 * q_order + 1


# ----------------------------------------------------------------------
# output

def series_terms(s: QSeries) -> List[List[str]]:
    """[[q-power, zeta-power, coefficient], ...] sorted by q- then zeta-power."""
    out = []
    for ue, ze, c in s.sorted_terms():
        qp = Fraction(ue, 2)
        out.append([str(qp), str(ze), str(Fraction(int(c.numerator), int(c.denominator)))])
    return out


def emit(rows: List[Dict[str, object]], key_fields: Sequence[str], fmt: str, out=None):
    """Write rows carrying key fields and a 'series' (or 'value') entry.

    TSV has one line per series term (key fields, q_power, zeta_power,
    coefficient); JSON has one object per row with a 'terms' list.
    """
    out = out or sys.stdout
    if fmt == "json":
        payload = []
        for r in rows:
            obj = {k: r[k] for k in key_fields}
            if "series" in r:
                obj["terms"] = series_terms(r["series"])
            for extra in ("value", "error", "status"):
                if extra in r:
                    obj[extra] = r[extra]
            payload.append(obj)
        json.dump(payload, out, indent=1, sort_keys=True)
        out.write("\n")
        return
    cols = list(key_fields)
    has_series = any("series" in r for r in rows)
    extras = [e for e in ("value", "error", "status") if any(e in r for r in rows)]
    header = cols + (["q_power", "zeta_power", "coefficient"] if has_series else []) + extras
    out.write("\t".join(header) + "\n")
    for r in rows:
        keys = [str(r[k]) for k in key_fields]
        tail = [str(r.get(e, "")) for e in extras]
        if has_series:
            terms = series_terms(r["series"]) if "series" in r else []
            for t in terms or [["0", "0", "0"]]:
                out.write("\t".join(keys + t + tail) + "\n")
        else:
            out.write("\t".join(keys + tail) + "\n")


def parse_pair(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# ----------------------------------------------------------------------
# weights

def cmd_weights(args) -> int:
    from .weights import NAMED_21, admissible_faces, face_weight, w11_bar, w11_kind
    m, n = args.mn
    order = u_order(args.order)
    if (m, n) not in ((1, 1), (2, 1), (1, 2)):
        raise UnsupportedFusion(f"weights with labels ({m},{n}) are not available")
    names = {}
    if (m, n) == (2, 1) and args.k == 3:
        for name, pair in NAMED_21.items():
            for corners in pair:
                names[corners] = name
    rows = []
    for cfg in admissible_faces(m, n, args.k):
        if args.bar and (m, n) == (1, 1):
            s = w11_bar(cfg, order, args.zeta_exp)
            label = w11_kind(*cfg.corners())
        else:
            s = face_weight(cfg, order, args.zeta_exp)
            label = names.get(cfg.corners(), "")
        lam, mu, mup, nu = cfg.corners()
        rows.append({"lam": lam, "mu": mu, "mu_prime": mup, "nu": nu, "name": label, "series": s})
    emit(rows, ["lam", "mu", "mu_prime", "nu", "name"], args.format)
    return EXIT_OK


# ----------------------------------------------------------------------
# property suites

def _suite_ybe(args) -> Optional[str]:
    from .weights import first_ybe_counterexample
    labels = args.labels or (1, 1, 1)
    hit = first_ybe_counterexample(*labels, k=args.k, order=u_order(args.order))
    return None if hit is None else f"boundary {hit[0]}: lhs {hit[1]} rhs {hit[2]}"


def _suite_inversion(args) -> Optional[str]:
    from .weights import check_inversion
    labels = args.labels or (1, 1)
    return None if check_inversion(labels[0], labels[1], k=args.k, order=u_order(args.order)) \
        else f"inversion fails for labels {labels[:2]}"


def _suite_crossing(args) -> Optional[str]:
    from .weights import check_crossing
    for n in ((args.labels[0],) if args.labels else (1, 2)):
        if not check_crossing(n, k=args.k, order=u_order(args.order)):
            return f"crossing fails for n = {n}"
    return None


def _suite_prop1(args) -> Optional[str]:
    from .weights import check_prop1
    for n in ((args.labels[0],) if args.labels else (1, 2)):
        if not check_prop1(n, k=args.k, order=u_order(args.order)):
            return f"symmetry fails for n = {n}"
    return None


def _suite_contiguity(args) -> Optional[str]:
    from .qkz import contiguity_suite
    for key, ok in sorted(contiguity_suite(k=args.k, order=u_order(args.order)).items(), key=str):
        if ok is False:
            return f"contiguity identity fails at {key}"
    return None


XCOMM_CASES = [((0, 1, 0), "x1_0", (2, 0), (1, 0)), ((0, 1, 2), "x1_0", (2, 0), (1, 0)),
               ((1, 0, 1), "y1_1", (1, 1), (1, 0)), ((1, 2, 3), "y1_1", (1, 1), (1, 0)),
               ((2, 1, 0), "x1_2", (2, 0), (1, 0))]


def _suite_xcomm(args) -> Optional[str]:
    from .intertwiners import x_commutation_check
    from .modules import listed_vector
    for chain, label, xi, eta in XCOMM_CASES:
        if not x_commutation_check(chain, listed_vector(label), xi, eta, order=u_order(args.order),
                                   max_degree=3, target_degree=2):
            return f"X commutation fails for chain {chain} on {label}"
    return None


SUITES = {"ybe": _suite_ybe, "inversion": _suite_inversion, "crossing": _suite_crossing,
          "prop1": _suite_prop1, "contiguity": _suite_contiguity, "xcomm": _suite_xcomm}


def cmd_check(args) -> int:
    problem = SUITES[args.suite](args)
    if problem is None:
        print(f"{args.suite}\tpass")
        return EXIT_OK
    print(f"{args.suite}\tFAIL\t{problem}")
    return EXIT_MISMATCH


def cmd_numeric(args) -> int:
    from .weights import RegimeViolation, numeric_max_scan
    try:
        rows, maxima, ok = numeric_max_scan(args.n, args.k, args.q, args.zeta, args.precision)
    except RegimeViolation as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_UNSUPPORTED
    maximal = set(maxima)
    out = [{"config": ",".join(map(str, c)), "value": f"{float(v):.15e}", "error": f"{float(e):.1e}",
            "status": "max" if c in maximal else ""} for c, v, e in rows]
    emit(out, ["config"], args.format)
    print(f"maximal weights match ground-state configurations: {'yes' if ok else 'no'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_MISMATCH


# ----------------------------------------------------------------------
# reproduction of tabulated data

# the tabulated perturbative data run through q^3
TABLE_Q_ORDER = 3


def _table_order(args) -> int:
    return u_order(min(args.order, TABLE_Q_ORDER))


def _rep_vac(args):
    from .lattice import compare_vacuum, solve_vacuum
    bad = compare_vacuum(solve_vacuum(_table_order(args), args.window))
    return [(",".join(map(str, s)) or "0", f"class {c}: computed {g} expected {e}") for s, c, g, e in bad], None


def _rep_xtable(name):
    def run(args):
        from .intertwiners import check_x_table_entry, x_table_entries
        out, n = [], 0
        for table, entry in x_table_entries():
            if table != name:
                continue
            n += 1
            res = check_x_table_entry(entry)
            if not res["ok"]:
                out.append((f"X{entry['op'][0]}{entry['op'][1]} {entry['source']}", str(res["problems"])))
        return out, n
    return run


def _rep_zexp(args):
    from .intertwiners import check_z_expansion
    res = check_z_expansion()
    return [(str(p[0]), f"computed {p[1]} expected {p[2]}") for p in res["problems"]], 1


def _rep_ket(m):
    def run(args):
        from .golden import load, parse_series
        from .lattice import GOLDEN_KEY, IMAGE_BOUNDARY, IMAGE_PATTERNS, algebraic_image, iota_of_action
        order = _table_order(args)
        golden = load("lattice_tables.yaml")[GOLDEN_KEY[m]]
        action = algebraic_image(m)
        out, n = [], 0
        for pattern, reps in IMAGE_PATTERNS[m].items():
            expected = parse_series(golden[pattern], order)
            for sites in reps(args.sites_up_to):
                n += 1
                got = iota_of_action(action, IMAGE_BOUNDARY[m], sites, order)
                if not got.agrees_with(expected):
                    out.append((f"{pattern} at {sites}", f"computed {got} expected {expected}"))
        return out, n
    return run


def _rep_conjecture(args):
    from .lattice import conjecture_check
    rep = conjecture_check(args.m, windows=args.windows, order=_table_order(args))
    out = [(f"N={r.N} {r.pattern} at {r.sites}",
            f"lattice {r.lattice} algebraic {r.algebraic} expected {r.golden}")
           for r in rep.rows if not r.agree]
    if not rep.normalisers_match:
        out.append(("f_N", "ground-state coefficients differ from the tabulated normalisers"))
    return out, len(rep.rows)


def _rep_listed(args):
    from .modules import check_listed_vector, listed_vectors
    labels = sorted(listed_vectors())
    return [(lab, "differs from the listed vector") for lab in labels if not check_listed_vector(lab)], len(labels)


def _rep_intexp(args):
    from .intertwiners import compare_with_golden, golden_labels
    labels = golden_labels()
    out = []
    for lab in labels:
        res = compare_with_golden(lab)
        if not res["ok"]:
            out.append((lab, str(res["mismatches"])))
    return out, len(labels)


TARGETS = {"vac": _rep_vac, "X1": _rep_xtable("X1"), "Y1": _rep_xtable("Y1"), "Zexp": _rep_zexp,
           "oneket": _rep_ket(1), "twoket": _rep_ket(2), "conjecture": _rep_conjecture,
           "listed": _rep_listed, "intexp": _rep_intexp}


def cmd_reproduce(args) -> int:
    diffs, count = TARGETS[args.target](args)
    for item, detail in diffs:
        print(f"{args.target}\t{item}\tMISMATCH\t{detail}")
    what = "all classes" if count is None else f"{count} item" + ("s" if count != 1 else "")
    if diffs:
        print(f"{args.target}\tFAIL\t{len(diffs)} mismatches")
        return EXIT_MISMATCH
    print(f"{args.target}\tmatch\t{what}")
    return EXIT_OK


# ----------------------------------------------------------------------
# lattice commands

def _sites(text: str) -> tuple:
    text = text.strip()
    if text in ("", "0", "-"):
        return ()
    return tuple(sorted(parse_pair(text), reverse=True))


def cmd_vacuum(args) -> int:
    from .lattice import solve_vacuum, vacuum_pattern_class
    state = solve_vacuum(u_order(args.order), args.window)
    rows = []
    for d, c in sorted(state.items(), key=lambda kv: (len(kv[0]), [s for s, _ in kv[0]])):
        sites = tuple(s for s, _ in d)
        if (sites and max(sites) > state.trusted) or len(sites) > args.max_defects or c.is_zero():
            continue
        rows.append({"ket": ",".join(map(str, sites)) or "0", "class": vacuum_pattern_class(sites),
                     "series": c})
    emit(rows, ["ket", "class"], args.format)
    return EXIT_OK


def cmd_iota(args) -> int:
    from .lattice import VACUUM_BOUNDARY, iota_coeff
    from .modules import listed_vector
    order = u_order(args.order)
    rows = []
    for text in args.sites:
        sites = _sites(text)
        c = iota_coeff(listed_vector(args.source), VACUUM_BOUNDARY, sites, order, ell_min=args.ell)
        rows.append({"ket": ",".join(map(str, sites)) or "0", "series": c})
    emit(rows, ["ket"], args.format)
    return EXIT_OK


def cmd_conjecture(args) -> int:
    from .lattice import conjecture_check
    rep = conjecture_check(args.m, windows=args.windows, order=_table_order(args),
                           normaliser=args.normaliser)
    rows = [{"N": r.N, "pattern": r.pattern, "ket": ",".join(map(str, r.sites)) or "0",
             "series": r.lattice, "status": "agree" if r.agree else "DIFFER"} for r in rep.rows]
    emit(rows, ["N", "pattern", "ket"], args.format)
    return EXIT_OK if rep.ok else EXIT_MISMATCH


# ----------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=3, help="level (default 3)")
    common.add_argument("--order", type=int, default=default_order(),
                        help="q-order of truncation (default: $RSOS_IMPURITY_ORDER or 3)")
    common.add_argument("--format", choices=("tsv", "json"), default="tsv")

    parser = argparse.ArgumentParser(prog="rsos-impurity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", parents=[common], help="face weight coefficient tables")
    p.add_argument("--mn", type=parse_pair, default=(1, 1), help="fusion labels m,n")
    p.add_argument("--bar", action="store_true", help="(1,1): the normalised weights A, B, C")
    p.add_argument("--zeta-exp", type=int, default=1,
                   help="spectral argument zeta^e; 0 evaluates at zeta = 1")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("check", parents=[common], help="run a property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--labels", type=parse_pair, default=None,
                   help="ybe: m,n,l; inversion: m,n; crossing/prop1: n")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reproduce", parents=[common], help="diff against tabulated data")
    p.add_argument("target", choices=list(TARGETS))
    p.add_argument("--m", type=int, default=1, choices=(1, 2))
    p.add_argument("--windows", type=parse_pair, default=(9, 10, 11, 12, 13, 14))
    p.add_argument("--window", type=int, default=16, help="vacuum window")
    p.add_argument("--sites-up-to", type=int, default=7, help="oneket/twoket: last site checked")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("numeric", parents=[common], help="numerical maximal-weight scan")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--q", type=float, default=-0.3)
    p.add_argument("--zeta", type=float, default=2.0)
    p.add_argument("--precision", type=int, default=30, help="decimal digits")
    p.set_defaults(func=cmd_numeric)

    p = sub.add_parser("vacuum", parents=[common], help="perturbative CTM vacuum")
    p.add_argument("--window", type=int, default=16)
    p.add_argument("--max-defects", type=int, default=3)
    p.set_defaults(func=cmd_vacuum)

    p = sub.add_parser("iota", parents=[common], help="coefficients of the embedding of a vector")
    p.add_argument("sites", nargs="+", help="kets as descending sites, e.g. 3 or 5,4,3; 0 for the ground state")
    p.add_argument("--source", default="x1_0")
    p.add_argument("--ell", type=int, default=None, help="first chain length of the stability check")
    p.set_defaults(func=cmd_iota)

    p = sub.add_parser("conjecture", parents=[common], help="lattice versus algebraic impurity operator")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--windows", type=parse_pair, default=(9, 10, 11, 12, 13, 14))
    p.add_argument("--normaliser", choices=("tabulated", "fitted"), default="tabulated")
    p.set_defaults(func=cmd_conjecture)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:       # argparse reports usage errors with status 2
        return int(exc.code or 0)
    if getattr(args, "order", 0) < 0:
        print("order must be non-negative", file=sys.stderr)
        return EXIT_UNSUPPORTED
    try:
        return args.func(args)
    except UnsupportedFusion as exc:
        print(f"UnsupportedFusion: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
