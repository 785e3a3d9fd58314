"""Command-line front end.

Exit codes: 0 success, 1 search exhausted (NotFound), 2 bad input or a state
that fails validation.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from qent import audit, criteria, scan, states
from qent._fmt import dumps, fmt
from qent.errors import DegenerateCorrelation, NotFound, QentError

REPORT_CSV_FIELDS = ("s_linear", "q_value", "m_value", "n_value", "concurrence", "min_ppt_eigenvalue",
                     "refined_sl_bound", "bell_chsh_violating", "q_detected", "paper_linear_entropy_flag",
                     "teleportation_useful", "oracle_entangled", "is_ppt")


class InputError(Exception):
    pass


def _load(path):
    try:
        return states.load_state(path)
    except FileNotFoundError:
        raise InputError(f"file not found: {path}") from None


def report_csv(report):
    d = report.to_dict()
    vals = [str(int(d[k])) if isinstance(d[k], bool) else fmt(d[k]) for k in REPORT_CSV_FIELDS]
    return ",".join(REPORT_CSV_FIELDS) + "\n" + ",".join(vals) + "\n"


def cmd_analyze(args):
    report = criteria.classify(_load(args.state_file))
    if args.format == "csv":
        return report_csv(report)
    return dumps(report.to_dict()) + "\n"


def _parse_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"--range must be lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(x) for x in parts)
    except ValueError:
        raise InputError(f"--range must be numeric lo:hi:step, got {text!r}") from None
    if not step > 0:
        raise InputError(f"--range step must be positive, got {parts[2]}")
    return parts[0], parts[1], parts[2]


def cmd_family(args):
    lo, hi, step = _parse_range(args.range)
    rows = scan.sweep(args.name, lo, hi, step)
    text = scan.rows_to_csv(rows) if args.format == "csv" else dumps(scan.rows_to_json(rows)) + "\n"
    if args.plot_data:
        base = Path(args.out) if args.out else Path(f"{args.name}.csv")
        for crit in args.plot_data:
            key = crit.replace("/", "")
            base.with_name(f"{base.stem}_{key}.dat").write_text(scan.plot_data(rows, crit))
    if args.out:
        Path(args.out).write_text(text)
        return ""
    return text


def thresholds_table(name, regions=False):
    rows = []
    for label, res in scan.family_thresholds(name):
        rows.append({"label": label, **res.to_dict()})
    out = {"family": name, "thresholds": rows}
    if regions:
        out["regions"] = scan.region_table(name).to_dict()["regions"]
    return out


def cmd_thresholds(args):
    return dumps(thresholds_table(args.name, args.regions)) + "\n"


def chsh_summary(rho, settings=None, optimize=False, random_n=None, seed=0):
    m = criteria.m_value(rho)
    bound = 2.0 * math.sqrt(max(m, 0.0))
    out = {"bound": bound, "m_value": m}
    if optimize:
        try:
            st = criteria.chsh_optimal_settings(rho)
        except DegenerateCorrelation:
            out.update(mode="optimize", value=0.0, settings=None,
                       note="correlation matrix vanishes; every CHSH value is 0")
        else:
            out.update(mode="optimize", value=criteria.chsh_value(rho, st), settings=st.to_json_dict())
    elif random_n is not None:
        dirs = criteria.random_directions(random_n, seed)
        vals = criteria.chsh_values(rho, dirs)
        best = int(np.argmax(vals))
        out.update(mode="random", samples=random_n, seed=seed, value=float(vals[best]),
                   min=float(vals.min()), mean=float(vals.mean()),
                   settings=criteria.MeasurementSettings(*dirs[best]).to_json_dict())
    else:
        out.update(mode="settings", value=criteria.chsh_value(rho, settings), settings=settings.to_json_dict())
    out["gap"] = bound - out["value"]
    out["violates"] = out["value"] > 2.0
    return out


def cmd_chsh(args):
    rho = _load(args.state_file)
    settings = None
    if args.settings:
        try:
            obj = json.loads(Path(args.settings).read_text())
        except FileNotFoundError:
            raise InputError(f"file not found: {args.settings}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON in {args.settings}: {exc}") from None
        settings = criteria.MeasurementSettings.from_json_dict(obj)
    if args.random is not None and args.random < 1:
        raise InputError("--random needs a positive count")
    return dumps(chsh_summary(rho, settings, args.optimize, args.random, args.seed)) + "\n"


def cmd_audit(args):
    if args.samples < 1:
        raise InputError("--samples must be >= 1")
    if args.santos:
        text = audit.santos_table_json(audit.santos_comparison(args.samples, args.seed, args.rank))
    else:
        rep = audit.run_audit(args.samples, seed=args.seed, rank=args.rank, predicates=args.predicate or (),
                              k=args.k)
        text = rep.to_json()
        if args.counts_csv:
            Path(args.counts_csv).write_text(rep.counts_csv())
    if args.out:
        Path(args.out).write_text(text)
        return ""
    return text


def cmd_counterexample(args):
    hit = audit.find_counterexample(args.predicate, seed=args.seed, max_draws=args.max_draws)
    return dumps(hit.to_dict()) + "\n"


def build_parser():
    p = argparse.ArgumentParser(prog="qent", description="Two-qubit entanglement criteria toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="all criteria for one state file")
    a.add_argument("state_file")
    a.add_argument("--format", choices=("json", "csv"), default="json")
    a.set_defaults(func=cmd_analyze)

    f = sub.add_parser("family", help="sweep a named family")
    f.add_argument("--name", choices=sorted(states.FAMILIES), required=True)
    f.add_argument("--range", default="0:1:0.01", help="lo:hi:step, endpoints inclusive")
    f.add_argument("--out", help="output path (default: stdout)")
    f.add_argument("--format", choices=("csv", "json"), default="csv")
    f.add_argument("--plot-data", action="append", choices=sorted(scan.FUNCTIONALS),
                   help="also write a two-column <out>_<criterion>.dat file; repeatable")
    f.set_defaults(func=cmd_family)

    t = sub.add_parser("thresholds", help="bisected thresholds of a family")
    t.add_argument("--name", choices=sorted(states.FAMILIES), required=True)
    t.add_argument("--regions", action="store_true", help="include the region table")
    t.set_defaults(func=cmd_thresholds)

    c = sub.add_parser("chsh", help="CHSH value(s) of a state")
    c.add_argument("state_file")
    mode = c.add_mutually_exclusive_group(required=True)
    mode.add_argument("--settings", help="JSON file with unit vectors a, a_prime, b, b_prime")
    mode.add_argument("--optimize", action="store_true")
    mode.add_argument("--random", type=int, metavar="N")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_chsh)

    u = sub.add_parser("audit", help="Monte Carlo audit against the PPT/concurrence oracle")
    u.add_argument("--samples", type=int, default=10000)
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("--rank", type=int, choices=(1, 2, 3, 4), default=4)
    u.add_argument("--out")
    u.add_argument("--counts-csv")
    u.add_argument("--predicate", action="append", choices=sorted(audit.PREDICATES),
                   help="store example states for this predicate; repeatable")
    u.add_argument("--k", type=int, default=3)
    u.add_argument("--santos", action="store_true", help="emit the entropic-window comparison instead")
    u.set_defaults(func=cmd_audit)

    x = sub.add_parser("counterexample", help="certified state for a catalog predicate")
    x.add_argument("--predicate", choices=sorted(audit.PREDICATES), required=True)
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--max-draws", type=int, default=10**6)
    x.set_defaults(func=cmd_counterexample)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except NotFound as exc:
        print(f"qent: not found: {exc}", file=sys.stderr)
        return 1
    except (InputError, QentError, ValueError) as exc:
        print(f"qent: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
