"""Command line entry point: ``unitalkit <command> --p P --r R ...``.

Every command prints (or writes with --report) a JSON report.  Exit status
is 0 when all checks pass, 1 when some check fails and 2 on usage or I/O
errors.  Timings live under the top-level "timings" key only.
"""

import argparse
import random
import sys
import time
from collections import Counter
from pathlib import Path

from . import __version__
from .collineations import (
    pair_stabilizer_orders,
    point_pairs,
    random_projectivity,
    transform_unital,
    two_point_stabilizer,
)
from .fileio import TowerMismatch, dump_json, read_unital, write_unital
from .finite_field import make_tower
from .local_intersection import (
    bezout_reconcile,
    hermitian_branch,
    multiplicity_at,
    multiplicity_at_origin,
)
from .projective_plane import O, Y_INF, ProjPoint
from .quotient_plane import build_quotient_plane, verify_projective_plane
from .unitals import (
    NotAUnitalError,
    buekenhout_metz,
    classicality_check,
    cone_form,
    curve_form,
    hermitian_curve,
    is_unital,
)


class UsageError(Exception):
    pass


class Report:
    def __init__(self, command, argv, F):
        self.data = {
            "command": command,
            "argv": list(argv),
            "version": __version__,
            "tower": F.header(),
            "checks": [],
            "results": {},
        }
        self.timings = {}

    def check(self, name, ok, **details):
        entry = {"name": name, "ok": bool(ok)}
        entry.update(details)
        self.data["checks"].append(entry)
        return ok

    @property
    def ok(self):
        return all(c["ok"] for c in self.data["checks"])

    def finish(self):
        out = dict(self.data)
        out["ok"] = self.ok
        out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out


def _tower(args):
    try:
        return make_tower(args.p, args.r)
    except (ValueError, OverflowError) as exc:
        raise UsageError(str(exc)) from exc


def _nonzero(F, value, name):
    if value is None:
        return None
    if not 0 < value < F.q2:
        raise UsageError(f"--{name} must be a nonzero element code below {F.q2}")
    return value


def _point(text):
    try:
        return ProjPoint.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _default_max_pairs(F):
    return 500 if F.q >= 5 else None


def cmd_hermitian(args, report, F):
    b = _nonzero(F, args.b, "b")
    U = hermitian_curve(F, b)
    cert = is_unital(U)
    report.check("is_unital", cert.ok, size=cert.size, spectrum={str(k): v for k, v in cert.spectrum.items()})
    if args.out:
        write_unital(args.out, U, cert)
    report.data["results"] = {"kind": U.kind, "points": len(U), "out": args.out}


def cmd_bm(args, report, F):
    try:
        U = buekenhout_metz(F, args.alpha, args.beta)
    except NotAUnitalError as exc:
        report.check("construction", False, reason=str(exc))
        return
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cert = is_unital(U)
    report.check("is_unital", cert.ok, size=cert.size)
    if args.out:
        write_unital(args.out, U, cert)
    report.data["results"] = {"kind": U.kind, "points": len(U), "out": args.out}


def _first_bm(F, start=1):
    for alpha in range(start, F.q2):
        for beta in range(F.q2):
            try:
                return buekenhout_metz(F, alpha, beta)
            except NotAUnitalError:
                continue
    raise RuntimeError("no Buekenhout-Metz parameters found")


def build_corpus(F, images=2, seed=0):
    """Hermitian curves, random projective images and (odd q) a
    non-classical Buekenhout-Metz unital."""
    rng = random.Random(seed)
    H1 = hermitian_curve(F, 1)
    corpus = [H1, hermitian_curve(F, 2)]
    for k in range(images):
        corpus.append(transform_unital(H1, random_projectivity(F, rng)))
        corpus[-1].kind = f"image {k} of hermitian b=1"
    if F.q % 2:
        corpus.append(_first_bm(F))
    return corpus


def cmd_corpus(args, report, F):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for k, U in enumerate(build_corpus(F, args.images, args.seed)):
        cert = is_unital(U)
        report.check(f"is_unital[{k}]", cert.ok, kind=U.kind)
        path = out / f"unital_{k:02d}.txt"
        write_unital(path, U, cert)
        written.append(str(path))
    report.data["results"] = {"files": written}


def _load(path, F):
    try:
        return read_unital(path, F)
    except TowerMismatch as exc:
        raise UsageError(str(exc)) from exc
    except (OSError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def cmd_stabilizer(args, report, F):
    U = _load(args.unital, F)
    cert = is_unital(U)
    if not report.check("is_unital", cert.ok, witness=str(cert.witness) if cert.witness else None, count=cert.count):
        return
    q2m1 = F.q2 - 1
    if args.all_pairs:
        max_pairs = args.max_pairs if args.max_pairs is not None else _default_max_pairs(F)
        pairs = point_pairs(U, max_pairs, args.seed)
        start = time.perf_counter()
        orders = pair_stabilizer_orders(U, pairs)
        report.timings["pair_scan"] = time.perf_counter() - start
        hist = Counter(orders)
        report.data["results"] = {
            "pairs": len(pairs),
            "histogram": {str(k): hist[k] for k in sorted(hist)},
            "full_order_pairs": hist.get(q2m1, 0),
        }
        return
    if args.P is None or args.Q is None:
        raise UsageError("give --P and --Q, or --all-pairs")
    P, Q = _point(args.P), _point(args.Q)
    if P == Q:
        raise UsageError("--P and --Q must differ")
    if P not in U or Q not in U:
        raise UsageError("both points must lie on the unital")
    sc = two_point_stabilizer(U, P, Q)
    d = sc.to_dict()
    report.timings["stabilizer"] = d.pop("elapsed")
    report.data["results"] = d
    if sc.order == q2m1:
        report.check("full_order_conditions", sc.full_order_conditions(F), order=sc.order)


def cmd_quotient_plane(args, report, F):
    lam = args.lam if args.lam is not None else F.root
    try:
        pi = build_quotient_plane(F, lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cert = verify_projective_plane(pi)
    for name, res in cert.axioms.items():
        report.check(name, res.ok, witness=res.witness)
    census = pi.census()
    q = F.q
    report.check(
        "orbit_census",
        census["long_orbits"] == q * q and census["short_orbits"] == q + 1,
        **census,
    )
    if args.out:
        dump_json(pi.to_dict(), args.out)
    report.data["results"] = {"order": q, "points": census["points"], "lines": census["lines"], "out": args.out}


def cmd_multiplicity(args, report, F):
    q = F.q
    b = _nonzero(F, args.b, "b") or 1
    results = {}
    if args.case == "lemma2":
        d = _nonzero(F, args.d, "d") or next(d for d in range(1, F.q2) if d != b)
        if d == b:
            raise UsageError("--d must differ from --b")
        k = multiplicity_at_origin(curve_form(F, d), hermitian_branch(F, b=b))
        results = {"b": b, "d": d, "multiplicity": k}
        report.check("multiplicity_is_q_plus_1", k == q + 1, value=k)
    elif args.case == "lemma3":
        c = _nonzero(F, args.c, "c") or 1
        H = curve_form(F, b)
        C = cone_form(F, c)
        k1 = multiplicity_at(H, C, O)
        k2 = multiplicity_at(H, C, Y_INF)
        results = {"b": b, "c": c, "at_O": k1, "at_Y_inf": k2}
        report.check("multiplicity_is_q_plus_1", k1 == q + 1 and k2 == q + 1, value=[k1, k2])
    else:
        H = curve_form(F, b)
        if args.c is not None:
            other = cone_form(F, _nonzero(F, args.c, "c"))
        else:
            d = _nonzero(F, args.d, "d") or next(d for d in range(1, F.q2) if d != b)
            other = curve_form(F, d)
        rep = bezout_reconcile(H, other)
        results = rep.to_dict()
        report.check("bezout_bound", rep.total <= rep.budget, total=rep.total, budget=rep.budget)
    report.data["results"] = results


def cmd_theorem(args, report, F):
    files = sorted(Path(args.corpus).glob("*.txt")) if Path(args.corpus).is_dir() else []
    if not files:
        raise UsageError(f"no unital files in {args.corpus}")
    max_pairs = args.max_pairs if args.max_pairs is not None else _default_max_pairs(F)
    q2m1 = F.q2 - 1
    entries = []
    for path in files:
        U = _load(path, F)
        cert = is_unital(U)
        name = path.name
        if not report.check(f"{name}:is_unital", cert.ok, witness=str(cert.witness) if cert.witness else None, count=cert.count):
            entries.append({"file": name, "rejected": True})
            continue
        start = time.perf_counter()
        pairs = point_pairs(U, max_pairs, args.seed)
        orders = pair_stabilizer_orders(U, pairs)
        has_pair = q2m1 in orders
        report.timings[f"{name}:pairs"] = time.perf_counter() - start
        start = time.perf_counter()
        form = classicality_check(U)
        report.timings[f"{name}:classicality"] = time.perf_counter() - start
        classical = form is not None
        entries.append({
            "file": name,
            "kind": U.kind,
            "pairs_scanned": len(pairs),
            "full_order_pair": has_pair,
            "classical": classical,
            "gram": [list(r) for r in form.gram] if form else None,
        })
        report.check(f"{name}:biconditional", has_pair == classical, full_order_pair=has_pair, classical=classical)
    report.data["results"] = {"unitals": entries}


COMMANDS = {
    "hermitian": cmd_hermitian,
    "bm": cmd_bm,
    "corpus": cmd_corpus,
    "stabilizer": cmd_stabilizer,
    "quotient-plane": cmd_quotient_plane,
    "multiplicity": cmd_multiplicity,
    "theorem": cmd_theorem,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="unitalkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--r", type=int, required=True)
        p.add_argument("--report", help="write the JSON report here instead of stdout")
        return p

    p = add("hermitian", "write the Hermitian curve H_b as a unital file")
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--out")

    p = add("bm", "write a Buekenhout-Metz unital (odd q)")
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--out")

    p = add("corpus", "write a test corpus of classical and non-classical unitals")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--images", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)

    p = add("stabilizer", "2-point stabiliser certificates")
    p.add_argument("--unital", required=True)
    p.add_argument("--P")
    p.add_argument("--Q")
    p.add_argument("--all-pairs", action="store_true")
    p.add_argument("--max-pairs", type=int)
    p.add_argument("--seed", type=int, default=0)

    p = add("quotient-plane", "build and certify the orbit plane of order q")
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--out")

    p = add("multiplicity", "local intersection multiplicities")
    p.add_argument("--case", choices=["lemma2", "lemma3", "bezout"], required=True)
    p.add_argument("--b", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--c", type=int)

    p = add("theorem", "check the stabiliser/classicality equivalence on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--max-pairs", type=int)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        F = _tower(args)
        if getattr(args, "b", None) == 0:
            raise UsageError("--b must be nonzero")
        report = Report(args.command, argv, F)
        start = time.perf_counter()
        COMMANDS[args.command](args, report, F)
        report.timings["total"] = time.perf_counter() - start
        text = dump_json(report.finish())
        if args.report:
            Path(args.report).write_text(text)
        else:
            sys.stdout.write(text)
    except UsageError as exc:
        print(f"unitalkit: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"unitalkit: I/O error: {exc}", file=sys.stderr)
        return 2
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
