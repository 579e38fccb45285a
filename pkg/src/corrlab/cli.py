"""Command-line front end.

Exit codes: 0 ok, 1 bad input, 2 a bound check failed, 3 the search gave up.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Sequence

import numpy as np

from corrlab import combinatorics as comb
from corrlab import expsums as ex
from corrlab.lll import LLLInstance, SearchFailure, choose_d0, moser_tardos_search
from corrlab.measures import ShiftVector, corr_sum, d_window_min
from corrlab.sequences import SpecError, load_spec, spec_from_dict, spec_id

EXIT_OK, EXIT_INVALID, EXIT_BOUND, EXIT_SEARCH = 0, 1, 2, 3


class BoundFailure(Exception):
    pass


def parse_spec(text: str):
    """A spec file path, or an inline JSON object."""
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"inline spec is not valid JSON ({exc})") from None
        spec = spec_from_dict(data)
        return spec, spec_id(spec)
    path = Path(text)
    if not path.is_file():
        raise SpecError(f"cannot read spec file {text}")
    return load_spec(path), path.stem


def _csv(header: Sequence[str], rows: List[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _bound_table(reports: List[ex.BoundReport]) -> tuple:
    header = ["bound_name", "params", "observed", "bound", "margin", "pass"]
    rows = [[r.bound_name, _dumps(r.params), _num(r.observed), _num(r.bound), _num(r.margin),
             "" if r.passed is None else str(r.passed).lower()] for r in reports]
    return header, rows


def _finish_bounds(args, reports: List[ex.BoundReport], extra: dict | None = None) -> None:
    if args.format == "json":
        payload = {"reports": [r.to_dict() for r in reports]}
        payload.update(extra or {})
        _emit(args, _dumps(payload))
    else:
        _emit(args, _csv(*_bound_table(reports)))
    failed = [r for r in reports if r.passed is False]
    for r in failed:
        print(f"FAIL {r.bound_name} {_dumps(r.params)} observed={_num(r.observed)} bound={_num(r.bound)}",
              file=sys.stderr)
    if failed:
        raise BoundFailure(f"{len(failed)} of {len(reports)} checks failed")


def cmd_generate(args) -> None:
    spec, _ = parse_spec(args.spec)
    x = spec.window(args.start, args.start + args.n)
    _emit(args, ",".join(str(int(v)) for v in x))


def cmd_measure(args) -> None:
    spec, sid = parse_spec(args.spec)
    r = ShiftVector.parse(args.r)
    rep = corr_sum(spec, r, args.n, spec_id=sid, threads=args.threads)
    out = rep.to_dict()
    if args.d:
        out["d"] = args.d
        out["d_window_min"] = float(d_window_min(spec, r, args.d, args.n, threads=args.threads))
    if args.format == "json":
        _emit(args, _dumps(out))
        return
    header = ["spec_id", "m"] + [f"r{i + 1}" for i in range(r.m)] + ["N", "delta_sum", "mean", "target"]
    row = [sid, r.m, *r.offsets, rep.N, rep.delta_sum, _num(rep.mean), _num(rep.target)]
    if args.checkpoints:
        rows = [[sid, r.m, *r.offsets, n, s, _num(s / n), _num(rep.target)] for n, s in rep.checkpoints]
        _emit(args, _csv(header, rows))
    else:
        _emit(args, _csv(header, [row]))


def cmd_expsum(args) -> None:
    spec, sid = parse_spec(args.spec)
    f = ex.PeriodicF(spec.k, tuple(int(v) for v in args.f.split(","))) if args.f else None
    hist = ex.residue_histogram(spec, args.r, args.n, f, threads=args.threads)
    if args.hist:
        _emit(args, _csv(["c", "count"], hist.to_csv_rows()))
        return
    hs = [args.h] if args.h else list(range(1, spec.k))
    values = [(h, ex.gamma_eval(hist, h)) for h in hs]
    if args.format == "json":
        _emit(args, _dumps({"spec_id": sid, "r": args.r, "N": args.n,
                            "gamma": [{"h": h, "re": g.real, "im": g.imag, "abs": abs(g)} for h, g in values]}))
    else:
        _emit(args, _csv(["spec_id", "r", "N", "h", "re", "im", "abs"],
                         [[sid, args.r, args.n, h, _num(g.real), _num(g.imag), _num(abs(g))] for h, g in values]))


def verify_lemma1(args) -> None:
    rows, bad = [], 0
    max_k = args.max_k or 4
    max_d = args.max_d or 5
    for counts, d, closed, brute, bound, ok in comb.lemma1_table(args.max_n, max_k, max_d):
        bad += not ok
        rows.append([" ".join(map(str, counts)), d, closed, brute, str(bound), str(ok).lower()])
    for counts, d, closed, brute, bound, ok in [r for r in rows if r[-1] == "false"]:
        print(f"FAIL lemma1 profile=({counts}) d={d} closed={closed} brute={brute} bound={bound}", file=sys.stderr)
    _emit(args, _csv(["profile", "d", "closed_form", "brute_force", "bound", "pass"], rows))
    if bad:
        raise BoundFailure(f"{bad} lemma1 rows failed")


def verify_hoeffding(args) -> None:
    ps = [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]
    _finish_bounds(args, list(comb.hoeffding_grid(args.max_d or 30, ps)))


def verify_event_prob(args) -> None:
    rows, bad = [], 0
    for d in range(1, (args.max_d or 10) + 1):
        for t in range(d + 1):
            formula = comb.event_probability(2, 2, d, t)
            enum = comb.event_probability_enumerated(2, 2, d, t)
            ok = formula == enum
            bad += not ok
            rows.append(["enumeration", 2, 2, d, t, str(formula), str(enum), str(ok).lower()])
    for k in (2, 3):
        for m in (2, 3):
            for eps in ("0.1", "0.15", "0.2"):
                for d in range(1, args.max_d_bound + 1):
                    ok = comb.event_bound_holds(k, m, Fraction(eps), d)
                    bad += not ok
                    rows.append(["hoeffding", k, m, d, comb.search_threshold(k, m, Fraction(eps), d),
                                 eps, "", str(ok).lower()])
    _emit(args, _csv(["check", "k", "m", "d", "t", "value", "reference", "pass"], rows))
    if bad:
        raise BoundFailure(f"{bad} event-probability rows failed")


def _suite_spec(args):
    spec, _ = parse_spec(args.spec)
    return spec


def verify_gr2(args) -> None:
    spec = _suite_spec(args)
    rng = np.random.default_rng(args.seed)
    fs = [ex.PeriodicF.zero(spec.k)] + [ex.random_periodic(spec.k, rng) for _ in range(args.trials)]
    _finish_bounds(args, [ex.verify_gr2(spec, f, args.n, all_prefixes=True) for f in fs])


def verify_crux(args) -> None:
    reports = []
    for k in range(2, (args.max_k or 5) + 1):
        for perm in itertools.permutations(range(k)):
            f = ex.PeriodicF(k, perm)
            for h in range(1, k):
                for N in range(1, 3 * k + 1):
                    reports.append(ex.crux_check(f, h, N))
    _finish_bounds(args, reports)


def verify_mtheo(args) -> None:
    spec = _suite_spec(args)
    _finish_bounds(args, ex.verify_mtheo_range(spec, range(1, args.r_max + 1), args.n))


def verify_mtheo2(args) -> None:
    spec = _suite_spec(args)
    reports = [ex.mtheo2_check(spec, r, args.n, args.gamma, threads=args.threads)
               for r in range(1, args.r_max + 1)]
    _finish_bounds(args, reports, {"max_ratio": max(r.extra["ratio"] for r in reports)})


def verify_prop_use(args) -> None:
    spec = _suite_spec(args)
    r = ShiftVector.parse(args.r)
    if r.m != 2:
        raise ValueError("prop-use takes exactly two offsets")
    resid, imag = ex.prop_use_check(spec, r.offsets[0], r.offsets[1], args.n, threads=args.threads)
    tol = 1e-9 * args.n
    rep = ex.BoundReport("prop-use", {"r": list(r.offsets), "N": args.n}, max(resid, imag), tol,
                         resid <= tol and imag <= tol, {"residual": resid, "imag": imag})
    _finish_bounds(args, [rep])


SUITES = {
    "lemma1": verify_lemma1,
    "hoeffding": verify_hoeffding,
    "event-prob": verify_event_prob,
    "gr2": verify_gr2,
    "crux": verify_crux,
    "mtheo": verify_mtheo,
    "mtheo2": verify_mtheo2,
    "prop-use": verify_prop_use,
}


def cmd_verify(args) -> None:
    needs_spec = {"gr2", "mtheo", "mtheo2", "prop-use"}
    if args.suite in needs_spec and not args.spec:
        raise ValueError(f"verify {args.suite} needs --spec")
    SUITES[args.suite](args)


def cmd_search(args) -> None:
    d0 = choose_d0(args.epsilon, args.m) if args.d0 == "auto" else int(args.d0)
    inst = LLLInstance(args.k, args.m, args.epsilon, args.n, d0, args.seed, args.max_resamples)
    res = moser_tardos_search(inst)
    _emit(args, res.word_string() + "\n" + _dumps(res.to_dict()))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default="csv")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--threads", type=int, default=0, help="worker count, 0 = all cores")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="corrlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="print a prefix of a sequence")
    g.add_argument("--spec", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--start", type=int, default=0)
    g.set_defaults(func=cmd_generate)

    m = sub.add_parser("measure", parents=[common], help="running correlation mean along r")
    m.add_argument("--spec", required=True)
    m.add_argument("--r", required=True, help="comma separated offsets, e.g. 0,1")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--d", type=int, help="also report the minimum windowed mean for windows of length d")
    m.add_argument("--checkpoints", action="store_true", help="one CSV row per geometric checkpoint")
    m.set_defaults(func=cmd_measure)

    e = sub.add_parser("expsum", parents=[common], help="exponential sums gamma_N(r, f)")
    e.add_argument("--spec", required=True)
    e.add_argument("--r", type=int, required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--h", type=int)
    e.add_argument("--f", help="comma separated values f(0),...,f(k-1)")
    e.add_argument("--hist", action="store_true", help="dump the raw residue histogram")
    e.set_defaults(func=cmd_expsum)

    v = sub.add_parser("verify", parents=[common], help="run a bound-check suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--spec")
    v.add_argument("--n", type=int, default=10 ** 6)
    v.add_argument("--r", default="0,1")
    v.add_argument("--r-max", type=int, default=64)
    v.add_argument("--gamma", type=float, default=0.5)
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--max-n", type=int, default=12)
    v.add_argument("--max-k", type=int, help="lemma1: 4, crux: 5")
    v.add_argument("--max-d", type=int, help="lemma1: 5, hoeffding: 30, event-prob: 10")
    v.add_argument("--max-d-bound", type=int, default=200)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", parents=[common], help="find a block-disagreement witness word")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d0", default="auto")
    s.add_argument("--max-resamples", type=int, default=100_000)
    s.set_defaults(func=cmd_search)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        args.func(args)
    except BoundFailure as exc:
        print(f"corrlab: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except SearchFailure as exc:
        print(f"corrlab: search failed: {exc}", file=sys.stderr)
        return EXIT_SEARCH
    except (SpecError, ValueError, OSError, IndexError) as exc:
        print(f"corrlab: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
