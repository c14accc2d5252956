"""Command-line entry point: ``nonstat {test,robinson,simulate,quantile,table}``.

Results go to stdout (JSON, or CSV for ``quantile``); a short human
summary goes to stderr. Exit status: 0 success, 2 invalid input, 1 any
other failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from nonstat.errors import DegenerateSeries, DomainError

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def read_series(path: str) -> np.ndarray:
    """One value per line; blank lines and '#' comments ignored. '-' is stdin."""
    fh = sys.stdin if path == "-" else open(path, encoding="utf-8")
    values = []
    try:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise DomainError(f"{path}:{lineno}: not a number: {text!r}") from None
    finally:
        if fh is not sys.stdin:
            fh.close()
    return np.asarray(values)


def _emit_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_test(args) -> int:
    from nonstat import stats

    variant = {"q": "Q", "qtilde": "Qtilde"}[args.variant]
    x = read_series(args.input)
    out = stats.run_test(x, s=args.s, alpha=args.alpha, variant=variant,
                         two_sided=args.two_sided)
    _emit_json(out.to_dict())
    _say(f"{variant}_n({args.s}) = {out.statistic:.6g}, n = {out.n}: {out.decision}")
    return EXIT_OK


def cmd_robinson(args) -> int:
    from nonstat import robinson

    x = read_series(args.input)
    out = robinson.robinson_test(x, alpha=args.alpha, prewhiten=args.prewhiten, qmax=args.qmax)
    _emit_json(out.to_dict())
    _say(f"r_tilde = {out.stat.r_tilde:.6g} (critical {out.critical:.4g}): {out.decision}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from nonstat import dgp

    fields = ("d", "phi", "a", "b", "M", "c", "p", "alpha", "delta_break", "beta", "burn_in")
    kw = {f: getattr(args, f) for f in fields if getattr(args, f) is not None}
    spec = dgp.DgpSpec(kind=args.kind, n=args.n, seed=args.seed, **kw)
    x = dgp.simulate(spec)
    header = json.dumps(spec.to_dict(), sort_keys=True)
    lines = [f"# {header}"] + [repr(float(v)) for v in x]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    _say(f"simulated {spec.kind} n={spec.n} seed={spec.seed}")
    return EXIT_OK


def cmd_quantile(args) -> int:
    from nonstat import cache, nulldist

    rows = []
    for s in args.s:
        for alpha in args.alpha:
            if not (0.0 < alpha < 1.0):
                raise DomainError("alpha must lie in (0, 1)")
            if s < 1:
                raise DomainError("s must be positive")
            if args.method == "monte-carlo":
                dist = nulldist.NullDistribution(cache.null_spectrum(s), "monte-carlo",
                                                 mc_draws=args.draws, seed=args.seed)
                q = nulldist.critical_value(dist, alpha)
            else:
                q = cache.null_quantile(s, alpha, method=args.method)
            rows.append({"alpha": alpha, "s": s, "quantile": q, "method": args.method})
    sys.stdout.write(nulldist.quantile_csv(rows))
    _say(f"{len(rows)} quantile(s) via {args.method}")
    return EXIT_OK


def cmd_table(args) -> int:
    from nonstat import harness

    path = args.config
    if not os.path.exists(path):
        path = harness.bundled_config(path)
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if args.replications is not None:
        data["replications"] = args.replications
    if args.workers is not None:
        data["workers"] = args.workers
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.budget is not None:
        data["cell_time_budget"] = args.budget
    cfg = harness.McConfig.from_dict(data)

    def progress(spec, rows):
        r = rows[0]
        _say(f"{spec.kind} {spec.params()} n={spec.n}: {r.test}={r.rejection_rate:.3f}"
             + (" (partial)" if r.partial else ""))

    table = harness.run_experiment(cfg, progress=progress if args.verbose else None)
    harness.table_to_csv(table, args.out)
    for note in table.anomalies:
        _say(f"anomaly: {note}")
    _say(f"wrote {len(table.rows)} rows to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nonstat", description="Spectral test of nonstationarity against long memory.")
    p.add_argument("--cache-dir", help="cache directory (overrides NONSTAT_CACHE_DIR)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("test", help="run the Q_n(s) test on a series file")
    t.add_argument("input", help="file with one value per line ('-' for stdin)")
    t.add_argument("--s", type=int, default=10, help="number of Fourier frequencies")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--variant", choices=("q", "qtilde"), default="q")
    t.add_argument("--two-sided", action="store_true", help="test d = 1/2 on both tails")
    t.set_defaults(func=cmd_test)

    r = sub.add_parser("robinson", help="run Robinson's r-tilde test on a series file")
    r.add_argument("input")
    r.add_argument("--alpha", type=float, default=0.05)
    r.add_argument("--prewhiten", action="store_true")
    r.add_argument("--qmax", type=int, default=3, help="largest AR order for prewhitening")
    r.set_defaults(func=cmd_robinson)

    m = sub.add_parser("simulate", help="draw a series from one of the designs")
    m.add_argument("--kind", required=True, choices=("farima", "aggregated", "renewal", "break"))
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--seed", type=int, default=0)
    for name, typ in (("d", float), ("phi", float), ("a", float), ("b", float), ("M", int),
                      ("c", float), ("p", float), ("alpha", float), ("delta-break", float),
                      ("beta", float), ("burn-in", int)):
        m.add_argument(f"--{name}", type=typ, dest=name.replace("-", "_"))
    m.add_argument("--out", help="write to file instead of stdout")
    m.set_defaults(func=cmd_simulate)

    q = sub.add_parser("quantile", help="critical values of the null law")
    q.add_argument("--s", type=int, nargs="+", required=True)
    q.add_argument("--alpha", type=float, nargs="+", required=True)
    q.add_argument("--method", choices=("cf-inversion", "monte-carlo"), default="cf-inversion")
    q.add_argument("--draws", type=int, default=1_000_000, help="Monte Carlo draws")
    q.add_argument("--seed", type=int, default=1, help="Monte Carlo seed")
    q.set_defaults(func=cmd_quantile)

    b = sub.add_parser("table", help="Monte Carlo rejection-rate table")
    b.add_argument("--config", required=True, help="JSON file or bundled name such as table1-desk")
    b.add_argument("--out", required=True, help="CSV output path")
    b.add_argument("--replications", type=int)
    b.add_argument("--workers", type=int)
    b.add_argument("--seed", type=int, help="master seed")
    b.add_argument("--budget", type=float, help="per-cell time budget in seconds")
    b.add_argument("-v", "--verbose", action="store_true")
    b.set_defaults(func=cmd_table)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _say(f"nonstat: error: {exc}")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.cache_dir:
        os.environ["NONSTAT_CACHE_DIR"] = args.cache_dir
    try:
        return args.func(args)
    except DegenerateSeries as exc:
        _say(f"nonstat: degenerate series: {exc}")
        return EXIT_USAGE
    except ValueError as exc:
        _say(f"nonstat: invalid input: {exc}")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        _say(f"nonstat: {exc}")
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        _say(f"nonstat: {type(exc).__name__}: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
