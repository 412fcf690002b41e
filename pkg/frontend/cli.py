import argparse
import contextlib
import csv
import logging
import sys

import msgspec

from core.catalog import SUITES, CatalogHandler
from core.errors import ConfigError, RankforgeError, UnknownIdentity, UnknownSeries
from core.identities import Verifier
from core.mock import MOCK_THETA, REPRESENTATIONS, THEOREM_CHECKS, hm_representation_check, mock_series, theorem_5x_check
from core.modular import verify_level100
from core.oracle import CONVENTIONS, ODD_SIGNS, enumerate_overpartitions, m2_rank, rank_counts_fast
from core.products import eta_series
from core.series import fraction_text
from core.settings import RunConfig, Settings
from core.suite import prepare, run_suite

logger = logging.getLogger("rankforge")

USAGE_ERRORS = (ConfigError, UnknownIdentity, UnknownSeries)


@contextlib.contextmanager
def open_output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            yield f


def _json_line(out, value):
    out.write(msgspec.json.encode(value).decode() + "\n")


def _flags(args):
    chi = getattr(args, "chi", None)
    odd_sign = getattr(args, "odd_sign", None)
    if (chi is None) != (odd_sign is None):
        raise ConfigError("--chi and --odd-sign must be given together")
    return chi or "a", odd_sign or "plus"


def cmd_verify(args, settings):
    config = RunConfig(
        suite=args.suite,
        order=args.order if args.order is not None else settings.order,
        chi=args.chi,
        odd_sign=args.odd_sign,
        format=args.format,
        parallel=args.parallel or settings.parallel,
        output=args.output,
    ).validate()
    catalog = CatalogHandler(settings.assets)
    for identity_id in args.id or []:
        catalog.identity_converter(identity_id)

    verifier, header = prepare(config, settings, catalog)
    with open_output(config.output) as out:
        if config.format == "json":
            _json_line(out, header)
        else:
            out.write(header.to_text() + "\n")

        def emit(report):
            if config.format == "json":
                _json_line(out, report)
            else:
                out.write(report.to_text() + "\n")
            out.flush()

        if args.id:
            reports = [verifier.verify(identity_id, config.order) for identity_id in args.id]
            for report in reports:
                emit(report)
            return 0 if all(r.ok for r in reports) else 1

        summary = run_suite(verifier, config.suite, config.order, config.parallel, emit)
        if config.format == "json":
            _json_line(out, summary)
        else:
            out.write(summary.to_text() + "\n")
    return 0 if summary.ok else 1


def cmd_table(args, settings):
    if args.modulus < 1:
        raise ConfigError(f"modulus must be positive, got {args.modulus}")
    if args.max < 0:
        raise ConfigError(f"--max must be nonnegative, got {args.max}")
    convention, odd_sign = _flags(args)
    table = rank_counts_fast(args.max, convention, odd_sign)
    with open_output(args.output) as out:
        if args.format == "csv":
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(["n", "s", "count"])
            writer.writerows(table.residue_rows(args.modulus))
        else:
            rows = [[table.residue(s, args.modulus, n) for s in range(args.modulus)] for n in range(args.max + 1)]
            _json_line(out, {"modulus": args.modulus, "max_n": args.max, "convention": convention,
                             "odd_sign": odd_sign, "rows": rows})
    return 0


def _named_series(name, n, settings):
    if name in MOCK_THETA:
        return mock_series(name, n)
    return Verifier(CatalogHandler(settings.assets), settings.table_max).evaluate_name(name, n)


def _print_series(series, fmt, out):
    if fmt == "json":
        out.write(series.to_json().decode() + "\n")
    elif fmt == "list":
        out.write(",".join(str(c) for c in series.coeffs) + "\n")
    else:
        out.write(series.to_text() + "\n")


def cmd_series(args, settings):
    if args.eta is not None:
        return _eta_series(args)
    series = _named_series(args.name, args.order, settings)
    with open_output(args.output) as out:
        _print_series(series.truncate(args.order), args.format, out)
    return 0


def _eta_series(args):
    try:
        delta, g = (int(x) for x in args.eta.split(","))
    except ValueError:
        raise ConfigError(f"--eta takes DELTA,G, got {args.eta!r}")
    if delta < 1 or not 0 <= g <= delta:
        raise ConfigError(f"--eta needs delta >= 1 and 0 <= g <= delta, got {args.eta}")
    prefix, body = eta_series(delta, g, args.order)
    with open_output(args.output) as out:
        if args.format == "json":
            _json_line(out, {"prefix": fraction_text(prefix), "body": body.to_payload()})
        elif args.format == "list":
            out.write(",".join(str(c) for c in body.coeffs) + "\n")
        else:
            out.write(f"q^({fraction_text(prefix)}) * ({body.to_text()})\n")
    return 0


def cmd_dissect(args, settings):
    if args.mod < 1 or not 0 <= args.res < args.mod:
        raise ConfigError(f"need --mod >= 1 and 0 <= --res < --mod, got {args.mod}, {args.res}")
    series = _named_series(args.name, args.mod * args.order + args.res, settings)
    with open_output(args.output) as out:
        _print_series(series.dissect(args.mod, args.res).truncate(args.order), args.format, out)
    return 0


def cmd_oracle(args, settings):
    convention, odd_sign = _flags(args)
    if args.table is not None:
        if args.table < 0:
            raise ConfigError(f"--table must be nonnegative, got {args.table}")
        table = rank_counts_fast(args.table, convention, odd_sign)
        with open_output(args.output) as out:
            if args.format == "json":
                _json_line(out, table.as_dict())
            else:
                writer = csv.writer(out, lineterminator="\n")
                writer.writerow(["n", "m", "count"])
                writer.writerows(table.cells())
        return 0
    if args.max_n < 0:
        raise ConfigError(f"--max-n must be nonnegative, got {args.max_n}")
    with open_output(args.output) as out:
        for n in range(args.max_n + 1):
            for op in enumerate_overpartitions(n):
                rank = m2_rank(op, convention, odd_sign)
                if args.format == "json":
                    _json_line(out, {"n": n, "parts": op.parts, "rank": rank})
                else:
                    out.write(f"{n}\t{op}\t{rank}\n")
    return 0


def cmd_modular(args, settings):
    report = verify_level100(args.which, args.margin, CatalogHandler(settings.assets))
    print(report.to_text() if args.format == "text" else msgspec.json.encode(report).decode())
    return 0 if report.ok else 1


def cmd_mock(args, settings):
    verifier = Verifier(CatalogHandler(settings.assets), settings.table_max)
    if args.theorem:
        reports = theorem_5x_check(args.theorem, args.order, verifier)
    else:
        reports = [hm_representation_check(args.name, args.order, verifier)]
    for report in reports:
        print(report.to_text() if args.format == "text" else msgspec.json.encode(report).decode())
    return 0 if all(r.ok for r in reports) else 1


def _add_rank_flags(parser):
    parser.add_argument("--chi", choices=CONVENTIONS, help="force the chi convention")
    parser.add_argument("--odd-sign", choices=ODD_SIGNS, help="force the sign of the odd-part count")


def build_parser():
    parser = argparse.ArgumentParser(prog="rankforge", description="M2-rank tables and q-series identity checks")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="verify catalog identities")
    verify.add_argument("--suite", default="all", help=f"all or one of {', '.join(SUITES)}")
    verify.add_argument("--id", action="append", help="verify only this identity (repeatable)")
    verify.add_argument("--order", type=int)
    verify.add_argument("--format", choices=("text", "json"), default="text")
    verify.add_argument("--parallel", type=int)
    verify.add_argument("--output")
    _add_rank_flags(verify)
    verify.set_defaults(handler=cmd_verify)

    table = sub.add_parser("table", help="M2-rank residue counts")
    table.add_argument("--modulus", type=int, required=True)
    table.add_argument("--max", type=int, required=True)
    table.add_argument("--format", choices=("csv", "json"), default="csv")
    table.add_argument("--output")
    _add_rank_flags(table)
    table.set_defaults(handler=cmd_table)

    for name, handler in (("series", cmd_series), ("dissect", cmd_dissect)):
        p = sub.add_parser(name, help=f"print a named series{' slice' if name == 'dissect' else ''}")
        if name == "series":
            which = p.add_mutually_exclusive_group(required=True)
            which.add_argument("--name")
            which.add_argument("--eta", help="generalized eta function DELTA,G, printed as prefix and body")
        else:
            p.add_argument("--name", required=True)
        p.add_argument("--order", type=int, default=20)
        p.add_argument("--format", choices=("text", "list", "json"), default="text")
        p.add_argument("--output")
        if name == "dissect":
            p.add_argument("--mod", type=int, required=True)
            p.add_argument("--res", type=int, required=True)
        p.set_defaults(handler=handler)

    oracle = sub.add_parser("oracle", help="list overpartitions with their M2-rank, or the full rank table")
    what = oracle.add_mutually_exclusive_group(required=True)
    what.add_argument("--max-n", type=int, help="list every overpartition up to this weight")
    what.add_argument("--table", type=int, help="count overpartitions by weight and rank up to this weight")
    oracle.add_argument("--format", choices=("text", "csv", "json"), default="text",
                        help="tables are written as csv unless json is asked for")
    oracle.add_argument("--output")
    _add_rank_flags(oracle)
    oracle.set_defaults(handler=cmd_oracle)

    modular = sub.add_parser("modular", help="check a level 100 eta-quotient identity")
    modular.add_argument("--which", choices=("lemma3.5", "lemma3.6"), required=True)
    modular.add_argument("--margin", type=int, default=60)
    modular.add_argument("--format", choices=("text", "json"), default="text")
    modular.set_defaults(handler=cmd_modular)

    mock = sub.add_parser("mock", help="check a mock theta representation or theorem")
    group = mock.add_mutually_exclusive_group(required=True)
    group.add_argument("--name", choices=sorted(REPRESENTATIONS))
    group.add_argument("--theorem", choices=sorted(THEOREM_CHECKS))
    mock.add_argument("--order", type=int, default=60)
    mock.add_argument("--format", choices=("text", "json"), default="text")
    mock.set_defaults(handler=cmd_mock)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        settings = Settings.from_env()
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else settings.log_level,
                        format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.handler(args, settings)
    except USAGE_ERRORS as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    except RankforgeError as e:
        logger.error("❌ %s: %s", type(e).__name__, e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
