"""
Command-line interface for bessel-rkbs
Predicate checks, kernel evaluation and the verification suites with JSON/CSV output
"""
import io
import sys
import argparse
from pathlib import Path

from admissibility import (Exponent, SpaceParams, condition_table, embedding_check,
                           format_rational, kernel_interval, norming_check, norming_kernel,
                           norming_partner, parse_query, parse_rational, rkbs_pair_check,
                           self_pair_check, self_pair_interval, sequence_norming_check,
                           sequence_pair_check, sequence_self_pair_check)
from config import Config
from experiments import SUITES, run_all, run_suite
from reports import ReportStore, dumps, write_field_csv, write_observations
from specfun import RadialKernelSpec, bessel_kernel, near_field_class
from spectral import GridSpec, kernel_section
from utils import ConfigurationError, DomainError, Logger

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT_ERROR = 2

OBSERVATION_COLUMNS = {
    "reproducing": ["x", "error"],
    "integrability": ["d", "s", "p", "analytic", "empirical"],
    "blowup-dilation": ["R", "norm"],
    "blowup-rescaled": ["n", "norm"],
    "blowup-mollifier": ["eps", "norm"],
    "young": ["q", "fields", "violations", "max_ratio"],
    "norming": ["max_relative_difference", "min_bank_ratio", "perturbed_gap"],
}


class Colors:
    """ANSI color codes for --pretty output"""
    HEADER = '\033[95m'
    OKGREEN = '\033[92m'
    WARNING = '\033[93m'
    FAIL = '\033[91m'
    ENDC = '\033[0m'
    BOLD = '\033[1m'


def _paint(text, color, enabled):
    return f"{color}{text}{Colors.ENDC}" if enabled else text


def _dimension(text):
    value = parse_rational(text)
    if value.denominator != 1 or value < 1:
        raise DomainError(f"dimension must be a positive integer, got {text}")
    return int(value)


def _numeric(text):
    """Decimal-tolerant parse for numeric commands"""
    return parse_rational(text, allow_decimal=True)


def _radii(values):
    radii = []
    for value in values:
        radii.extend(part for part in value.split(",") if part.strip())
    return [float(_numeric(r)) for r in radii]


def _render_table(headers, rows):
    table = [list(map(str, headers))] + [[str(cell) for cell in row] for row in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
             for row in table]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)


def _render_mapping(data, color):
    lines = []
    for key in sorted(data):
        value = data[key]
        if isinstance(value, (dict, list)):
            value = dumps(value)
        lines.append(f"{_paint(key, Colors.BOLD, color)}: {value}")
    return "\n".join(lines)


def _write(args, text):
    """Send text to --output when given, else stdout"""
    if args.output:
        path = Path(args.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        print(text)


def _emit(args, payload, pretty_text=None, columns=None, rows=None):
    if args.format == "csv" and columns is not None:
        buffer = io.StringIO()
        write_observations(buffer, columns, rows or [])
        _write(args, buffer.getvalue())
    elif args.pretty and pretty_text is not None:
        _write(args, pretty_text)
    else:
        _write(args, dumps(payload, pretty=args.pretty))


def _verdict_text(verdict, color):
    rows = []
    for condition, status, expression in condition_table(verdict):
        tint = Colors.OKGREEN if status.startswith("satisfied") and "required" not in status else Colors.FAIL
        rows.append((condition, _paint(status, tint, color), expression))
    headline = "admissible" if verdict.admissible else "not admissible"
    headline = _paint(headline, Colors.OKGREEN if verdict.admissible else Colors.FAIL, color)
    suffix = " (endpoint case)" if verdict.endpoint_case else ""
    return f"{headline}{suffix}\n" + _render_table(("condition", "status", "expression"), rows)


def cmd_check_pair(args, config, logger):
    query = parse_query({key: getattr(args, key) for key in ("d", "u", "p", "v", "q", "s")})
    verdict = rkbs_pair_check(query)
    _emit(args, verdict.to_dict(), _verdict_text(verdict, sys.stdout.isatty()))
    return EXIT_OK if verdict.admissible else EXIT_FAIL


def cmd_kernel_interval(args, config, logger):
    interval = kernel_interval(_dimension(args.d), parse_rational(args.u), parse_rational(args.v),
                               Exponent.parse(args.p), Exponent.parse(args.q))
    _emit(args, interval.to_dict(), f"s in {interval}" if not interval.empty
          else "empty: " + "; ".join(interval.reasons))
    return EXIT_FAIL if interval.empty else EXIT_OK


def cmd_eval_kernel(args, config, logger):
    d = _dimension(args.d)
    s = _numeric(args.s)
    if s <= 0:
        raise DomainError(f"kernel order must be positive, got {args.s}")
    spec = RadialKernelSpec(float(2 * s), d)

    if args.L is not None or args.n is not None or args.x is not None:
        if args.L is None or args.n is None:
            raise ValueError("a section needs both --L and --n")
        grid = GridSpec(d, int(_numeric(args.n)), float(_numeric(args.L)), budget=config.grid_budget)
        centre = [float(_numeric(c)) for c in (args.x or ["0"] * d)]
        section = kernel_section(float(s), centre if d > 1 else centre[0], grid, method=args.method)
        buffer = io.StringIO()
        write_field_csv(buffer, section)
        _write(args, buffer.getvalue())
        return EXIT_OK

    if not args.r:
        raise ValueError("eval-kernel needs -r radii or a section via --L/--n")
    radii = _radii(args.r)
    kind = near_field_class(spec)
    rows = []
    for r in radii:
        if r < 0:
            raise DomainError(f"radius must be >= 0, got {r}")
        if r == 0 and kind.is_singular:
            rows.append([r, "singular", str(kind)])
        else:
            rows.append([r, bessel_kernel(spec, r), str(kind)])

    columns = ["r", "kernel", "near_field_class"]
    if args.format == "json":
        payload = {"d": d, "s": format_rational(s), "kernel_order": format_rational(2 * s),
                   "values": [dict(zip(columns, row)) for row in rows]}
        _emit(args, payload, _render_table(columns, rows))
    elif args.pretty:
        _write(args, _render_table(columns, rows))
    else:
        buffer = io.StringIO()
        write_observations(buffer, columns, rows)
        _write(args, buffer.getvalue())
    return EXIT_OK


def _suite_params(args):
    params = {}
    if args.d is not None:
        params["d"] = _dimension(args.d)
    for key in ("u", "v", "s"):
        if getattr(args, key) is not None:
            params[key] = _numeric(getattr(args, key))
    for key in ("p", "q"):
        if getattr(args, key) is not None:
            params[key] = Exponent.parse(getattr(args, key))
    if args.L is not None:
        params["L"] = float(_numeric(args.L))
    if args.n is not None:
        params["n"] = int(_numeric(args.n))
    if args.fields is not None:
        params["fields"] = int(args.fields)
    return params


def cmd_verify(args, config, logger):
    if not config.is_configured():
        raise ConfigurationError("GRID_BUDGET, MAX_WORKERS, REFERENCE_PERIOD and REFERENCE_POINTS "
                                 "do not describe a usable run")
    seed = args.seed if args.seed is not None else config.default_seed
    store = ReportStore(config.output_dir, logger)
    grids = {"budget": config.grid_budget, "reference": config.reference_grid(1)}

    if args.suite == "all":
        results = run_all(seed=seed, logger=logger, max_workers=args.workers or config.max_workers,
                          **grids)
    else:
        params = _suite_params(args)
        results = [run_suite(args.suite, params, seed=seed, logger=logger,
                             max_workers=args.workers or 1, **grids)]

    for result in results:
        store.save_report(result.suite, result.to_dict())
        if result.observations:
            store.save_observations(result.suite, OBSERVATION_COLUMNS[result.suite],
                                    result.observations)

    passed = all(result.passed for result in results)
    if args.suite == "all":
        payload = {"seed": seed, "passed": passed,
                   "suites": [{"suite": r.suite, "status": r.status} for r in results]}
        store.save_report("all", payload)
        columns, rows = ["suite", "status"], [[r.suite, r.status] for r in results]
    else:
        payload = results[0].to_dict()
        columns = OBSERVATION_COLUMNS[args.suite]
        rows = results[0].observations

    color = sys.stdout.isatty()
    tinted = [[r.suite, _paint(r.status, Colors.OKGREEN if r.passed else Colors.FAIL, color)]
              for r in results]
    _emit(args, payload, _render_table(("suite", "status"), tinted), columns, rows)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_check_space(args, config, logger):
    space = SpaceParams(_dimension(args.d), parse_rational(args.s), Exponent.parse(args.p))
    dual = space.dual()
    payload = {"space": space.to_dict(), "rkbs": space.is_rkbs(),
               "dual": dual.to_dict() if dual else None}
    _emit(args, payload, _render_mapping(payload, sys.stdout.isatty()))
    return EXIT_OK if space.is_rkbs() else EXIT_FAIL


def cmd_check_self_pair(args, config, logger):
    d, u, p = _dimension(args.d), parse_rational(args.u), Exponent.parse(args.p)
    interval = self_pair_interval(d, u, p)
    if args.s is None:
        _emit(args, {"interval": interval.to_dict()}, f"s in {interval}")
        return EXIT_FAIL if interval.empty else EXIT_OK
    verdict = self_pair_check(d, u, p, parse_rational(args.s))
    payload = {**verdict.to_dict(), "interval": interval.to_dict()}
    _emit(args, payload, _verdict_text(verdict, sys.stdout.isatty()))
    return EXIT_OK if verdict.admissible else EXIT_FAIL


def cmd_check_norming(args, config, logger):
    d, u, p = _dimension(args.d), parse_rational(args.u), Exponent.parse(args.p)
    if args.v is None and args.q is None:
        if args.s is None:
            raise ValueError("check-norming needs s, or v and q")
        partner = norming_partner(d, u, p, parse_rational(args.s))
        payload = {"mode": "partner", "applicable": partner is not None,
                   "v": format_rational(partner[0]) if partner else None,
                   "q": str(partner[1]) if partner else None}
        _emit(args, payload, _render_mapping(payload, sys.stdout.isatty()))
        return EXIT_OK if partner else EXIT_FAIL
    if args.v is None or args.q is None:
        raise ValueError("check-norming needs both v and q")
    v, q = parse_rational(args.v), Exponent.parse(args.q)
    if args.s is None:
        s = norming_kernel(d, u, p, v, q)
        payload = {"mode": "kernel", "applicable": s is not None,
                   "s": format_rational(s) if s is not None else None}
        _emit(args, payload, _render_mapping(payload, sys.stdout.isatty()))
        return EXIT_OK if s is not None else EXIT_FAIL
    result = norming_check(d, u, v, parse_rational(args.s), p, q)
    payload = {"mode": "check", "applicable": result is not None, "norming": result}
    _emit(args, payload, _render_mapping(payload, sys.stdout.isatty()))
    return EXIT_OK if result else EXIT_FAIL


def cmd_check_embedding(args, config, logger):
    result = embedding_check(_dimension(args.d), parse_rational(args.u), parse_rational(args.v),
                             Exponent.parse(args.p), Exponent.parse(args.q))
    payload = {"applicable": result is not None, "embeds": result}
    _emit(args, payload, _render_mapping(payload, sys.stdout.isatty()))
    return EXIT_OK if result else EXIT_FAIL


def cmd_check_sequence(args, config, logger):
    p, q = Exponent.parse(args.p), Exponent.parse(args.q)
    payload = {"p": str(p), "q": str(q), "pair": sequence_pair_check(p, q),
               "norming": sequence_norming_check(p, q),
               "self_pair_p": sequence_self_pair_check(p)}
    _emit(args, payload, _render_mapping(payload, sys.stdout.isatty()))
    return EXIT_OK if payload["pair"] else EXIT_FAIL


COMMANDS = {
    "check-pair": cmd_check_pair,
    "kernel-interval": cmd_kernel_interval,
    "eval-kernel": cmd_eval_kernel,
    "verify": cmd_verify,
    "check-space": cmd_check_space,
    "check-self-pair": cmd_check_self_pair,
    "check-norming": cmd_check_norming,
    "check-embedding": cmd_check_embedding,
    "check-sequence": cmd_check_sequence,
}


def _flag(parser, name, required=False, **kwargs):
    parser.add_argument(f"-{name}", f"--{name}", dest=name, required=required, **kwargs)


def build_parser():
    """Create the argument parser with one subcommand per entry of COMMANDS"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="human-readable table output")
    common.add_argument("--output", help="write the result to this path instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="machine output format")

    parser = argparse.ArgumentParser(prog="bessel-rkbs",
                                     description="RKBS pairs of Bessel potential spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    pair = sub.add_parser("check-pair", parents=[common], help="decide an RKBS pair")
    for name in ("d", "u", "p", "v", "q", "s"):
        _flag(pair, name, required=True)

    interval = sub.add_parser("kernel-interval", parents=[common], help="admissible kernel orders")
    for name in ("d", "u", "p", "v", "q"):
        _flag(interval, name, required=True)

    kernel = sub.add_parser("eval-kernel", parents=[common], help="evaluate K_s = G_2s")
    _flag(kernel, "d", required=True)
    _flag(kernel, "s", required=True)
    _flag(kernel, "r", nargs="+")
    kernel.add_argument("--L", dest="L")
    kernel.add_argument("--n", dest="n")
    kernel.add_argument("--x", dest="x", nargs="+")
    kernel.add_argument("--method", choices=("spectral", "radial"), default="radial")

    verify = sub.add_parser("verify", parents=[common], help="run verification suites")
    verify.add_argument("suite", choices=sorted(SUITES) + ["all"])
    for name in ("d", "u", "p", "v", "q", "s"):
        _flag(verify, name)
    verify.add_argument("--L", dest="L")
    verify.add_argument("--n", dest="n")
    verify.add_argument("--fields", type=int)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--workers", type=int)

    space = sub.add_parser("check-space", parents=[common], help="is H^{s,p} an RKBS")
    for name in ("d", "s", "p"):
        _flag(space, name, required=True)

    self_pair = sub.add_parser("check-self-pair", parents=[common], help="self-pair test")
    for name in ("d", "u", "p"):
        _flag(self_pair, name, required=True)
    _flag(self_pair, "s")

    norming = sub.add_parser("check-norming", parents=[common], help="norming pair test")
    for name in ("d", "u", "p"):
        _flag(norming, name, required=True)
    for name in ("v", "q", "s"):
        _flag(norming, name)

    embedding = sub.add_parser("check-embedding", parents=[common], help="H^{u,p} in H^{v,q}")
    for name in ("d", "u", "p", "v", "q"):
        _flag(embedding, name, required=True)

    sequence = sub.add_parser("check-sequence", parents=[common], help="sequence-space analogue")
    for name in ("p", "q"):
        _flag(sequence, name, required=True)

    return parser


def main(argv=None):
    """
    Run one command

    Args:
        argv (list): Arguments without the program name; sys.argv[1:] when None

    Returns:
        int: 0 ok, 1 failed or not applicable, 2 input error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT_ERROR if e.code else EXIT_OK

    config = Config()
    logger = Logger(config.log_dir, config.debug_mode)
    try:
        exit_code = COMMANDS[args.command](args, config, logger)
    except (ValueError, ZeroDivisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        logger.error(f"{args.command}: {e}")
        exit_code = EXIT_INPUT_ERROR
    logger.command(args.command, exit_code)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
