"""
Carnot Conformal
Commands - CLI command classes dan argparse entry point
"""

import argparse
import sys
from pathlib import Path

from pydantic import ValidationError

from .algebra import validate
from .algebra_schema import algebra_from_file, algebra_to_file, dump_algebra_file, load_algebra_file
from .catalog import (
    SELF_TEST,
    catalog_build,
    expected_verdict,
    get_entry,
    get_entry_summary,
    parse_params,
    search_entries,
)
from .config import Settings
from .derivations import DerivationKind, conf_derivations, iso_derivations, strata_preserving_derivations
from .errors import CarnotError, DegreeCapExceededError
from .metric import h_type_constant, induced_metric
from .prolong import prolong
from .report_schema import (
    CatalogEntryReport,
    CatalogReport,
    DerivationReport,
    MetricReport,
    ProlongationReport,
    SelfTestReport,
    SelfTestResult,
    Verdict,
)
from .reports import render
from .structure import classify
from .utils import configure_logging, format_matrix, format_rational, get_logger


log = get_logger("commands")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_DEGREE_CAP = 2
EXIT_USAGE = 64

_KIND_NAMES = {
    DerivationKind.STRATA_PRESERVING: "Der",
    DerivationKind.ISOMETRIC: "IsoDer",
    DerivationKind.CONFORMAL: "ConfDer",
}


class UsageError(Exception):
    """Bad command line"""


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; that code is reserved for the degree cap"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ============================================================================
# COMMANDS
# ============================================================================

class Command:
    """Base command: parse arguments, execute, report problems"""
    name = ""
    help = ""

    def __init__(self, settings, stdout, stderr):
        self.settings = settings
        self.stdout = stdout
        self.stderr = stderr

    @classmethod
    def add_arguments(cls, parser):
        pass

    def report(self, level, message):
        """Surface a problem; level is a set such as {'ERROR'} or {'WARNING'}"""
        if 'ERROR' in level:
            print(f"[Error] {message}", file=self.stderr)
        elif 'WARNING' in level:
            print(f"[Warning] {message}", file=self.stderr)
        else:
            log.info(message)

    def emit(self, report):
        print(render(report, self.settings.output_format), file=self.stdout)

    def read(self, path):
        """Parsed algebra file, or None after reporting every problem with its location"""
        try:
            return load_algebra_file(path)
        except OSError as exc:
            self.report({'ERROR'}, f"cannot read {path}: {exc}")
        except ValidationError as exc:
            for problem in exc.errors():
                location = ".".join(str(x) for x in problem["loc"]) or "<root>"
                self.report({'ERROR'}, f"{path}: {location}: {problem['msg']}")
        return None

    def load(self, path):
        """
        Algebra dari file, validated

        Returns:
            StratifiedAlgebra | None: None after reporting a malformed or invalid file
        """
        document = self.read(path)
        if document is None:
            return None
        alg = algebra_from_file(document)
        check = validate(alg, allow_small=self.settings.allow_small)
        if not check.valid:
            self.emit(check)
            self.report({'ERROR'}, f"{path} is not a valid stratified Lie algebra")
            return None
        return alg

    def execute(self, args):
        raise NotImplementedError


class ValidateCommand(Command):
    name = "validate"
    help = "check the stratified Lie algebra axioms"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("file", help="algebra file (JSON)")

    def execute(self, args):
        document = self.read(args.file)
        if document is None:
            return EXIT_INVALID
        check = validate(algebra_from_file(document), allow_small=self.settings.allow_small)
        self.emit(check)
        return EXIT_OK if check.valid else EXIT_INVALID


class MetricCommand(Command):
    name = "metric"
    help = "canonical inner products on every layer"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("file", help="algebra file (JSON)")

    def execute(self, args):
        alg = self.load(args.file)
        if alg is None:
            return EXIT_INVALID
        metric = induced_metric(alg)
        lam = h_type_constant(alg, metric)
        self.emit(MetricReport(
            name=alg.name,
            layers=list(alg.layer_dims),
            grams=[format_matrix(metric.gram(j).matrix) for j in range(1, alg.step + 1)],
            h_type_constant=format_rational(lam) if lam is not None else None,
        ))
        return EXIT_OK


class DerivationsCommand(Command):
    name = "derivations"
    help = "Der, IsoDer or ConfDer"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("file", help="algebra file (JSON)")
        parser.add_argument("--kind", choices=["der", "iso", "conf"], default="der")

    def execute(self, args):
        alg = self.load(args.file)
        if alg is None:
            return EXIT_INVALID
        if args.kind == "der":
            space = strata_preserving_derivations(alg)
        elif args.kind == "iso":
            space = iso_derivations(alg, induced_metric(alg))
        else:
            space = conf_derivations(alg, induced_metric(alg))
        self.emit(DerivationReport(
            name=alg.name,
            kind=_KIND_NAMES[space.kind],
            dimension=space.dim,
            basis=[format_matrix(m) for m in space.matrices],
        ))
        return EXIT_OK


def prolongation_report(prol, g0_name):
    return ProlongationReport(
        name=prol.alg.name,
        g0=g0_name,
        g0_dim=prol.g0.dim,
        layer_dims={str(k): v for k, v in prol.layer_dims().items()},
        total_dim=prol.total_dim,
        truncated=prol.truncated,
        max_degree=prol.max_degree,
        conditional=prol.conditional,
    )


class ProlongCommand(Command):
    name = "prolong"
    help = "Tanaka prolongation Prol(g, g0)"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("file", help="algebra file (JSON)")
        parser.add_argument("--g0", choices=["conf", "der"], default="conf")
        parser.add_argument("--max-degree", type=int, default=None)

    def execute(self, args):
        alg = self.load(args.file)
        if alg is None:
            return EXIT_INVALID
        prol = prolong(alg, args.g0, max_degree=self.settings.max_degree)
        self.emit(prolongation_report(prol, args.g0))
        if prol.truncated:
            self.report({'WARNING'}, f"degree cap {prol.max_degree} exceeded; prolongation truncated")
            return EXIT_DEGREE_CAP
        return EXIT_OK


class ClassifyCommand(Command):
    name = "classify"
    help = "rigid / Iwasawa classification"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("file", help="algebra file (JSON)")
        parser.add_argument("--max-degree", type=int, default=None)

    def execute(self, args):
        alg = self.load(args.file)
        if alg is None:
            return EXIT_INVALID
        try:
            report = classify(alg, max_degree=self.settings.max_degree, allow_small=self.settings.allow_small)
        except DegreeCapExceededError as exc:
            if exc.prolongation is not None:
                self.emit(prolongation_report(exc.prolongation, "conf"))
            self.report({'ERROR'}, str(exc))
            return EXIT_DEGREE_CAP
        self.emit(report)
        return EXIT_OK if report.verdict != Verdict.INCONCLUSIVE else EXIT_INVALID


def _entry_report(entry_id, entry):
    alg = catalog_build(entry_id)
    return CatalogEntryReport(
        name=entry_id,
        params=entry["params"],
        layers=list(alg.layer_dims),
        expected=expected_verdict(entry_id),
        description=entry["description"],
    )


class CatalogCommand(Command):
    name = "catalog"
    help = "fixture catalog: list, show NAME, emit NAME, selftest"

    @classmethod
    def add_arguments(cls, parser):
        sub = parser.add_subparsers(dest="action", parser_class=_Parser)
        listing = sub.add_parser("list", help="list fixtures, optionally filtered")
        listing.add_argument("query", nargs="?", default=None, help="substring of name, description or tags")
        listing.add_argument("--tag", action="append", default=[], help="keep entries carrying this tag")
        show = sub.add_parser("show", help="describe one fixture")
        show.add_argument("entry", help="catalog name")
        emit = sub.add_parser("emit", help="write a fixture as an algebra file")
        emit.add_argument("entry", help="catalog name")
        emit.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
        emit.add_argument("-o", "--output", default=None, help="output path (stdout when omitted)")
        sub.add_parser("selftest", help="classify every self-test fixture")

    def execute(self, args):
        if args.action == "list":
            return self.list_entries(args.query, args.tag)
        if args.action == "show":
            return self.show_entry(args.entry)
        if args.action == "emit":
            return self.emit_entry(args)
        if args.action == "selftest":
            return self.selftest()
        raise UsageError("catalog needs one of: list, show NAME, emit NAME, selftest")

    def list_entries(self, query=None, tags=None):
        matches = search_entries(query, tags or None)
        if not matches:
            self.report({'WARNING'}, "no catalog entry matches")
        self.emit(CatalogReport(entries=[_entry_report(entry_id, entry) for entry_id, entry in matches]))
        return EXIT_OK

    def show_entry(self, name):
        entry = get_entry(name)
        if self.settings.output_format == "json":
            self.emit(CatalogReport(entries=[_entry_report(name, entry)]))
        else:
            print(get_entry_summary(name), file=self.stdout)
        return EXIT_OK

    def emit_entry(self, args):
        alg = catalog_build(args.entry, parse_params(args.param))
        text = dump_algebra_file(algebra_to_file(alg))
        if args.output:
            Path(args.output).write_text(text + "\n", encoding="utf-8")
            self.report({'INFO'}, f"wrote {alg.name} to {args.output}")
        else:
            print(text, file=self.stdout)
        return EXIT_OK

    def selftest(self):
        results = []
        for entry_id, params in SELF_TEST:
            alg = catalog_build(entry_id, params)
            report = classify(alg, max_degree=self.settings.max_degree)
            expected = expected_verdict(entry_id, params)
            results.append(SelfTestResult(
                name=entry_id,
                params=params,
                expected=expected,
                verdict=report.verdict,
                total_dim=report.total_dim,
                ok=report.verdict == expected,
            ))
        summary = SelfTestReport(results=results, passed=all(r.ok for r in results))
        self.emit(summary)
        return EXIT_OK if summary.passed else EXIT_INVALID


COMMANDS = [
    ValidateCommand,
    MetricCommand,
    DerivationsCommand,
    ProlongCommand,
    ClassifyCommand,
    CatalogCommand,
]


def build_parser():
    parser = _Parser(
        prog="carnot-conformal",
        description="Stratified Lie algebras: canonical metrics, derivations, Tanaka prolongation, classification",
    )
    parser.add_argument("--format", choices=["text", "json"], default=None, help="report format")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("--allow-small", action="store_true", default=None,
                        help="accept dimension < 3 (outside paper scope)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for command in COMMANDS:
        command.add_arguments(sub.add_parser(command.name, help=command.help))
    return parser


def main(argv=None, stdout=None, stderr=None):
    """
    Run one CLI command

    Returns:
        int: 0 success, 1 invalid input, 2 degree cap exceeded, 64 usage error
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=stderr)
        print(str(exc), file=stderr)
        return EXIT_USAGE
    if args.command is None:
        print(parser.format_help().rstrip(), file=stderr)
        return EXIT_USAGE

    try:
        settings = Settings.from_env(
            max_degree=getattr(args, "max_degree", None),
            output_format=args.format,
            log_level="DEBUG" if args.verbose else None,
            allow_small=args.allow_small,
        )
    except ValidationError as exc:
        for problem in exc.errors():
            print(f"[Settings] {problem['loc'][0]}: {problem['msg']}", file=stderr)
        return EXIT_USAGE
    configure_logging(settings.log_level, stderr)
    command_class = next(c for c in COMMANDS if c.name == args.command)
    command = command_class(settings, stdout, stderr)
    try:
        return command.execute(args)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE
    except (CarnotError, ValueError) as exc:
        command.report({'ERROR'}, str(exc))
        return EXIT_INVALID
