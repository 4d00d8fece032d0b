import os
import sys
import logging
import argparse

import numpy
import sympy
from termcolor import colored

from . import exceptions
from .core import CHECKS, DEFAULT_CHECKS, Pipeline
from .presentation import BUILTIN_NAMES
from ._version import __version__


LEVEL_COLORS = {
    "DEBUG": "blue",
    "INFO": "cyan",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "red",
}


class LevelColorFormatter(logging.Formatter):
    def format(self, record):
        message = super().format(record)
        color = LEVEL_COLORS.get(record.levelname)
        if color is None:
            return message
        return colored(record.levelname.lower(), color) + ": " + message


def configure_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(LevelColorFormatter("%(name)s: %(message)s"))
    root = logging.getLogger("ncgraded")
    root.handlers = [handler]
    root.setLevel(level)
    root.propagate = False


def main(argv=None):

    argv = (argv or sys.argv)[1:]

    # -h is the homological bound, so help is --help only
    parser = argparse.ArgumentParser(
        usage="%(prog)s (--builtin NAME | --input FILE) [options]",
        description="Homological invariants of connected graded algebras",
        add_help=False,
    )
    parser.add_argument("--help", action="help", help="show this help message and exit")
    parser.add_argument(
        "--version", action="version", version="%(prog)s " + __version__
    )

    source = parser.add_mutually_exclusive_group()
    source.add_argument(
        "--builtin",
        dest="builtin",
        type=str,
        default=None,
        help="builtin algebra, see --list-builtins",
    )
    source.add_argument(
        "--input",
        dest="input",
        type=str,
        default=None,
        help="file with an algebra presentation",
    )

    parser.add_argument(
        "--list-builtins",
        action="store_true",
        dest="list_builtins",
        help="list the builtin algebras and exit",
    )

    parser.add_argument(
        "--field",
        dest="field",
        type=str,
        default=os.environ.get("NCGRADED_FIELD", None),
        help="base field, Q or F<p> (default: the input's own field, F32003 for builtins)",
    )

    parser.add_argument(
        "-d",
        "--degree-bound",
        dest="degree_bound",
        type=int,
        default=8,
        help="internal degree bound (default %(default)s)",
    )

    parser.add_argument(
        "-h",
        "--homological-bound",
        dest="homological_bound",
        type=int,
        default=5,
        help="homological degree bound (default %(default)s)",
    )

    parser.add_argument(
        "--check",
        dest="checks",
        type=str,
        default=DEFAULT_CHECKS,
        help="comma separated checks among {0} (default %(default)s)".format(", ".join(CHECKS)),
    )

    parser.add_argument(
        "--claim",
        dest="claim",
        type=str,
        default=None,
        help="claimed Hilbert series as a rational function of t, e.g. '1/(1-t)^4'",
    )

    parser.add_argument(
        "--json",
        dest="json",
        type=str,
        default=None,
        help="write the JSON report to PATH ('-' for standard output)",
    )

    parser.add_argument(
        "--expect",
        dest="expect",
        type=str,
        default=None,
        help="JSON file of expected report fields; any difference exits with 1",
    )

    parser.add_argument(
        "-q",
        "--query",
        action="store",
        dest="query",
        help="JMESPath query to use in filtering the JSON report",
    )

    parser.add_argument(
        "--seed",
        dest="seed",
        type=int,
        default=0,
        help="seed of the randomized self checks (default %(default)s)",
    )

    parser.add_argument(
        "--scan-prime",
        dest="scan_prime",
        type=int,
        default=2,
        help="prime field of the normal element scan (default %(default)s)",
    )

    parser.add_argument(
        "--scan-degree",
        dest="scan_degree",
        type=int,
        default=3,
        help="top degree of the normal element scan (default %(default)s)",
    )

    parser.add_argument(
        "--color",
        choices=["never", "always", "auto"],
        metavar="WHEN",
        default="auto",
        help=(
            "When to color output. WHEN can be 'auto' "
            "(default if omitted), 'never', or "
            "'always'. With --color=auto, output is "
            "colored only when standard output is "
            "connected to a terminal."
        ),
    )

    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        dest="verbosity",
        default=0,
        help="log progress (-vv for debugging detail)",
    )

    # Parse input
    options, _ = parser.parse_known_args(argv)

    if options.list_builtins:
        sys.stdout.write("\n".join(BUILTIN_NAMES) + "\n")
        return 0

    configure_logging(options.verbosity)

    try:
        pipeline = Pipeline(**vars(options))
        if pipeline.config.input is None:
            parser.print_help()
            return 2
        return pipeline.run()
    except exceptions.BaseNCGradedException as exc:
        sys.stderr.write(colored("{0}\n".format(exc.hint()), "red"))
        return exc.code
    except Exception:
        import platform
        import traceback

        sys.stderr.write("\n")
        sys.stderr.write(
            "\nYou've found a bug! Please, raise an issue attaching the following traceback\n"
        )
        sys.stderr.write("\n")

        issue_info = "\n".join(
            (
                f"Version:       {__version__}",
                f"Python:        {sys.version}",
                f"numpy version: {numpy.__version__}",
                f"sympy version: {sympy.__version__}",
                f"Platform:      {platform.platform()}",
                f"Args:          {sys.argv}",
                f"Config:        {vars(options)}",
                "",
                traceback.format_exc(),
            )
        )
        sys.stderr.write(issue_info + "\n")
        return 1
