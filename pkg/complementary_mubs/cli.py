"""
complementary-mubs command line.

Data goes to stdout (or --out), diagnostics to stderr. Exit codes:
0 success, 2 invalid decomposition, 3 bound not met, 4 no unbiased witness,
1 construction errors, 64 usage errors, 65 unreadable or unsupported files.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .analysis import (
    WITNESS_THRESHOLD,
    Verdict,
    extract_mub_family,
    factor_span_bound,
    masa_span_bound,
    unbiased_vector_search,
)
from .certify import CertifySession, PipelineConfig, verify_external
from .constructions import DEFAULT_ATTEMPT_BUDGET, Family, recombine_extension
from .errors import ComplementarityError, ParseError, VersionMismatch
from .serialization import (
    FORMAT_VERSION,
    build_metadata,
    certificate_to_dict,
    parse_decomposition,
    parse_mub_family,
    read_text,
    search_result_to_dict,
    serialize_decomposition,
    serialize_mub_family,
    write_text,
)
from .utils import configure_logging, int_rows
from .weyl import DEFAULT_TOLERANCE

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_BOUND_NOT_MET = 3
EXIT_NO_WITNESS = 4
EXIT_USAGE = 64
EXIT_DATA = 65

VERDICT_EXIT_CODES = {
    Verdict.STRONGLY_UNEXTENDIBLE: EXIT_OK,
    Verdict.BOUND_NOT_MET: EXIT_BOUND_NOT_MET,
    Verdict.INVALID: EXIT_INVALID,
}


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_flags():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="More logging (repeatable)")
    common.add_argument("-q", "--quiet", action="store_true", help="Errors only")
    common.add_argument("--json", action="store_true", help="Print a single JSON document")
    common.add_argument("--workers", type=int, default=1, help="Worker threads for parallel stages")
    return common


def build_parser():
    common = _common_flags()
    parser = CliParser(prog="complementary-mubs",
                       description="Complementary decompositions of M_p (x) M_p and their MUBs")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("decompose", parents=[common], help="Build a decomposition file")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--family", choices=[Family.GALOIS.value, Family.AB.value], required=True)
    p.add_argument("--non-residue", type=int, default=None, dest="nonresidue")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attempt-budget", type=int, default=DEFAULT_ATTEMPT_BUDGET)
    p.add_argument("--out", default=None)

    p = commands.add_parser("verify", parents=[common], help="Re-verify a decomposition file")
    p.add_argument("file")
    p.add_argument("--numeric", action="store_true")
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)

    p = commands.add_parser("certify", parents=[common], help="Strong-unextendibility verdict")
    p.add_argument("file")
    p.add_argument("--numeric", action="store_true")
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)

    p = commands.add_parser("mubs", parents=[common], help="Extract MUB vectors from the MASAs")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)

    p = commands.add_parser("extend", parents=[common], help="Recombined MASAs for p = 1 (mod 4)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--non-residue", type=int, default=None, dest="nonresidue")

    p = commands.add_parser("search-unbiased", parents=[common], help="Look for a vector unbiased to a family")
    p.add_argument("file")
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--stop-below", type=float, default=None)

    p = commands.add_parser("bounds", parents=[common], help="Span bounds for M_d (x) M_n")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    return parser


def _emit(args, document, lines):
    if args.json:
        print(json.dumps(document, indent=2))
    else:
        for line in lines:
            print(line)


def _report_lines(report):
    lines = [
        f"p: {report.p}",
        f"family: {report.family}",
        f"subalgebras: {report.subalgebra_count}",
        f"factors: {report.factor_count} (bound {report.bound_required})",
        f"verdict: {report.verdict.value}",
    ]
    lines += [f"residual {name}: {value:.3e}" for name, value in sorted(report.residuals.items())]
    lines += [f"failure: {failure}" for failure in report.failures]
    lines += [f"note: {note}" for note in report.notes]
    return lines


def _load_decomposition(path):
    return parse_decomposition(read_text(path)).decomposition


# --- Commands ---

def cmd_decompose(args):
    config = PipelineConfig(args.p, Family(args.family), nonresidue=args.nonresidue, seed=args.seed,
                            numeric=False, attempt_budget=args.attempt_budget, workers=args.workers)
    decomposition = CertifySession(config).decompose()
    metadata = build_metadata(seed=args.seed, notes=decomposition.notes)
    if args.out:
        write_text(args.out, serialize_decomposition(decomposition, metadata))
        _emit(args, {"format_version": FORMAT_VERSION, "out": args.out, "p": decomposition.p,
                     "subalgebras": len(decomposition.subalgebras), "seed": args.seed},
              [f"wrote {len(decomposition.subalgebras)} subalgebras to {args.out} (seed {args.seed})"])
    else:
        print(serialize_decomposition(decomposition, metadata), end="")
    return EXIT_OK


def cmd_verify(args):
    report = verify_external(_load_decomposition(args.file), numeric=args.numeric, tol=args.tol,
                             workers=args.workers)
    _emit(args, certificate_to_dict(report), _report_lines(report))
    return EXIT_INVALID if report.verdict is Verdict.INVALID else EXIT_OK


def cmd_certify(args):
    report = verify_external(_load_decomposition(args.file), numeric=args.numeric, tol=args.tol,
                             workers=args.workers)
    _emit(args, certificate_to_dict(report), _report_lines(report))
    return VERDICT_EXIT_CODES[report.verdict]


def cmd_mubs(args):
    family = extract_mub_family(_load_decomposition(args.file), seed=args.seed, workers=args.workers)
    write_text(args.out, serialize_mub_family(family))
    _emit(args, {"format_version": FORMAT_VERSION, "out": args.out, "bases": len(family), "seed": args.seed},
          [f"wrote {len(family)} bases of dimension {family.dimension} to {args.out} (seed {args.seed})"])
    return EXIT_OK


def cmd_extend(args):
    subspaces = recombine_extension(args.p, args.nonresidue)
    _emit(args, {"format_version": FORMAT_VERSION, "p": args.p,
                 "subspaces": [int_rows(S.basis) for S in subspaces]},
          [repr(S) for S in subspaces])
    return EXIT_OK


def cmd_search_unbiased(args):
    family = parse_mub_family(read_text(args.file))
    result = unbiased_vector_search(family, restarts=args.restarts, seed=args.seed, iterations=args.iterations,
                                    stop_below=args.stop_below, workers=args.workers)
    _emit(args, search_result_to_dict(result),
          [f"best residual: {result.best_residual:.3e}",
           f"restarts: {result.evaluated} of {result.restarts}",
           f"seed: {result.seed}",
           f"witness: {'yes' if result.witness_found else 'no'} (threshold {WITNESS_THRESHOLD:g})"])
    return EXIT_OK if result.witness_found else EXIT_NO_WITNESS


def cmd_bounds(args):
    k, m = factor_span_bound(args.d, args.n), masa_span_bound(args.n)
    _emit(args, {"d": args.d, "n": args.n, "factor_span_bound": k, "masa_span_bound": m},
          [f"factor_span_bound: {k}", f"masa_span_bound: {m}"])
    return EXIT_OK


COMMANDS = {
    "decompose": cmd_decompose,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "mubs": cmd_mubs,
    "extend": cmd_extend,
    "search-unbiased": cmd_search_unbiased,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging(args.verbose)
    if args.quiet:
        logging.getLogger("complementary_mubs").setLevel(logging.ERROR)

    try:
        return COMMANDS[args.command](args)
    except (ParseError, VersionMismatch) as e:
        logger.error(str(e))
        return EXIT_DATA
    except (ComplementarityError, ValueError, OSError) as e:
        logger.error(str(e))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
