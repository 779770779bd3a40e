#!/usr/bin/env python3
"""
hopfring command line
=====================

Verbs:
- adem-reduce WORD        admissible normal form of a Dyer-Lashof word
- basis KIND              enumerate invariant / Dyer-Lashof bases per degree
- verify --suite NAME     run a verification suite and write a report

Exit codes: 0 pass, 1 check failure, 2 usage error, 3 budget overflow.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional
import argparse
import csv
import io
import json
import logging
import os
import sys

from .config import FORMATS, RunConfig, load_config
from .dyer_lashof import adem_reduce, basis_R, format_word, parse_word, word_degree, word_excess
from .errors import HopfRingError, ParseError, StringError, TruncationOverflow
from .invariants import basis_B, basis_coinv_dual, basis_cokernel, basis_invariants
from .suites import SUITE_ALIASES, SUITES, resolve_suite, run_suite

logger = logging.getLogger(__name__)

BASIS_KINDS = ('invariants', 'B', 'cokernel', 'R', 'coinv')

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_OVERFLOW = 0, 1, 2, 3


def _get_env(name: str, default: str = "") -> str:
    return os.getenv(name) or default


def setup_logging(verbose: bool) -> None:
    level = _get_env('HOPFRING_LOG_LEVEL', 'DEBUG' if verbose else 'INFO').upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text + ("" if text.endswith("\n") else "\n"))
        logger.info(f"Wrote {output}")
    else:
        print(text)


# -- adem-reduce ----------------------------------------------------------------

def cmd_adem_reduce(word: str, config: RunConfig, strategy: str = 'leftmost') -> str:
    """Normal form of a token word, with degree and per-term excess."""
    parsed = parse_word(word)
    result = adem_reduce(parsed, config.prime, strategy)
    degree = word_degree(parsed, config.prime)
    if config.format == 'json':
        data = result.to_dict()
        data.update({'word': format_word(parsed), 'degree': degree})
        for term in data['terms']:
            term['excess'] = word_excess(tuple(map(tuple, term['string'])), config.prime)
        return json.dumps(data, indent=2)
    if config.format == 'csv':
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(['word', 'prime', 'degree', 'term', 'coef', 'excess'])
        for w, c in result:
            writer.writerow([format_word(parsed), config.prime, degree, format_word(w), c,
                             word_excess(w, config.prime)])
        return buffer.getvalue()
    lines = [str(result), f"degree: {degree}"]
    for w, c in result:
        lines.append(f"  {format_word(w)}: coef {c}, excess {word_excess(w, config.prime)}")
    return "\n".join(lines)


# -- basis --------------------------------------------------------------------

def basis_rows(kind: str, n: int, k: Optional[int], degree: int, prime: int) -> List[Dict[str, Any]]:
    """One row (n, k, d, count, strings) per degree 0..degree."""
    if kind not in BASIS_KINDS:
        raise StringError(f"unknown basis kind {kind!r}; choose from {BASIS_KINDS}")
    if n < 1 or degree < 0 or (k is not None and k < 0):
        raise StringError(f"out-of-range parameters n={n}, k={k}, d={degree}")
    cutoff = 0 if k is None and kind in ('B', 'R') else k
    rows = []
    for d in range(degree + 1):
        if kind == 'invariants':
            items = basis_invariants(n, d, prime)
        elif kind == 'B':
            items = basis_B(n, cutoff, d, prime)
        elif kind == 'cokernel':
            items = basis_cokernel(n, d, prime)
        elif kind == 'R':
            items = basis_R(n, cutoff, d, prime)
        else:
            items = basis_coinv_dual(n, cutoff, d, prime)
        rows.append({'n': n, 'k': cutoff, 'd': d, 'count': len(items), 'strings': [str(s) for s in items]})
    return rows


def cmd_basis(kind: str, n: int, k: Optional[int], degree: int, config: RunConfig) -> str:
    rows = basis_rows(kind, n, k, degree, config.prime)
    if config.format == 'json':
        return json.dumps({'kind': kind, 'prime': config.prime, 'rows': rows}, indent=2)
    if config.format == 'csv':
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(['kind', 'n', 'k', 'd', 'count', 'strings'])
        for row in rows:
            writer.writerow([kind, row['n'], row['k'], row['d'], row['count'], ' ; '.join(row['strings'])])
        return buffer.getvalue()
    lines = [f"{kind} n={n} k={rows[0]['k'] if rows else k} p={config.prime}"]
    for row in rows:
        if row['count']:
            lines.append(f"  d={row['d']:<4} {row['count']:>4}  {', '.join(row['strings'])}")
    lines.append(f"total: {sum(row['count'] for row in rows)}")
    return "\n".join(lines)


# -- verify -------------------------------------------------------------------

def cmd_verify(config: RunConfig) -> int:
    report = run_suite(config)
    _emit(report.render(config.format), config.output)
    counts = report.counts()
    logger.info(f"{counts['pass']} passed, {counts['fail']} failed, {counts['skipped']} skipped, "
                f"{counts['overflow']} overflow; peak memory {report.peak_memory_mb} MB")
    return report.exit_code()


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, help="Odd prime p (default from config)")
    common.add_argument("--degree", type=int, help="Degree bound (degree_max)")
    common.add_argument("--format", choices=FORMATS, help="Output format")
    common.add_argument("--out", help="Write output to this path instead of stdout")
    common.add_argument("--profile", help="Named profile from settings.yaml")
    common.add_argument("--config", help="Path to settings.yaml")
    common.add_argument("--verbose", "-v", action="store_true", help="DEBUG logging")

    parser = argparse.ArgumentParser(prog="hopfring", description="Dickson-Mui invariants, the Dyer-Lashof "
                                     "algebra and the Hopf ring H_*QS^k at odd primes.")
    verbs = parser.add_subparsers(dest="verb", required=True)

    reduce_cmd = verbs.add_parser("adem-reduce", parents=[common], help="Admissible normal form of a word")
    reduce_cmd.add_argument("word", help='Tokens such as "Q5 Q1" or "bQ4 Q2"')
    reduce_cmd.add_argument("--strategy", choices=("leftmost", "rightmost"), default="leftmost")

    basis_cmd = verbs.add_parser("basis", parents=[common], help="Enumerate a basis per degree")
    basis_cmd.add_argument("kind", choices=BASIS_KINDS)
    basis_cmd.add_argument("--rank", type=int, default=1, help="Length / rank n")
    basis_cmd.add_argument("--cutoff", type=int, help="Excess cutoff k (B, R, coinv)")

    verify_cmd = verbs.add_parser("verify", parents=[common], help="Run a verification suite")
    verify_cmd.add_argument("--suite", choices=SUITES + tuple(SUITE_ALIASES), help="Suite name (default all)")
    verify_cmd.add_argument("--rank", type=int, help="rank_max")
    verify_cmd.add_argument("--seed", type=int, help="Seed for randomized suites")
    verify_cmd.add_argument("--jobs", type=int, help="Worker threads")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    overrides = {
        'prime': args.prime,
        'degree_max': args.degree,
        'format': args.format,
        'output': args.out,
        'suite': resolve_suite(args.suite) if getattr(args, 'suite', None) else None,
        'seed': getattr(args, 'seed', None),
        'jobs': getattr(args, 'jobs', None),
    }
    if args.verb == 'verify':
        overrides['rank_max'] = args.rank
    try:
        config = load_config(args.config, args.profile, overrides)
    except HopfRingError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE

    try:
        if args.verb == 'adem-reduce':
            _emit(cmd_adem_reduce(args.word, config, args.strategy), config.output)
            return EXIT_PASS
        if args.verb == 'basis':
            _emit(cmd_basis(args.kind, args.rank, args.cutoff, config.degree_max, config), config.output)
            return EXIT_PASS
        return cmd_verify(config)
    except ParseError as e:
        logger.error(f"Parse error at position {e.position}: {e}")
        return EXIT_USAGE
    except StringError as e:
        if args.verb == 'verify':
            logger.error(f"Suite aborted: {e}")
            return EXIT_FAIL
        logger.error(f"Invalid arguments: {e}")
        return EXIT_USAGE
    except TruncationOverflow as e:
        logger.error(f"Degree budget exceeded: {e}")
        return EXIT_OVERFLOW
    except HopfRingError as e:
        logger.error(f"Suite aborted: {e}")
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
