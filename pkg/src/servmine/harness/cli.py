"""Command-line interface: generate, mine, review, experiment, validate.

Exit codes: 0 success, 1 validation failure or malformed input, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from servmine.config import MiningConfig
from servmine.errors import InvalidArgument, InvalidConfig, InvalidRepository, ServMineError
from servmine.harness.experiment import export_csv, load_sweep, run_experiment
from servmine.harness.review import review_session
from servmine.mining import VERIFIERS, NoveltyRegistry, mine, read_leads, write_leads
from servmine.model import dump_repository, repository_from_document, validate_document
from servmine.synth import GeneratorParams, generator_header, generate_repository

log = logging.getLogger("servmine")

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


def _read_json(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidRepository(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _load_valid_repository(path):
    doc = _read_json(path)
    problems = validate_document(doc)
    if problems:
        raise InvalidRepository(f"{path}: " + "\n  ".join(["invalid repository"] + problems))
    return repository_from_document(doc)


def cmd_generate(args) -> int:
    base = _read_json(args.params) if args.params else {}
    params = GeneratorParams.from_dict(base, n_services=args.services, seed=args.seed)
    repo = generate_repository(params)
    dump_repository(repo, args.out, header=generator_header(params))
    log.info("wrote %d services to %s", len(repo), args.out)
    return EXIT_OK


def cmd_mine(args) -> int:
    repo = _load_valid_repository(args.repo)
    base = _read_json(args.config) if args.config else {}
    cfg = MiningConfig.from_dict(base, zeta=args.zeta, xi=args.xi)
    registry = NoveltyRegistry.load(args.registry) if args.registry else NoveltyRegistry()
    leads = mine(repo, cfg, registry, args.verifier)
    write_leads(leads, args.out)
    n_int = sum(lead.status == "interesting" for lead in leads)
    log.info("%d pairs, %d interesting; wrote %s", len(leads), n_int, args.out)
    return EXIT_OK


def cmd_review(args) -> int:
    leads = read_leads(args.leads)
    registry = NoveltyRegistry.load(args.registry)
    leads, registry = review_session(leads, registry)
    write_leads(leads, args.leads)
    registry.save(args.registry)
    return EXIT_OK


def cmd_experiment(args) -> int:
    sweep = load_sweep(args.sweep)
    report = run_experiment(sweep, args.reps, args.seed, workers=args.workers)
    export_csv(report, args.out, include_timing=args.timing)
    log.info("wrote %d rows to %s", len(report), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    problems = validate_document(_read_json(args.repo))
    for p in problems:
        print(p)
    if problems:
        print(f"{args.repo}: {len(problems)} violation(s)", file=sys.stderr)
        return EXIT_INVALID
    print(f"{args.repo}: OK")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="servmine", description="Mine composition leads among IoT services.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic service repository")
    p.add_argument("--services", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--params", help="JSON file with generator parameters")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("mine", help="mine composition leads from a repository")
    p.add_argument("--repo", required=True)
    p.add_argument("--config")
    p.add_argument("--registry")
    p.add_argument("--out", required=True)
    p.add_argument("--zeta", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--verifier", choices=sorted(VERIFIERS), default="always_true")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("review", help="accept, reject or mark known the interesting leads")
    p.add_argument("--leads", required=True)
    p.add_argument("--registry", required=True)
    p.set_defaults(func=cmd_review)

    p = sub.add_parser("experiment", help="run a parameter sweep and write a CSV report")
    p.add_argument("--sweep", required=True)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill the wall_time_ms column")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("validate", help="check a repository file")
    p.add_argument("--repo", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (InvalidConfig, InvalidArgument) as exc:
        print(f"servmine: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidRepository, ServMineError) as exc:
        print(f"servmine: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"servmine: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
