"""forge: single entry point for the corpus pipeline.

Subcommands: generate, modernize, verify, assemble, eval, compare.
Exit codes: 0 success, 1 verification/validation failure, 2 usage error.
`FORGE_SEED` provides the master seed when --seed is omitted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import CorpusManifest, ShortfallError, assemble_full
from .detector import verify_corpus
from .evaluator import (
    PredictionFileError,
    compare,
    confusion,
    format_comparison,
    load_predictions,
    load_report,
    metrics,
)
from .generator import draw_params, generate
from .modernizer import modernize_batch
from .rng import derive_stream
from .taxonomy import Kind, SecurePattern, Subtype

DEFAULT_SEED = 20240801


def _seed_from(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FORGE_SEED")
    if env:
        return int(env)
    return DEFAULT_SEED


def _echo_config(command: str, **kv) -> None:
    pairs = " ".join(f"{k}={v}" for k, v in kv.items() if v is not None)
    print(f"[forge] {command} {pairs}")


def _cmd_generate(args) -> int:
    seed = _seed_from(args)
    kind = Kind(args.kind)
    subtype = Subtype(args.subtype) if args.subtype else None
    pattern = SecurePattern(args.pattern) if args.pattern else None
    if kind is Kind.VULN_ADVANCED and subtype is None:
        print("error: --subtype is required for vuln_advanced", file=sys.stderr)
        return 2
    if kind is Kind.SECURE_BASIC and pattern is None:
        print("error: --pattern is required for secure_basic", file=sys.stderr)
        return 2
    _echo_config(
        "generate", kind=kind.value, subtype=args.subtype, pattern=args.pattern,
        count=args.count, seed=seed, out=args.out,
    )
    out = Path(args.out)
    (out / "contracts").mkdir(parents=True, exist_ok=True)
    lines = []
    for i in range(args.count):
        stream = derive_stream(seed, i)
        params = draw_params(
            kind, stream.next_u64(), stream, subtype=subtype, secure_pattern=pattern
        )
        contract = generate(params)
        (out / "contracts" / f"{contract.id}.sol").write_text(
            contract.source, encoding="utf-8"
        )
        lines.append(
            json.dumps(
                {
                    "id": contract.id,
                    "file": f"contracts/{contract.id}.sol",
                    "label": contract.label.value,
                    "subtype": contract.subtype.value if contract.subtype else None,
                    "provenance": contract.provenance.value,
                    "seed": params.seed,
                }
            )
        )
    with open(out / "manifest.jsonl", "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
    print(f"[forge] wrote {args.count} contracts to {out}")
    return 0


def _cmd_modernize(args) -> int:
    _echo_config("modernize", **{"in": args.dir_in, "out": args.dir_out, "log": args.log})
    summary = modernize_batch(args.dir_in, args.dir_out, log_path=args.log)
    print(f"[forge] modernize ok={summary['ok']} failed={summary['failed']}")
    return 0 if summary["failed"] == 0 else 1


def _cmd_verify(args) -> int:
    _echo_config("verify", manifest=args.manifest, strict=args.strict, jobs=args.jobs)
    root = Path(args.manifest).parent
    manifest = CorpusManifest.read(root)
    report = verify_corpus(manifest, root, strict=args.strict, jobs=args.jobs)
    for e in report.entries:
        print(
            json.dumps(
                {
                    "id": e.id, "label": e.label, "verdict": e.verdict,
                    "status": e.status, "decidable": e.decidable,
                    **({"detail": e.detail} if e.detail else {}),
                }
            )
        )
    counts = report.counts
    print(f"[forge] verify {counts}", file=sys.stderr)
    return 1 if report.fatal else 0


def _cmd_assemble(args) -> int:
    seed = _seed_from(args)
    if args.train_spec != "default" or args.test_spec != "default":
        print("error: only the 'default' composition specs are available", file=sys.stderr)
        return 2
    if args.allow_standins:
        print(
            "[forge] WARNING: stand-ins enabled; missing external datasets are "
            "replaced by flagged synthetic stand-ins (review_status=needs_review)",
            file=sys.stderr,
        )
    _echo_config(
        "assemble", seed=seed, out=args.out,
        external_vuln=args.external_vuln, external_secure=args.external_secure,
        study=args.study, exploits=args.exploits, allow_standins=args.allow_standins,
    )
    try:
        manifest = assemble_full(
            seed,
            args.out,
            external_vuln_dir=args.external_vuln,
            external_secure_dir=args.external_secure,
            study_dir=args.study,
            exploit_dir=args.exploits,
            allow_standins=args.allow_standins,
        )
    except ShortfallError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"[forge] assembled {len(manifest.records)} records; hash {manifest.content_hash()}")
    return 0


def _cmd_eval(args) -> int:
    _echo_config("eval", manifest=args.manifest, predictions=args.predictions, out=args.out)
    root = Path(args.manifest).parent
    manifest = CorpusManifest.read(root)
    test_ids = {r.id for r in manifest.records if r.split == "test"}
    try:
        predictions = load_predictions(args.predictions, known_ids=test_ids)
    except PredictionFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    matrix = confusion(manifest, predictions)
    report = metrics(matrix, name=args.name or Path(args.predictions).stem)
    report.write(args.out)
    print(
        f"[forge] accuracy={report.accuracy:.4f} "
        f"coverage_adjusted={report.coverage_adjusted_accuracy:.4f} "
        f"abstained={matrix.abstained}"
    )
    return 0


def _cmd_compare(args) -> int:
    rows = compare([load_report(p) for p in args.reports])
    print(format_comparison(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forge",
        description="Reentrancy corpus forge: generate, modernize, verify, assemble, evaluate.",
    )
    parser.add_argument("--version", action="version", version=f"forge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthesize labeled contracts")
    p.add_argument("--kind", required=True, choices=[k.value for k in Kind])
    p.add_argument("--subtype", choices=[s.value for s in Subtype])
    p.add_argument("--pattern", choices=[s.value for s in SecurePattern])
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("modernize", help="rewrite legacy contracts to 0.8.x conventions")
    p.add_argument("--in", dest="dir_in", required=True)
    p.add_argument("--out", dest="dir_out", required=True)
    p.add_argument("--log")
    p.set_defaults(func=_cmd_modernize)

    p = sub.add_parser("verify", help="re-analyze a corpus and compare verdicts to labels")
    p.add_argument("--manifest", required=True)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("assemble", help="build the train and test corpora")
    p.add_argument("--seed", type=int)
    p.add_argument("--train-spec", default="default")
    p.add_argument("--test-spec", default="default")
    p.add_argument("--out", required=True)
    p.add_argument("--external-vuln")
    p.add_argument("--external-secure")
    p.add_argument("--study")
    p.add_argument("--exploits")
    standins = p.add_mutually_exclusive_group()
    standins.add_argument("--allow-standins", dest="allow_standins", action="store_true", default=True)
    standins.add_argument("--no-standins", dest="allow_standins", action="store_false")
    p.set_defaults(func=_cmd_assemble)

    p = sub.add_parser("eval", help="score a predictions file against the test manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--name")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("compare", help="rank metric reports")
    p.add_argument("reports", nargs="+")
    p.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
