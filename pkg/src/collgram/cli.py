"""Command-line interface: ``collgram <command> [flags]``.

Exit codes: 0 success, 1 internal failure, 2 user or input error.
Each command writes a ``run-manifest.json`` next to its outputs recording
the flags, input digests, tool version and a timestamp; timestamps appear
nowhere else so every other output is byte-reproducible.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from collgram import __version__
from collgram.assoc import profile_document, read_profiles, write_profiles
from collgram.corpus import SamplingSpec, read_europarl_dir, sample_documents, write_documents
from collgram.errors import CollgramError
from collgram.refindex import build_index, load_index, save_index
from collgram.report import render_table, write_plot_data, write_report
from collgram.stats import compare_sets
from collgram.tokenizer import ProperNounMode, TokenizerConfig, detect_proper_nouns, tokenize

log = logging.getLogger("collgram")

MANIFEST_NAME = "run-manifest.json"


def worker_count() -> int:
    raw = os.environ.get("COLLGRAM_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise CollgramError(f"COLLGRAM_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def input_digests(paths) -> dict[str, str]:
    out = {}
    for p in paths:
        p = Path(p)
        if p.is_dir():
            for f in sorted(x for x in p.rglob("*") if x.is_file()):
                out[str(f)] = _digest(f)
        elif p.is_file():
            out[str(p)] = _digest(p)
    return out


def write_manifest(target: Path, args: argparse.Namespace, inputs) -> None:
    """``target`` is an output directory, or an output file whose directory gets
    ``<file name>.run-manifest.json``."""
    flags = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()
             if k not in ("func",)}
    manifest = {
        "command": args.command,
        "flags": flags,
        "inputs": input_digests(inputs),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    path = target / MANIFEST_NAME if target.is_dir() else \
        target.with_name(f"{target.name}.{MANIFEST_NAME}")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _text_files(directory: Path) -> list[Path]:
    if not directory.is_dir():
        raise CollgramError(f"{directory}: not a directory")
    return sorted(p for p in directory.iterdir()
                  if p.is_file() and p.suffix == ".txt" and not p.name.startswith("."))


def cmd_build_index(args) -> int:
    files = _text_files(args.input)
    config = TokenizerConfig(case_fold=not args.no_lowercase, proper_noun_mode="off")
    index = build_index((f.read_text(encoding="utf-8") for f in files), config, args.min_count)
    save_index(index, args.output)
    write_manifest(args.output, args, [args.input])
    log.info("indexed %d files: %r", len(files), index)
    return 0


def cmd_profile(args) -> int:
    index = load_index(args.index)
    config = TokenizerConfig(case_fold=not args.no_lowercase, proper_noun_mode=args.pn_mode)
    if config.fingerprint != index.tokenizer_fingerprint:
        raise CollgramError(
            "tokenizer mismatch: profile flags do not match the index's tokenizer settings")
    files = _text_files(args.docs)
    tag_dir = args.tag_dir or args.docs

    def one(path: Path):
        doc = tokenize(path.read_text(encoding="utf-8"), config, doc_id=path.stem)
        tag_file = tag_dir / f"{path.stem}.pn" if config.proper_noun_mode is ProperNounMode.TAG_FILE \
            else None
        doc = detect_proper_nouns(doc, config.proper_noun_mode, tag_file)
        return profile_document(doc, index, type_level=args.type_level)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        profiles = list(pool.map(one, files))
    write_profiles(profiles, args.out)
    write_manifest(args.out, args, [args.index, args.docs])
    return 0


def cmd_compare(args) -> int:
    paths = [Path(p) for p in args.profiles.split(",") if p]
    labels = [x for x in args.labels.split(",") if x] if args.labels else [p.stem for p in paths]
    if len(labels) != len(paths):
        raise CollgramError(f"{len(paths)} profile files but {len(labels)} labels")
    if len(set(labels)) != len(labels):
        raise CollgramError("translator labels must be unique")
    sets = {label: read_profiles(p) for label, p in zip(labels, paths)}
    matrices = compare_sets(sets, alpha=args.alpha, m=args.m)
    write_report(matrices, args.out)
    table = render_table(matrices)
    if args.table:
        args.table.write_text(table, encoding="utf-8")
    else:
        sys.stdout.write(table)
    if args.plot_data:
        write_plot_data(sets, args.plot_data)
    write_manifest(args.out, args, paths)
    return 0


def cmd_sample(args) -> int:
    spec = SamplingSpec(args.min_chars, args.max_chars, args.n, args.seed)
    docs = read_europarl_dir(args.input)
    chosen = sample_documents(docs, spec)
    write_documents(chosen, args.out)
    write_manifest(args.out, args, [args.input])
    return 0


def cmd_ingest(args) -> int:
    docs = read_europarl_dir(args.input)
    write_documents(docs, args.out)
    write_manifest(args.out, args, [args.input])
    return 0


def _seed(raw: str) -> int:
    value = int(raw, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collgram", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-index", help="count a reference corpus (directory of .txt files)")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--min-count", type=_positive, default=1,
                   help="drop reference bigrams seen fewer times (default 1)")
    p.add_argument("--no-lowercase", action="store_true", help="disable case folding")
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("profile", help="compute CollGram indices for a directory of .txt documents")
    p.add_argument("--index", type=Path, required=True)
    p.add_argument("--docs", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--pn-mode", choices=[m.value for m in ProperNounMode], default="heuristic")
    p.add_argument("--tag-dir", type=Path, help="directory of <doc_id>.pn files (default: --docs)")
    p.add_argument("--type-level", action="store_true", help="count bigram types, not occurrences")
    p.add_argument("--no-lowercase", action="store_true", help="disable case folding")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("compare", help="paired comparison of profile CSVs")
    p.add_argument("--profiles", required=True, help="comma-separated profile CSVs")
    p.add_argument("--labels", help="comma-separated translator labels (default: file stems)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--m", type=_positive, help="Bonferroni test count (default 3 per pair)")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--plot-data", type=Path)
    p.add_argument("--table", type=Path, help="write the text table here instead of stdout")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sample", help="length-filtered seeded sample of Europarl documents")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--min-chars", type=int, default=3500)
    p.add_argument("--max-chars", type=int, default=4500)
    p.add_argument("--n", type=_positive, default=200)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("ingest", help="split Europarl files into per-speech documents")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CollgramError, OSError, UnicodeDecodeError) as exc:
        print(f"collgram {args.command}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.exception("internal failure")
        print(f"collgram {args.command}: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
