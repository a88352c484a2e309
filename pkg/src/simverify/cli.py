"""Command-line interface.

``simverify verify`` exits 0 when the target is judged present, 3 when the
query is rejected as absent and 1 on any operational error, so shell
pipelines can skip mask decoding on exit code 3.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .calibration import calibrate, export_scatter, parse_grid_spec, read_manifest, score_samples, write_scatter_csv
from .config import ConfigError, ScoringConfig, Thresholds, VerificationError, parse_mask
from .evaluation import ALL_MASKS, ablate, evaluate
from .holistic import AssessorConfig, HttpTransport, MockTransport, TransportError
from .maps import load_map
from .pipeline import Assessor, verify
from .render import COLORMAPS, DEFAULT_COLORMAP, DEFAULT_SCALE, render_heatmap
from .synth import PRESETS, SyntheticSpec, corpus_hash, generate_corpus, preset_specs

EXIT_PRESENT, EXIT_ERROR, EXIT_ABSENT = 0, 1, 3


def _load_thresholds(value: str | None) -> Thresholds:
    if value is None:
        return Thresholds()
    path = Path(value)
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(path.read_text())
            t = data.get("thresholds", data)
            return Thresholds(float(t["S"]), float(t["C"]), float(t["P"]))
        except (OSError, ValueError, KeyError, TypeError, AttributeError) as exc:
            raise ConfigError(f"cannot read thresholds from {path}: {exc}") from exc
    return Thresholds.parse(value)


def _load_config(path: str | None) -> ScoringConfig:
    return ScoringConfig() if path is None else ScoringConfig.from_json(path)


def _load_assessor(args) -> Assessor | None:
    if not args.with_assessor:
        return None
    cfg = AssessorConfig.from_json(args.assessor_config) if args.assessor_config else AssessorConfig()
    transport = MockTransport.from_file(args.transcript, cycle=True) if args.transcript else HttpTransport(cfg)
    return Assessor(cfg, transport)


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_verify(args) -> int:
    response = load_map(args.map)
    verdict = verify(
        response,
        _load_config(args.config),
        _load_thresholds(args.thresholds),
        parse_mask(args.mask),
        _load_assessor(args),
    )
    report = verdict.to_dict()
    report["map"] = str(args.map)
    if args.emit_heatmap:
        render_heatmap(response, args.scale, args.colormap).save(args.emit_heatmap)
        report["heatmap"] = str(args.emit_heatmap)
    _emit(report, args.out)
    return EXIT_PRESENT if verdict.final_decision else EXIT_ABSENT


def cmd_calibrate(args) -> int:
    entries = read_manifest(args.manifest, args.split)
    scored = score_samples([(e.path, e.label) for e in entries], _load_config(args.config))
    grid = parse_grid_spec(args.grid) if args.grid else None
    result = calibrate(scored, grid)
    out = result.to_dict(include_trace=args.trace)
    out["n_samples"] = len(scored)
    if args.scatter:
        write_scatter_csv(export_scatter(scored), args.scatter)
        out["scatter"] = str(args.scatter)
    _emit(out, args.out)
    return 0


def cmd_gen_corpus(args) -> int:
    if args.preset:
        specs, splits = preset_specs(args.preset, args.seed)
    else:
        try:
            raw = json.loads(Path(args.spec_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read spec file {args.spec_file}: {exc}") from exc
        if not isinstance(raw, list):
            raise ConfigError("spec file must be a JSON list of specs")
        splits = [item.pop("split") for item in raw] if all("split" in item for item in raw) else None
        specs = [SyntheticSpec.from_dict(item) for item in raw]
    manifest = generate_corpus(specs, args.out, splits)
    _emit({"manifest": str(manifest), "entries": len(specs), "sha256": corpus_hash(manifest)}, None)
    return 0


def cmd_evaluate(args) -> int:
    entries = read_manifest(args.manifest, args.split)
    config = _load_config(args.config)
    thresholds = _load_thresholds(args.thresholds)
    assessor = _load_assessor(args)
    if args.all_masks:
        if assessor is None:
            base = evaluate(entries, config, thresholds, None, None, args.workers)
            rows = ablate(base, thresholds)
        else:
            rows = [evaluate(entries, config, thresholds, m, assessor, args.workers) for m in ALL_MASKS]
        _emit({"thresholds": thresholds.to_dict(), "rows": [r.row() for r in rows]}, args.out)
        if args.summary:
            _print_table([r.row() for r in rows])
        return 0
    report = evaluate(entries, config, thresholds, args.mask, assessor, args.workers)
    out = report.to_dict(include_records=not args.no_records)
    out["thresholds"] = thresholds.to_dict()
    _emit(out, args.out)
    if args.summary:
        _print_table([report.row()])
    return 0


def _print_table(rows: list[dict]) -> None:
    print(f"{'S':>2} {'C':>2} {'P':>2} | {'pos':>6} {'neg':>6} {'all':>6}", file=sys.stderr)
    for r in rows:
        marks = " ".join(f"{'x' if r[d] else '':>2}" for d in "SCP")
        print(
            f"{marks} | {100 * r['positive_acc']:6.1f} {100 * r['negative_acc']:6.1f} {100 * r['overall_acc']:6.1f}",
            file=sys.stderr,
        )


def cmd_serve(args) -> int:
    from .service import create_app, serve

    app = create_app(_load_config(args.config), _load_thresholds(args.thresholds), parse_mask(args.mask), _load_assessor(args))
    serve(app, args.bind)
    return 0


def _add_scoring_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with scoring constants")
    p.add_argument("--thresholds", help="'s,c,p' or a calibration result JSON (default 0.475,0.4,0.7)")
    p.add_argument("--mask", default=None, help="score dimensions to require, e.g. 'scp', 'sc' (default all)")


def _add_assessor_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--with-assessor", action="store_true", help="consult the vision-language assessor")
    p.add_argument("--assessor-config", help="JSON file with endpoint_url, model_name, api_key_env, ...")
    p.add_argument("--transcript", help="replay scripted assessor replies from a JSON list instead of HTTP")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simverify", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="score one response map and decide target presence")
    p.add_argument("map", help="response map (.json grid or .csv)")
    _add_scoring_args(p)
    _add_assessor_args(p)
    p.add_argument("--emit-heatmap", metavar="PNG", help="also write the rendered heatmap")
    p.add_argument("--scale", type=int, default=DEFAULT_SCALE)
    p.add_argument("--colormap", default=DEFAULT_COLORMAP, choices=sorted(COLORMAPS))
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("calibrate", help="grid-search thresholds on a labelled manifest")
    p.add_argument("manifest")
    p.add_argument("--config")
    p.add_argument("--grid", help="'start:stop:step' or comma list (default 0:1:0.025)")
    p.add_argument("--split", help="only use manifest entries of this split")
    p.add_argument("--scatter", help="write s1,s2,s3,label CSV here")
    p.add_argument("--trace", action="store_true", help="include every grid point in the output")
    p.add_argument("--out")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("gen-corpus", help="write a synthetic labelled corpus")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESETS)
    src.add_argument("--spec-file", help="JSON list of generator specs")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0, help="base seed for presets")
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("evaluate", help="accuracy of the verifier on a labelled manifest")
    p.add_argument("manifest")
    _add_scoring_args(p)
    _add_assessor_args(p)
    p.add_argument("--all-masks", action="store_true", help="one row per non-empty subset of S, C, P")
    p.add_argument("--split")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-records", action="store_true", help="omit per-sample records")
    p.add_argument("--summary", action="store_true", help="print a plain-text table to stderr")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="run the HTTP verification service")
    _add_scoring_args(p)
    _add_assessor_args(p)
    p.add_argument("--bind", default="127.0.0.1:8000")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; keep the 0/1/3 contract
        return EXIT_ERROR if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (VerificationError, TransportError, OSError) as exc:
        print(f"simverify {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
