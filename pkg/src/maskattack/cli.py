"""Command-line entry point.

Commands: attack, curve, ablate, human-eval, validate. Flags can come from
the command line, MASKATTACK_* environment variables, or the [attack]
section of the backends config, in that priority order. Exit codes:
0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
import time
from pathlib import Path

from .attack import AttackConfig, attack_corpus, capped_sweep
from .backends import ConfigError, load_adapter_config
from .core import AttackMode, AttackStatus
from .evaluation import (
    IncompleteAnnotations,
    MismatchedCorpora,
    ablation_splits,
    ablation_table,
    aggregate_human_scores,
    effectiveness_curve,
    export_human_eval,
    load_key_file,
    original_row,
    render_curve_ascii,
    summarize,
    summary_row,
    write_annotation_sheet,
    write_curve_csv,
    write_key_file,
    write_report_csv,
)
from .ingestion import (
    LabelRangeError,
    ParseError,
    SchemaVersionError,
    load_dataset,
    load_results,
    persist_results,
    validate_declared_stats,
)

ENV_PREFIX = "MASKATTACK_"

_MODE_FILE_LABELS = {
    AttackMode.R: "r",
    AttackMode.I: "i",
    AttackMode.RI_CHOICE: "r_i",
    AttackMode.R_PLUS_I: "r_plus_i",
}


class UsageError(ValueError):
    pass


def _env(name: str) -> str | None:
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))


def _pick(flag_value, env_name: str, config_value, default):
    """flag > environment > backends-config [attack] section > default."""
    if flag_value is not None:
        return flag_value
    env_value = _env(env_name)
    if env_value is not None:
        return env_value
    if config_value is not None:
        return config_value
    return default


def _build_attack_config(args, file_defaults: dict) -> AttackConfig:
    mode = _pick(args.mode, "mode", file_defaults.get("mode"), "R")
    k = _pick(args.k, "k", file_defaults.get("k"), 50)
    sim = _pick(args.sim_threshold, "sim_threshold", file_defaults.get("sim_threshold"), 0.8)
    cap = _pick(args.max_perturb, "max_perturb", file_defaults.get("max_perturb_ratio"), None)
    budget = _pick(args.query_budget, "query_budget", file_defaults.get("query_budget"), None)
    sentiment = file_defaults.get("sentiment_task")
    return AttackConfig(
        mode=AttackMode.parse(str(mode)),
        k=int(k),
        sim_threshold=float(sim),
        max_perturb_ratio=None if cap in (None, "none", "unlimited") else float(cap),
        query_budget=None if budget in (None, "none", "unlimited") else int(budget),
        sentiment_task=bool(sentiment) if sentiment is not None else False,
    )


def _load_dataset_from_args(args, sentiment_override: bool | None = None):
    dataset_path = Path(args.dataset)
    format = args.format or ("csv" if dataset_path.suffix.lower() == ".csv" else "tsv")
    return load_dataset(
        dataset_path,
        format=format,
        name=args.name,
        split=args.split,
        sentiment_task=sentiment_override,
    )


def _write_manifest(out_dir: Path, args, fingerprint: dict, finished: bool = False) -> None:
    manifest = {
        "command": args.command,
        "argv": getattr(args, "_argv", sys.argv[1:]),
        "backends": getattr(args, "backends", None),
        "dataset": getattr(args, "dataset", None),
        "out": str(out_dir),
        "seed": getattr(args, "seed", None),
        "fingerprint": fingerprint,
        "started_at": getattr(args, "_started_at", None),
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()) if finished else None,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _prepare_out_dir(args, filenames: list[str]) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not args.force:
        for filename in filenames:
            if (out_dir / filename).exists():
                raise ValueError(
                    f"{out_dir / filename} already exists; pass --force to overwrite"
                )
    args._started_at = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return out_dir


def cmd_attack(args) -> int:
    backends, file_defaults = load_adapter_config(args.backends)
    config = _build_attack_config(args, file_defaults)
    dataset = _load_dataset_from_args(args)
    if file_defaults.get("sentiment_task") is None:
        config = dataclasses.replace(config, sentiment_task=dataset.sentiment_task)

    out_dir = _prepare_out_dir(args, ["results.json"])
    fingerprint = config.fingerprint() | {"dataset": dataset.name, "seed": args.seed}
    _write_manifest(out_dir, args, fingerprint)  # before the first query

    results = attack_corpus(backends, dataset, config, jobs=args.jobs)
    persist_results(results, out_dir / "results.json", fingerprint)

    report = summarize(results, dataset)
    write_report_csv(report, out_dir / "report.csv")
    lines = [original_row(report), summary_row(config.mode.value, report)]
    (out_dir / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines))
    _write_manifest(out_dir, args, fingerprint, finished=True)
    return 0


def _parse_caps(raw: str) -> list[float]:
    if not raw.strip():
        raise UsageError("--caps must list percentages, e.g. 10,20,50")
    caps = []
    for piece in raw.split(","):
        piece = piece.strip()
        if not piece:
            continue
        caps.append(float(piece) / 100.0)
    if not caps:
        raise UsageError("--caps must list percentages, e.g. 10,20,50")
    if caps != sorted(caps):
        raise UsageError("--caps must be ascending")
    return caps


def cmd_curve(args) -> int:
    backends, file_defaults = load_adapter_config(args.backends)
    caps = _parse_caps(args.caps)
    dataset = _load_dataset_from_args(args)
    modes = (
        list(AttackMode)
        if args.mode in (None, "all")
        else [AttackMode.parse(args.mode)]
    )

    base_config = _build_attack_config(
        argparse.Namespace(
            mode="R", k=args.k, sim_threshold=args.sim_threshold,
            max_perturb=None, query_budget=args.query_budget,
        ),
        file_defaults,
    )
    if file_defaults.get("sentiment_task") is None:
        base_config = dataclasses.replace(base_config, sentiment_task=dataset.sentiment_task)

    out_dir = _prepare_out_dir(
        args, [f"curve_{_MODE_FILE_LABELS[m]}.csv" for m in modes]
    )
    fingerprint = base_config.fingerprint() | {
        "dataset": dataset.name, "caps": [round(c, 4) for c in caps],
    }
    _write_manifest(out_dir, args, fingerprint)

    failures = []
    for mode in modes:
        config = dataclasses.replace(base_config, mode=mode)
        sweep = capped_sweep(backends, dataset, config, caps, jobs=args.jobs)
        curve = effectiveness_curve(sweep)
        write_curve_csv(curve, out_dir / f"curve_{_MODE_FILE_LABELS[mode]}.csv")
        print(f"mode {mode.value}: wrote curve_{_MODE_FILE_LABELS[mode]}.csv")
        if args.plot:
            print(render_curve_ascii(curve))
        if args.assert_monotone:
            accuracies = [accuracy for _, accuracy in curve]
            if any(b > a + 1e-9 for a, b in zip(accuracies, accuracies[1:])):
                failures.append(f"{mode.value}: curve not non-increasing: {accuracies}")
            for idx in range(len(dataset)):
                succ = [
                    sweep.per_cap[c][idx].status is AttackStatus.SUCCESS
                    for c in range(len(caps))
                ]
                if any(a and not b for a, b in zip(succ, succ[1:])):
                    failures.append(
                        f"{mode.value}: example {dataset.examples[idx].id} success not monotone"
                    )
    _write_manifest(out_dir, args, fingerprint, finished=True)
    if failures:
        for failure in failures:
            print(f"monotonicity violated: {failure}", file=sys.stderr)
        return 1
    return 0


def cmd_ablate(args) -> int:
    res_r = load_results(args.results_r)
    res_i = load_results(args.results_i)
    res_ri = load_results(args.results_ri)
    splits = ablation_splits(res_r.results, res_i.results, res_ri.results)
    table = ablation_table(splits, corpus_label=args.label)
    print(table)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        lines = ["corpus,a,b,c", f"{args.label},{splits.a:.2f},{splits.b:.2f},{splits.c:.2f}"]
        (out_dir / "ablation.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def _read_annotations(path: Path) -> dict[str, dict]:
    annotations: dict[str, dict] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "item_id":
                continue
            item_id, label, *scores = row
            annotations[item_id] = {
                "label": int(label),
                "scores": [int(s) for s in scores],
            }
    return annotations


def cmd_human_eval(args) -> int:
    if args.action == "export":
        if not args.results or not args.dataset or not args.out:
            raise UsageError("export needs --results, --dataset and --out")
        results_file = load_results(args.results)
        dataset = _load_dataset_from_args(args)
        packet = export_human_eval(dataset, results_file.results, args.n, args.seed)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_annotation_sheet(packet, out_dir / "annotation_sheet.txt")
        write_key_file(packet, out_dir / "key.json")
        print(f"exported {len(packet.items)} items to {out_dir}")
        return 0
    if not args.key or not args.annotations:
        raise UsageError("aggregate needs --key and --annotations")
    packet = load_key_file(args.key)
    annotations = _read_annotations(Path(args.annotations))
    summary = aggregate_human_scores(packet, annotations)
    print(f"sentiment accuracy: {summary.sentiment_accuracy:.1f}")
    print(f"mean naturalness:   {summary.mean_naturalness:.2f}")
    for source in sorted(summary.by_source):
        accuracy, naturalness = summary.by_source[source]
        print(f"  {source:<12} accuracy {accuracy:.1f}  naturalness {naturalness:.2f}")
    return 0


def cmd_validate(args) -> int:
    dataset = _load_dataset_from_args(args)
    print(f"dataset:      {dataset.name} ({dataset.split})")
    print(f"examples:     {len(dataset)}")
    print(f"classes:      {dataset.num_classes}")
    print(f"avg length:   {dataset.average_length():.2f}")
    print(f"sentiment:    {dataset.sentiment_task}")
    problems = validate_declared_stats(dataset)
    for problem in problems:
        print(f"mismatch: {problem}", file=sys.stderr)
    return 1 if problems else 0


def _add_dataset_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", default=_env("dataset"),
                        help="dataset file (label<TAB>text or CSV)")
    parser.add_argument("--format", choices=["tsv", "csv"], default=None)
    parser.add_argument("--name", default=None, help="dataset name (defaults to file stem)")
    parser.add_argument("--split", choices=["train", "test"], default="test")


def _add_attack_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", default=None, help="R, I, R/I or R+I")
    parser.add_argument("--k", type=int, default=None, help="masked-LM candidates per slot")
    parser.add_argument("--sim-threshold", dest="sim_threshold", type=float, default=None)
    parser.add_argument("--max-perturb", dest="max_perturb", default=None,
                        help="perturbation-ratio cap in (0,1], or 'unlimited'")
    parser.add_argument("--query-budget", dest="query_budget", default=None)
    parser.add_argument("--backends", default=_env("backends"),
                        help="backend adapter config (INI)")
    parser.add_argument("--jobs", type=int, default=int(_env("jobs") or 1))
    parser.add_argument("--seed", type=int, default=int(_env("seed") or 0))
    parser.add_argument("--force", action="store_true", help="overwrite existing outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maskattack",
        description="Masked-LM replace/insert attacks on text classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("attack", help="attack a dataset and write results + report")
    _add_dataset_flags(p)
    _add_attack_flags(p)
    p.add_argument("--out", default=_env("out"))
    p.set_defaults(fn=cmd_attack)

    p = sub.add_parser("curve", help="accuracy vs perturbation-budget curves")
    _add_dataset_flags(p)
    _add_attack_flags(p)
    p.add_argument("--caps", required=True, help="ascending percentages, e.g. 10,20,...,100")
    p.add_argument("--out", default=_env("out"))
    p.add_argument("--assert-monotone", action="store_true")
    p.add_argument("--plot", action="store_true", help="render an ASCII chart per mode")
    p.set_defaults(fn=cmd_curve)

    p = sub.add_parser("ablate", help="replace-vs-insert ablation splits")
    p.add_argument("--results-r", required=True)
    p.add_argument("--results-i", required=True)
    p.add_argument("--results-ri", required=True)
    p.add_argument("--label", default="corpus")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_ablate)

    p = sub.add_parser("human-eval", help="export annotator sheets / aggregate scores")
    p.add_argument("action", choices=["export", "aggregate"])
    _add_dataset_flags(p)
    p.add_argument("--results", default=None)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=int(_env("seed") or 0))
    p.add_argument("--out", default=None)
    p.add_argument("--key", default=None)
    p.add_argument("--annotations", default=None)
    p.set_defaults(fn=cmd_human_eval)

    p = sub.add_parser("validate", help="check dataset statistics")
    _add_dataset_flags(p)
    p.set_defaults(fn=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = list(argv) if argv is not None else sys.argv[1:]
    if getattr(args, "dataset", None) is None and args.command in (
        "attack", "curve", "validate",
    ):
        parser.error(f"{args.command} requires --dataset")
    if getattr(args, "backends", None) is None and args.command in ("attack", "curve"):
        parser.error(f"{args.command} requires --backends")
    if getattr(args, "out", None) is None and args.command in ("attack", "curve"):
        parser.error(f"{args.command} requires --out")
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        ConfigError, ParseError, LabelRangeError, SchemaVersionError,
        MismatchedCorpora, IncompleteAnnotations, FileNotFoundError, ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
