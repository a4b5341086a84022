"""Command-line entry point tying the pipeline together.

Subcommands: inspect, clean, split, featurize, augment-preview, synth,
train, predict, ensemble, eval. Global flags --config/--seed/--jobs are
accepted by every subcommand; precedence is defaults < config file <
flags, and the effective configuration is echoed into each output
directory.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import dataset, evaluate
from .augment import augment_pipeline, fix_length
from .config import ToolkitConfig, load_config, write_effective_config
from .dataset import CLASS_NAMES, Manifest, ManifestEntry, load_manifest, save_manifest, scan_corpus
from .dsp import save_scft
from .evaluate import Prediction, PredictionRow, apply_unknown_threshold
from .features import (
    FeatureExtractor,
    REPRESENTATIONS,
    feature_map_values,
    feature_shape,
    input_length,
    load_noise_pool,
)
from .nn import build_cnn2d, build_network, build_resnet1d, build_vgg1d
from .synth import synthesize_corpus
from .training import load_checkpoint, save_checkpoint, train
from .viz import save_ppm
from .wav_io import AudioClip, read_wav_file, write_wav_file

_SCFT_KIND = {"wave": "raw", "logspec": "log_power", "db": "decibel", "mel": "mel", "mfcc": "mfcc"}


def _load_or_scan(args, cfg: ToolkitConfig) -> Manifest:
    if getattr(args, "manifest", None):
        return load_manifest(args.manifest, root=args.data)
    if getattr(args, "data", None):
        return scan_corpus(args.data, cfg.fragment_seconds, cfg.silence_cap)
    raise ValueError("need --manifest or --data")


def _config(args, **extra) -> ToolkitConfig:
    overrides = {"seed": args.seed, "jobs": args.jobs}
    overrides.update(extra)
    return load_config(args.config, overrides)


def cmd_synth(args) -> int:
    cfg = _config(args)
    synthesize_corpus(
        args.out,
        n_per_class=args.n_per_class,
        seed=cfg.seed,
        n_speakers=args.speakers,
        sample_rate=cfg.sample_rate,
    )
    write_effective_config(cfg, args.out)
    print(f"synthesized corpus at {args.out}: {args.n_per_class} clips/class, {args.speakers} speakers")
    return 0


def cmd_inspect(args) -> int:
    cfg = _config(args)
    manifest = _load_or_scan(args, cfg)
    counts = manifest.class_counts()
    print(f"entries: {len(manifest)}")
    print(f"speakers: {len([s for s in manifest.speakers() if s != dataset.BACKGROUND_SPEAKER])}")
    print(f"folds: {manifest.n_folds if manifest.n_folds > 0 else 'unassigned'}")
    for name in CLASS_NAMES:
        print(f"  {name:>8}: {counts[name]}")
    return 0


def cmd_clean(args) -> int:
    cfg = _config(args)
    manifest = _load_or_scan(args, cfg)
    threshold = args.threshold if args.threshold is not None else cfg.silence_threshold
    loader = lambda e: dataset.load_entry_clip(e, args.data, cfg.fragment_seconds)
    proposals, report = dataset.clean_low_volume(manifest, threshold, loader)
    with open(args.report, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["path", "peak"])
        for path, peak in report:
            writer.writerow([path, f"{peak:.8g}"])
    print(f"checked {len(report)} files, {len(proposals)} below threshold {threshold}")
    if args.apply:
        if not args.out:
            raise ValueError("--apply requires --out for the updated manifest")
        updated = dataset.apply_silence_relabels(manifest, proposals)
        save_manifest(updated, args.out)
        print(f"relabeled {len(proposals)} entries to silence in {args.out}")
    return 0


def cmd_split(args) -> int:
    cfg = _config(args)
    manifest = _load_or_scan(args, cfg)
    folds = args.folds if args.folds is not None else cfg.folds
    manifest = dataset.assign_folds(manifest, folds, cfg.seed)
    save_manifest(manifest, args.out)
    violations = dataset.speaker_fold_violations(manifest)
    if violations:
        raise RuntimeError(f"speakers in multiple folds: {violations}")
    sizes = [sum(1 for e in manifest.entries if e.fold == k) for k in range(folds)]
    print(f"assigned {folds} folds, sizes {sizes}, wrote {args.out}")
    return 0


def cmd_featurize(args) -> int:
    cfg = _config(args, representation=args.representation)
    manifest = _load_or_scan(args, cfg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    representation = cfg.representation
    if representation not in REPRESENTATIONS:
        raise ValueError(f"unknown representation {representation!r}")

    target = input_length(cfg, representation)

    def one(entry: ManifestEntry) -> str:
        clip = dataset.load_entry_clip(entry, args.data, cfg.fragment_seconds)
        samples = fix_length(clip.samples, target, np.random.default_rng(0))
        values = feature_map_values(samples, cfg, representation)
        stem = entry.path.replace("/", "__").replace("\\", "__").replace("#", "_")
        save_scft(out_dir / f"{stem}.scft", values, _SCFT_KIND[representation])
        if args.plot and values.ndim == 2:
            save_ppm(out_dir / f"{stem}.ppm", values)
        return stem

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            list(pool.map(one, manifest.entries))
    else:
        for entry in manifest.entries:
            one(entry)
    write_effective_config(cfg, out_dir)
    print(f"wrote {len(manifest)} {representation} tensors to {out_dir}")
    return 0


def cmd_augment_preview(args) -> int:
    cfg = _config(args)
    clip = read_wav_file(args.input)
    noise_pool = [read_wav_file(p) for p in args.noise]
    aug_cfg = cfg.augment_config()
    if not noise_pool:
        from dataclasses import replace

        aug_cfg = replace(aug_cfg, noise_max=0.0)
    rng = np.random.default_rng(cfg.seed)
    samples = augment_pipeline(clip, noise_pool, aug_cfg, rng)
    write_wav_file(args.out, AudioClip(samples=samples, sample_rate=clip.sample_rate))
    print(f"augmented {args.input} ({len(clip)} samples) -> {args.out} ({len(samples)} samples)")
    return 0


def _model_spec_for(cfg: ToolkitConfig, arch: str, representation: str):
    if arch == "vgg1d":
        if representation != "wave":
            raise ValueError("vgg1d consumes the wave representation")
        return build_vgg1d(cfg.width_multiplier, input_length=cfg.target_length)
    if arch == "resnet1d":
        if representation != "wave":
            raise ValueError("resnet1d consumes the wave representation")
        return build_resnet1d(cfg.resnet_depth, cfg.resnet_channels, input_length=cfg.target_length)
    if arch == "cnn2d":
        if representation == "wave":
            raise ValueError("cnn2d needs a 2D representation (logspec, db, mel, mfcc)")
        shape = feature_shape(cfg, representation)
        return build_cnn2d(shape[1:])
    raise ValueError(f"unknown architecture {arch!r}")


def _default_representation(arch: str, configured: str) -> str:
    if arch in ("vgg1d", "resnet1d"):
        return "wave"
    return configured if configured != "wave" else "mel"


def cmd_train(args) -> int:
    cfg = _config(
        args,
        arch=args.model,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
    )
    representation = args.representation or _default_representation(cfg.arch, cfg.representation)
    cfg.representation = representation
    manifest = _load_or_scan(args, cfg)
    if manifest.n_folds < 1 and args.fold >= 0:
        raise ValueError("manifest has no fold assignment; run `split` first")

    spec = _model_spec_for(cfg, cfg.arch, representation)
    model = build_network(spec, seed=cfg.seed)
    noise_pool = load_noise_pool(manifest, args.data) if args.augment else []
    train_fn = FeatureExtractor(cfg, representation, args.data, augment=args.augment, noise_pool=noise_pool)
    eval_fn = FeatureExtractor(cfg, representation, args.data, augment=False)
    result = train(model, manifest, args.fold, train_fn, cfg.train_config(), eval_feature_fn=eval_fn)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out_dir / "model.scnn", model)
    with open(out_dir / "metrics.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["epoch", "train_loss", "val_acc"])
        for record in result.history:
            writer.writerow(
                [record["epoch"], f"{record['train_loss']:.6g}", f"{record.get('val_acc', float('nan')):.6g}"]
            )
    write_effective_config(cfg, out_dir)
    print(
        f"trained {cfg.arch} on {representation}: held-out accuracy "
        f"{result.best_val_acc:.4f} (best epoch {result.best_epoch}), "
        f"checkpoint {out_dir / 'model.scnn'}"
    )
    return 0


def _prediction_entries(args, cfg: ToolkitConfig) -> list[ManifestEntry]:
    if args.manifest:
        return load_manifest(args.manifest, root=args.data).entries
    root = Path(args.data)
    wavs = sorted(root.glob("*.wav"))
    if not wavs:
        raise ValueError(f"no wav files in {root}")
    return [
        ManifestEntry(path=w.name, raw_label="", class_index=dataset.UNKNOWN_INDEX, speaker_id="")
        for w in wavs
    ]


def cmd_predict(args) -> int:
    cfg = _config(args, representation=args.representation)
    model = load_checkpoint(args.checkpoint)
    representation = cfg.representation
    expected = feature_shape(cfg, representation)
    if tuple(model.spec.input_shape) != expected:
        raise ValueError(
            f"checkpoint expects input {model.spec.input_shape}, "
            f"{representation} features are {expected}; fix --representation or the config"
        )
    entries = _prediction_entries(args, cfg)
    extractor = FeatureExtractor(cfg, representation, args.data, augment=False)
    rows = []
    batch = 64
    for start in range(0, len(entries), batch):
        chunk = entries[start : start + batch]
        x = np.stack([extractor(e) for e in chunk])
        predictions = evaluate.predict_batch(model, x, source_model=str(args.checkpoint))
        for entry, pred in zip(chunk, predictions):
            label = CLASS_NAMES[apply_unknown_threshold(pred, args.unknown_threshold)]
            rows.append(PredictionRow(fname=entry.path, label=label, probs=pred.probs))
    evaluate.save_predictions(args.out, rows)
    write_effective_config(cfg, Path(args.out).parent)
    print(f"wrote {len(rows)} predictions to {args.out}")
    return 0


def cmd_ensemble(args) -> int:
    cfg = _config(args)
    member_rows = [evaluate.load_predictions(p) for p in args.inputs]
    for path, rows in zip(args.inputs, member_rows):
        if any(r.probs is None for r in rows):
            raise ValueError(f"{path} has no probability columns; rerun predict")
    reference = [r.fname for r in member_rows[0]]
    by_fname = []
    for path, rows in zip(args.inputs, member_rows):
        table = {r.fname: r for r in rows}
        if set(table) != set(reference):
            raise ValueError(f"prediction files disagree on their file set: {path}")
        by_fname.append(table)
    out_rows = []
    for fname in reference:
        stacked = np.stack([table[fname].probs.astype(np.float64) for table in by_fname])
        pred = Prediction(probs=stacked.mean(axis=0).astype(np.float32), source_model="ensemble")
        label = CLASS_NAMES[apply_unknown_threshold(pred, args.unknown_threshold)]
        out_rows.append(PredictionRow(fname=fname, label=label, probs=pred.probs))
    evaluate.save_predictions(args.out, out_rows)
    write_effective_config(cfg, Path(args.out).parent)
    print(f"ensembled {len(args.inputs)} prediction files over {len(out_rows)} inputs -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    cfg = _config(args)
    manifest = load_manifest(args.manifest, root=args.data)
    truth = {e.path: e.class_index for e in manifest.entries}
    rows = evaluate.load_predictions(args.predictions)
    pairs = []
    for row in rows:
        if row.fname not in truth:
            raise ValueError(f"prediction for unknown file {row.fname}")
        pairs.append((truth[row.fname], CLASS_NAMES.index(row.label)))
    acc = evaluate.accuracy(pairs)
    matrix = evaluate.confusion_matrix(pairs)
    print(f"accuracy: {acc:.4f} over {len(pairs)} files")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.txt").write_text(
            f"accuracy: {acc:.6f}\nfiles: {len(pairs)}\n\n" + evaluate.format_confusion(matrix) + "\n",
            encoding="utf-8",
        )
        with open(out_dir / "confusion.csv", "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow([""] + list(CLASS_NAMES))
            for i, name in enumerate(CLASS_NAMES):
                writer.writerow([name] + [int(v) for v in matrix[i]])
        write_effective_config(cfg, out_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="toolkit config file (key = value sections)")
    common.add_argument("--seed", type=int, default=None, help="master seed override")
    common.add_argument("--jobs", type=int, default=None, help="parallel workers for file-level stages")

    parser = argparse.ArgumentParser(prog="speechcmd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic tone corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n-per-class", type=int, default=40)
    p.add_argument("--speakers", type=int, default=8)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("inspect", parents=[common], help="summarize a corpus or manifest")
    p.add_argument("--data")
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("clean", parents=[common], help="propose relabeling low-volume files to silence")
    p.add_argument("--data", required=True)
    p.add_argument("--manifest")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--report", required=True, help="CSV of (path, peak) sorted ascending")
    p.add_argument("--apply", action="store_true")
    p.add_argument("--out", help="updated manifest path (with --apply)")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("split", parents=[common], help="assign speaker-disjoint folds")
    p.add_argument("--data")
    p.add_argument("--manifest")
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("featurize", parents=[common], help="export SCFT feature tensors")
    p.add_argument("--data", required=True)
    p.add_argument("--manifest")
    p.add_argument("--representation", choices=REPRESENTATIONS, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true", help="also export PPM renders")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("augment-preview", parents=[common], help="run the augmentation chain on one file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--noise", nargs="*", default=[])
    p.set_defaults(func=cmd_augment_preview)

    p = sub.add_parser("train", parents=[common], help="train a model on one held-out fold")
    p.add_argument("--data", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", choices=("vgg1d", "resnet1d", "cnn2d"), default=None)
    p.add_argument("--fold", type=int, default=0, help="held-out fold (-1 trains on everything)")
    p.add_argument("--representation", choices=REPRESENTATIONS, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--augment", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="run a checkpoint over a corpus")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--manifest")
    p.add_argument("--representation", choices=REPRESENTATIONS, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--unknown-threshold", type=float, default=0.0)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("ensemble", parents=[common], help="average prediction CSVs per file")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--unknown-threshold", type=float, default=0.0)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("eval", parents=[common], help="score predictions against a manifest")
    p.add_argument("--predictions", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--data")
    p.add_argument("--out", help="directory for report.txt and confusion.csv")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # one-line machine-parsable failure
        message = str(exc).replace("\n", " ")
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
