"""Command-line entry point: ``mhiforge <subcommand> ...``.

Exit status is 0 on success, 1 for usage errors and 2 for data errors. Data
errors print the error class name on stderr.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

import numpy as np

from . import netpbm, tensors
from .attention import NonLocalParams, apply_saliency, non_local_block, saliency_from_features
from .config import Config, env_jobs, load_config
from .errors import DimensionMismatch, FileNotFound, InvalidBoundingBox, MhiError, UnsupportedFormat
from .frames import BoundingBox, open_input
from .fusion import fuse_batch
from .mhi import compute_mhi, quantize_mhi
from .preprocess import augment_set, plan_sampling
from .rgb_mhi import compute_rgb_mhi, quantize_rgb_mhi
from .synthetic import run_benchmark


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _emit(args, payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))


def _jobs(args, cfg: Config) -> int:
    if args.jobs is not None:
        return args.jobs
    return env_jobs() or cfg.jobs


def cmd_mhi(args, cfg):
    stream = open_input(args.input)
    mhi = compute_mhi(stream)
    netpbm.write(args.output, quantize_mhi(mhi))
    _emit(args, {"output": args.output, "frames": stream.frame_count,
                 "max_accum": float(mhi.accum.max())})


def cmd_rgb_mhi(args, cfg):
    stream = open_input(args.input)
    img = compute_rgb_mhi(stream, uniform_weights=args.uniform_weights)
    netpbm.write(args.output, quantize_rgb_mhi(img))
    _emit(args, {"output": args.output, "frames": stream.frame_count,
                 "part_bounds": img.part_bounds,
                 "channel_max": dict(zip("BGR", img.channel_accums.max(axis=(1, 2)).tolist()))})


def cmd_attend(args, cfg):
    features = tensors.load(args.features)
    saliency = saliency_from_features(tensors.load(args.saliency_src))
    tensors.save(args.output, apply_saliency(features, saliency))
    _emit(args, {"output": args.output, "shape": list(features.shape)})


def cmd_nlblock(args, cfg):
    x = tensors.load(args.input)
    mats = tensors.load_all(args.params)
    if len(mats) != 4:
        raise UnsupportedFormat(f"{args.params}: expected 4 tensors (theta, phi, g, w_z), found {len(mats)}")
    z = non_local_block(x, NonLocalParams(*mats, pool_factor=args.pool))
    tensors.save(args.output, z)
    _emit(args, {"output": args.output, "shape": list(z.shape)})


def _read_logits(path: str) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise FileNotFound(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise UnsupportedFormat(f"{path}: {exc}") from None
    k = doc.get("classes")
    rows = doc.get("rows")
    if not isinstance(k, int) or not isinstance(rows, list):
        raise UnsupportedFormat(f"{path}: expected {{\"classes\": K, \"rows\": [...]}}")
    for i, row in enumerate(rows):
        if len(row) != k:
            raise DimensionMismatch(f"{path}: row {i} has {len(row)} values, classes is {k}")
    return np.asarray(rows, dtype=np.float64).reshape(len(rows), k)


def cmd_fuse(args, cfg):
    x1, x2 = _read_logits(args.logits1), _read_logits(args.logits2)
    if x1.shape != x2.shape:
        raise DimensionMismatch(f"logit batches differ: {x1.shape} vs {x2.shape}")
    w = (cfg.w1, cfg.w2)
    probs, preds = fuse_batch(x1, x2, w)
    doc = {"weights": list(w), "probabilities": probs.tolist(), "predictions": preds.tolist()}
    text = json.dumps(doc)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def cmd_sample(args, cfg):
    stream = open_input(args.input)
    plan = plan_sampling(stream.frame_count, cfg.target_frames, cfg.max_skip)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(len(plan.indices))))
    for k, i in enumerate(plan.indices, start=1):
        src = Path(stream.source[i - 1])
        shutil.copyfile(src, out / f"{k:0{width}d}{src.suffix}")
    _emit(args, {"output": str(out), "skip_head": plan.skip_head, "skip_tail": plan.skip_tail,
                 "indices": list(plan.indices)})


def cmd_augment(args, cfg):
    stream = open_input(args.input)
    bbox = BoundingBox.parse(args.bbox) if args.bbox else stream.bbox
    if bbox is None:
        raise InvalidBoundingBox("no --bbox given and the manifest has no bbox line")
    variants = augment_set(stream.to_arrays(), bbox, cfg.seed, cfg.shift_limit, cfg.resize)
    out = Path(args.output)
    for name, frames in variants.items():
        sub = out / name
        sub.mkdir(parents=True, exist_ok=True)
        for t, f in enumerate(frames, start=1):
            netpbm.write(sub / f"{t:04d}.{'pgm' if f.ndim == 2 else 'ppm'}", f)
    _emit(args, {"output": str(out), "variants": list(variants)})


def cmd_bench(args, cfg):
    report = run_benchmark(args.classes, args.samples, cfg.seed, args.train_frac, _jobs(args, cfg))
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    _emit(args, report)
    if not args.json:
        print(f"accuracy {report['accuracy']:.4f}  frame-stack {report['frame_stack_accuracy']:.4f}")
        for row in report["fusion"]:
            print(f"  fusion ({row['w1']}, {row['w2']}): {row['accuracy']:.4f}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file with default overrides")
    common.add_argument("--json", action="store_true", help="print a JSON summary")
    common.add_argument("--jobs", type=int, help="parallel videos (falls back to MHIFORGE_JOBS)")

    parser = _Parser(prog="mhiforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mhi", parents=[common], help="grayscale motion history image")
    p.add_argument("--input", required=True, help="frame directory or manifest")
    p.add_argument("--output", required=True, help="output .pgm")
    p.set_defaults(func=cmd_mhi)

    p = sub.add_parser("rgb-mhi", parents=[common], help="tri-temporal RGB-MHI")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="output .ppm")
    p.add_argument("--uniform-weights", action="store_true", help="use weight 1 for every difference")
    p.set_defaults(func=cmd_rgb_mhi)

    p = sub.add_parser("attend", parents=[common], help="apply motion-based attention")
    p.add_argument("--features", required=True, help="(C,T,H,W) or (C,H,W) MHT1 tensor")
    p.add_argument("--saliency-src", required=True, help="(C,H,W) RGB-MHI feature map")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_attend)

    p = sub.add_parser("nlblock", parents=[common], help="non-local block forward pass")
    p.add_argument("--input", required=True)
    p.add_argument("--params", required=True, help="theta, phi, g, w_z as four MHT1 tensors")
    p.add_argument("--pool", type=int, default=1, help="spatial max-pool stride for phi and g")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_nlblock)

    p = sub.add_parser("fuse", parents=[common], help="weighted late fusion of two logit files")
    p.add_argument("--logits1", required=True)
    p.add_argument("--logits2", required=True)
    p.add_argument("--w1", type=float)
    p.add_argument("--w2", type=float)
    p.add_argument("--output")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("sample", parents=[common], help="select a fixed number of frames")
    p.add_argument("--input", required=True)
    p.add_argument("--frames", type=int, dest="target_frames")
    p.add_argument("--max-skip", type=int)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("augment", parents=[common], help="six cropped/flipped variants")
    p.add_argument("--input", required=True)
    p.add_argument("--bbox", help="x,y,w,h (default: manifest bbox line)")
    p.add_argument("--seed", type=int)
    p.add_argument("--shift-limit", type=int)
    p.add_argument("--size", type=int, dest="resize")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("bench", parents=[common], help="synthetic gesture benchmark")
    p.add_argument("--classes", type=int, default=8)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int)
    p.add_argument("--train-frac", type=float, default=0.8)
    p.add_argument("--report")
    p.set_defaults(func=cmd_bench)
    return parser


_CONFIG_FLAGS = ("target_frames", "max_skip", "shift_limit", "resize", "w1", "w2", "seed")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config).override(
            **{k: getattr(args, k, None) for k in _CONFIG_FLAGS}
        )
        args.func(args, cfg)
    except MhiError as exc:
        print(f"error: {exc.name}: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
