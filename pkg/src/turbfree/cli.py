"""Command-line tools for simulating, reconstructing and scoring correlation images.

Subcommands: simulate, reconstruct, evaluate, sweep and selfcheck.
Exit status is 0 on success, 1 on data or file errors and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import _backend
from .errors import TFIError
from .io import RunConfig, import_frames, read_image, read_stack, write_image, write_stack
from .metrics import SsimParams, curve_csv, normalize_unit, psnr, ssim, sweep
from .reconstruct import (PairingMode, mean_image, normalize_display, reconstruct_g2,
                          reference_g2)
from .sim import render_stack
from .types import FrameStack, frame_to_scalar


def _config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise _Usage(f"--set expects key=value, got {item!r}")
        cfg.set(key.strip(), value)
    for key in ("seed", "scene", "m", "mode"):
        value = getattr(args, key, None)
        if value is not None:
            cfg.set(key, str(value))
    cfg.check()
    return cfg


class _Usage(Exception):
    pass


def cmd_simulate(args):
    cfg = _config(args)
    out = args.out or cfg.stack
    stack = render_stack(cfg.load_scene(), cfg.sim_model(), cfg.frames, args.threads)
    write_stack(stack, out)
    frames_dir = args.dump_frames or cfg.frames_dir
    if frames_dir:
        d = Path(frames_dir)
        d.mkdir(parents=True, exist_ok=True)
        width = len(str(stack.m))
        for alpha, frame in enumerate(stack, start=1):
            write_image(frame, d / f"frame_{alpha:0{width}d}.png")
    print(f"wrote {stack.m} frames of {stack.shape[1]}x{stack.shape[0]}x{stack.shape[2]} to {out}")
    return 0


def cmd_reconstruct(args):
    if Path(args.stack).is_dir():
        stack = import_frames(args.stack, args.pattern)
    else:
        stack = read_stack(args.stack)
    g = reconstruct_g2(stack, args.mode, args.threads)
    write_image(normalize_display(g, args.bit_depth), args.out)
    if args.raw:
        np.save(args.raw, g.values)
    if args.dump_mean:
        write_image(normalize_display(mean_image(stack), args.bit_depth), args.dump_mean)
    print(f"{args.mode.upper()} reconstruction of {stack.m} frames written to {args.out} "
          f"(backend: {_backend.BACKEND})")
    return 0


def cmd_evaluate(args):
    ref = read_image(args.reference)
    a = frame_to_scalar(read_image(args.image))
    b = frame_to_scalar(ref)
    if args.raw:
        top = float(ref.max_count)
        s, q = ssim(a, b, SsimParams(dynamic_range=top)), psnr(a, b, top)
    else:
        a, b = normalize_unit(a), normalize_unit(b)
        s, q = ssim(a, b), psnr(a, b, 1.0)
    line = f"ssim,psnr\n{s:.6f},{q:.6f}\n"
    sys.stdout.write(line)
    if args.csv:
        Path(args.csv).write_text(line)
    return 0


def cmd_sweep(args):
    cfg = _config(args)
    ms = [int(t) for t in args.ms.split(",")] if args.ms else list(cfg.ms)
    points = sweep(cfg.load_scene(), cfg.sim_model(), ms, cfg.mode,
                   traditional=args.traditional, threads=args.threads)
    text = curve_csv(points)
    out = args.out or (cfg.csv if "csv" in cfg._explicit else None)
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)
    return 0


def selfcheck(seed=0, trials=20) -> list[tuple[str, bool]]:
    """Run the oracle-equivalence and closed-form identity checks."""
    rng = np.random.default_rng(seed)
    results = []
    ok = True
    for _ in range(trials):
        m = int(rng.integers(2, 17))
        h, w = (int(v) for v in rng.integers(1, 7, size=2))
        stack = FrameStack.from_array(rng.integers(0, 256, (m, h, w)).astype(np.uint8))
        for mode in PairingMode:
            ok &= reconstruct_g2(stack, mode) == reference_g2(stack, mode)
    results.append(("oracle equivalence (AC and CC)", bool(ok)))
    hand = FrameStack.from_array(np.array([1, 2, 3], dtype=np.uint8).reshape(3, 1, 1))
    results.append(("hand vector [1,2,3] -> 26/3",
                    abs(reconstruct_g2(hand).values.item() - 26 / 3) <= 1e-12))
    ok = True
    for c in (0, 1, 7, 255):
        stack = FrameStack.from_array(np.full((5, 3, 3), c, dtype=np.uint8))
        ok &= bool(np.all(reconstruct_g2(stack).values == 2.0 * c * c))
    results.append(("constant stack -> 2c^2", ok))
    single = rng.integers(0, 256, (1, 4, 4)).astype(np.uint8)
    g = reconstruct_g2(FrameStack.from_array(single)).values[:, :, 0]
    results.append(("single frame -> 2n^2", bool(np.all(g == 2.0 * single[0].astype(float) ** 2))))
    return results


def cmd_selfcheck(args):
    results = selfcheck(args.seed)
    for name, passed in results:
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
    print(f"backend: {_backend.BACKEND}")
    return 0 if all(p for _, p in results) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="turbfree", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (0 = one per CPU; default from TFI_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)

    def config_args(sp):
        sp.add_argument("--config", help="key = value run configuration file")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--scene", help="builtin scene name or image path")
        sp.add_argument("-m", "--frames", dest="m", type=int, help="number of frames")

    sp = sub.add_parser("simulate", help="render a synthetic frame stack")
    config_args(sp)
    sp.add_argument("--out", help="stack file to write (default: config 'stack')")
    sp.add_argument("--dump-frames", metavar="DIR", help="also write each frame as PNG")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("reconstruct", help="correlation image from a stack file")
    sp.add_argument("stack", help="stack file, or a directory of PGM/PNG frames")
    sp.add_argument("--pattern", help="glob selecting frame files when STACK is a directory")
    sp.add_argument("--mode", choices=["ac", "cc"], default="ac")
    sp.add_argument("--out", required=True, help="output image (.png or .pgm)")
    sp.add_argument("--bit-depth", type=int, choices=[8, 16], default=8)
    sp.add_argument("--dump-mean", metavar="PATH", help="also write the mean (traditional) image")
    sp.add_argument("--raw", metavar="PATH", help="also save unnormalised values as .npy")
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("evaluate", help="SSIM and PSNR of an image against a reference")
    sp.add_argument("image")
    sp.add_argument("reference")
    sp.add_argument("--csv", help="also write the scores to this CSV file")
    sp.add_argument("--raw", action="store_true",
                    help="score raw counts instead of min-max normalised images")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("sweep", help="SSIM/PSNR versus number of measurements")
    config_args(sp)
    sp.add_argument("--mode", choices=["ac", "cc"])
    sp.add_argument("--ms", help="comma-separated frame counts, ascending")
    sp.add_argument("--traditional", action="store_true", help="score the mean frame instead")
    sp.add_argument("--out", help="CSV output path (also printed to stdout)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("selfcheck", help="verify kernels against the reference oracle")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_selfcheck)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except (TFIError, OSError, ValueError) as exc:
        print(f"turbfree {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
