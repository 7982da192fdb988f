"""Command-line front end: embed, restore, verify, standalone codec, and bench.

Exit codes: 0 success, 2 flag/input errors, 3 capacity or codec errors,
4 integrity failures during restoration (plus 1 from `verify` on mismatch).
Output files are written atomically (temp file plus rename), so a failing
command leaves no partial output behind.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import errors
from .codec import CodecParams, CodedPacket, decode as codec_decode, encode as codec_encode
from .image import GrayPlane, Roi, load_diff, load_image, save_diff, save_image
from .metrics import format_csv, rd_sweep
from .pipeline import EmbedConfig, embed, restore
from .util import atomic_write_bytes
from .watermark import AlphaParams

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CODEC = 3
EXIT_INTEGRITY = 4

_USAGE_ERRORS = (
    errors.UnsupportedFormat,
    errors.MalformedHeader,
    errors.RoiOutOfBounds,
    errors.DimensionMismatch,
    errors.QpOutOfRange,
    OSError,
    ValueError,
)
_CODEC_ERRORS = (
    errors.CapacityExceeded,
    errors.NoZeroBin,
    errors.NoCoverRegion,
    errors.EncodeOverflow,
    errors.BadTemplate,
    errors.SolveFailure,
    errors.EigenFailure,
    errors.InvalidSigma,
)
_INTEGRITY_ERRORS = (
    errors.CrcMismatch,
    errors.CorruptStream,
    errors.UnsupportedVersion,
    errors.BadVersion,
    errors.RangeViolation,
)


class _IntegrityFailure(Exception):
    """Wrapper that forces exit code 4 for failures inside restoration."""


def _parse_roi(text: str) -> Roi:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"roi must be X,Y,W,H, got {text!r}")
    x, y, w, h = (int(p) for p in parts)
    return Roi(x, y, w, h)


def _parse_list(text: str, cast):
    return tuple(cast(p) for p in text.split(",") if p)


def _load_config(path: str) -> dict:
    values = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {line!r}")
        key, val = line.split("=", 1)
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config(args: argparse.Namespace) -> None:
    # config file fills in flags the command line left unset
    if not getattr(args, "config", None):
        return
    for key, val in _load_config(args.config).items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, val)


def _codec_params(args) -> CodecParams:
    qp = int(args.qp) if args.qp is not None else 28
    threshold = float(args.contour_threshold) if args.contour_threshold is not None else 16.0
    mu = args.mu if args.mu is not None else "auto"
    if str(mu) == "auto":
        grid = (1.0, 0.1, 0.01, 0.001, 0.0001)
    else:
        grid = (float(mu),)
    return CodecParams(qp=qp, mu_grid=grid, contour_threshold=threshold)


def _write_atomic(save_fn, obj, path: str) -> None:
    target = Path(path)
    with tempfile.TemporaryDirectory(dir=target.parent or Path(".")) as td:
        staged = Path(td) / ("staged" + target.suffix)
        save_fn(obj, staged)
        atomic_write_bytes(path, staged.read_bytes())


def _json_num(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def cmd_embed(args) -> int:
    host = load_image(args.host)
    roi = _parse_roi(args.roi)
    params = _codec_params(args)
    if args.watermarked and args.watermark:
        raise ValueError("give either --watermarked or --watermark, not both")
    if args.watermarked:
        other = load_image(args.watermarked)
        visible = None
    elif args.watermark:
        other = load_image(args.watermark)
        alpha = float(args.alpha) if args.alpha is not None else 0.5
        visible = AlphaParams(alpha=alpha, roi=roi)
    else:
        raise ValueError("one of --watermarked or --watermark is required")
    final, report = embed(host, other, EmbedConfig(codec=params, roi=roi, visible=visible))
    _write_atomic(save_image, final, args.out)
    if args.report:
        doc = {
            "schema": 1,
            "qp": int(args.qp) if args.qp is not None else 28,
            "mu": args.mu if args.mu is not None else "auto",
            "roi": [roi.x0, roi.y0, roi.width, roi.height],
            "n_d": report.n_d,
            "n_c": report.n_c,
            "ratio": report.ratio,
            "psnr_i": _json_num(report.psnr_i),
            "psnr_n": _json_num(report.psnr_n),
            "psnr_w": _json_num(report.psnr_w),
            "chosen_mu": report.chosen_mu,
            "alternation_rounds": report.alternation_rounds,
        }
        atomic_write_bytes(args.report, (json.dumps(doc, indent=2) + "\n").encode())
    print(f"embedded: n_c={report.n_c} bits, ratio={report.ratio:.6g}")
    return EXIT_OK


def cmd_restore(args) -> int:
    final = load_image(args.inp)
    try:
        host, intermediate = restore(final)
    except (errors.MalformedHeader, *_INTEGRITY_ERRORS) as exc:
        raise _IntegrityFailure(str(exc)) from exc
    _write_atomic(save_image, host, args.out_host)
    if args.out_watermarked:
        _write_atomic(save_image, intermediate, args.out_watermarked)
    print(f"restored host -> {args.out_host}")
    return EXIT_OK


def cmd_verify(args) -> int:
    a = load_image(args.a)
    b = load_image(args.b)
    if isinstance(a, GrayPlane) != isinstance(b, GrayPlane):
        print("DIFFER: one image is gray, the other color")
        return 1
    if isinstance(a, GrayPlane):
        same = np.array_equal(a.pixels, b.pixels)
    else:
        same = all(
            np.array_equal(ca.pixels, cb.pixels) for ca, cb in zip(a.channels, b.channels)
        )
    print("IDENTICAL" if same else "DIFFER")
    return EXIT_OK if same else 1


def cmd_codec_encode(args) -> int:
    plane = load_diff(args.inp)
    params = _codec_params(args)
    roi = Roi(0, 0, plane.width, plane.height)
    result = codec_encode(plane, roi, params)
    atomic_write_bytes(args.out, result.packet.to_bytes())
    if args.recon:
        _write_atomic(save_diff, result.reconstructed, args.recon)
    print(result.packet.bit_length)
    return EXIT_OK


def cmd_codec_decode(args) -> int:
    data = Path(args.inp).read_bytes()
    plane = codec_decode(CodedPacket.from_bytes(data))
    _write_atomic(save_diff, plane, args.out)
    print(f"decoded {plane.width}x{plane.height} plane -> {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise ValueError(f"corpus directory not found: {corpus_dir}")
    corpus = []
    for host_path in sorted(corpus_dir.glob("*_host.*")):
        stem = host_path.name.rsplit("_host.", 1)[0]
        wm = next(iter(sorted(corpus_dir.glob(f"{stem}_watermarked.*"))), None)
        roi_file = corpus_dir / f"{stem}_roi.txt"
        if wm is None or not roi_file.exists():
            raise ValueError(f"corpus item {stem!r} is missing its watermarked image or roi")
        roi = _parse_roi(roi_file.read_text(encoding="utf-8").strip())
        corpus.append((load_image(host_path), load_image(wm), roi))
    if not corpus:
        raise ValueError(f"no corpus items (*_host.*) in {corpus_dir}")
    mus = _parse_list(args.mu, float) if args.mu else (0.1, 0.01, 0.001)
    qps = _parse_list(args.qp, int) if args.qp else (28, 32, 36, 40)
    points = rd_sweep(corpus, mus, qps)
    atomic_write_bytes(args.out, format_csv(points).encode())
    print(f"wrote {len(points)} rd points -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rvw", description="Reversible visible watermarking toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_embed = sub.add_parser("embed", help="embed a watermark plus its recovery payload")
    p_embed.add_argument("--host", required=True)
    p_embed.add_argument("--watermarked", help="pre-watermarked image from any visible scheme")
    p_embed.add_argument("--watermark", help="ROI-sized watermark; alpha-fused internally")
    p_embed.add_argument("--alpha", default=None, help="fusion opacity (default 0.5)")
    p_embed.add_argument("--roi", required=True, help="X,Y,W,H")
    p_embed.add_argument("--out", required=True)
    p_embed.add_argument("--qp", default=None, help="quantization parameter (default 28)")
    p_embed.add_argument("--mu", default=None, help="'auto' for the grid search or a value")
    p_embed.add_argument("--contour-threshold", dest="contour_threshold", default=None)
    p_embed.add_argument("--report", help="write a JSON run report here")
    p_embed.add_argument("--config", help="key = value defaults file")
    p_embed.set_defaults(func=cmd_embed)

    p_restore = sub.add_parser("restore", help="blindly restore the original host")
    p_restore.add_argument("--in", dest="inp", required=True)
    p_restore.add_argument("--out-host", dest="out_host", required=True)
    p_restore.add_argument("--out-watermarked", dest="out_watermarked")
    p_restore.set_defaults(func=cmd_restore)

    p_verify = sub.add_parser("verify", help="compare two images sample-exactly")
    p_verify.add_argument("a")
    p_verify.add_argument("b")
    p_verify.set_defaults(func=cmd_verify)

    p_codec = sub.add_parser("codec", help="standalone difference-plane codec")
    codec_sub = p_codec.add_subparsers(dest="codec_command", required=True)
    p_ce = codec_sub.add_parser("encode")
    p_ce.add_argument("--in", dest="inp", required=True, help="DIFF file")
    p_ce.add_argument("--out", required=True, help="packet file")
    p_ce.add_argument("--recon", help="also write the encoder reconstruction (DIFF)")
    p_ce.add_argument("--qp", default=None)
    p_ce.add_argument("--mu", default=None)
    p_ce.add_argument("--contour-threshold", dest="contour_threshold", default=None)
    p_ce.add_argument("--config", help="key = value defaults file")
    p_ce.set_defaults(func=cmd_codec_encode)
    p_cd = codec_sub.add_parser("decode")
    p_cd.add_argument("--in", dest="inp", required=True, help="packet file")
    p_cd.add_argument("--out", required=True, help="DIFF file")
    p_cd.set_defaults(func=cmd_codec_decode)

    p_bench = sub.add_parser("bench", help="rate-distortion sweep over a corpus directory")
    p_bench.add_argument("--corpus", required=True)
    p_bench.add_argument("--mu", default=None, help="comma list (default 0.1,0.01,0.001)")
    p_bench.add_argument("--qp", default=None, help="comma list (default 28,32,36,40)")
    p_bench.add_argument("--out", required=True, help="CSV path")
    p_bench.add_argument("--config", help="key = value defaults file")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already uses 2 for usage errors
        return int(exc.code or 0)
    try:
        _apply_config(args)
        return args.func(args)
    except _IntegrityFailure as exc:
        print(f"rvw: integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except _INTEGRITY_ERRORS as exc:
        print(f"rvw: integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except _CODEC_ERRORS as exc:
        print(f"rvw: codec error: {exc}", file=sys.stderr)
        return EXIT_CODEC
    except _USAGE_ERRORS as exc:
        print(f"rvw: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
