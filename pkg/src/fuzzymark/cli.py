"""Command line interface: embed, extract, features, bench.

Exit codes: 0 success, 2 validation/config error, 3 I/O error, 4 internal.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import attacks, features, fuzzy, metrics, watermark
from .core import load_pgm, quantize, save_pgm

DEFAULT_TRIALS = 10
DEFAULT_SEED = 0

# One benchmark battery row: (attack name, fixed params). Stochastic attacks
# draw from the per-row derived seed; the rest ignore it.
DEFAULT_ATTACKS = (
    [("none", {})]
    + [("jpeg", {"quality": q}) for q in (10, 60, 70, 75, 80, 85, 90, 95)]
    + [
        ("gaussian", {"size": s, "sigma": g})
        for s in (3, 5, 7)
        for g in (0.5, 1.0, 2.0)
    ]
    + [("median", {"size": s}) for s in (3, 5, 7)]
    + [("salt_pepper", {"density": d}) for d in (0.01, 0.02, 0.05)]
    + [("awgn", {"sigma": s}) for s in (5, 10, 15, 20, 25, 30)]
    + [("crop", {"percent": p, "mode": m}) for m in ("center", "around") for p in (5, 10, 15, 20)]
)

CSV_FIELDS = ("image", "attack", "params", "seed", "trial", "nc", "ber", "psnr", "mssim", "error")


def run_attack(name: str, params: dict, img, seed):
    if name == "none":
        return np.array(img, copy=True)
    if name == "jpeg":
        return attacks.jpeg(img, params["quality"])
    if name == "gaussian":
        return attacks.gaussian_filter(img, params["size"], params["sigma"])
    if name == "median":
        return attacks.median_filter(img, params["size"])
    if name == "salt_pepper":
        return attacks.salt_pepper(img, params["density"], seed)
    if name == "awgn":
        return attacks.awgn(img, params["sigma"], seed)
    if name == "crop":
        return attacks.crop(img, params["percent"], params.get("mode", "center"),
                            params.get("fill", 0.0))
    raise ValueError(f"unknown attack {name!r}")


def derive_seed(master: int, *parts: int) -> int:
    """Deterministic per-trial seed from the master seed and indices."""
    ss = np.random.SeedSequence([int(master) & (2**64 - 1), *[int(p) for p in parts]])
    return int(ss.generate_state(1, np.uint64)[0])


def load_config(path):
    if path is None:
        return {}
    with open(path) as fh:
        try:
            config = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config {path}: {exc}") from None
    if not isinstance(config, dict):
        raise ValueError(f"config {path}: expected a JSON object")
    return config


def build_setup(config: dict):
    embed_cfg = watermark.EmbedConfig.from_dict(config.get("embed", {}))
    if "fis" in config:
        fis = fuzzy.load_fis(config["fis"])
    else:
        fis = fuzzy.default_fis()
    return embed_cfg, fis


def compute_strength(img, fis):
    """Feature maps -> fuzzy strength map for one cover image."""
    sal = features.saliency_map(img)
    inten = features.intensity_map(img)
    edge = features.edge_concentration(img)
    smap = fuzzy.strength_map(fis, sal, edge, inten)
    return smap, {"saliency": sal, "intensity": inten, "edge": edge}


def _payload_for(args, master_seed):
    if args.payload:
        with open(args.payload) as fh:
            return watermark.parse_payload(fh.read()), args.payload
    return watermark.random_payload(master_seed), None


def cmd_embed(args) -> int:
    config = load_config(args.config)
    embed_cfg, fis = build_setup(config)
    cover = load_pgm(args.cover)
    bits, payload_src = _payload_for(args, args.seed)
    smap, _ = compute_strength(cover, fis)
    marked = quantize(watermark.embed(cover, bits, smap, embed_cfg))

    out = args.out or (args.cover.rsplit(".", 1)[0] + ".wm.pgm")
    save_pgm(marked, out)
    strength_out = out.rsplit(".", 1)[0] + ".strength.pgm"
    save_pgm(smap * 255.0, strength_out)
    if payload_src is None:
        payload_src = out.rsplit(".", 1)[0] + ".payload.txt"
        with open(payload_src, "w") as fh:
            fh.write(watermark.format_payload(bits) + "\n")
    print(f"watermarked: {out}")
    print(f"strength map: {strength_out}")
    print(f"payload: {payload_src}")
    print(f"psnr: {metrics.psnr(cover, marked):.4f} dB")
    print(f"mssim: {metrics.mssim(cover, marked):.6f}")
    return 0


def cmd_extract(args) -> int:
    config = load_config(args.config)
    embed_cfg, _ = build_setup(config)
    raw = watermark.extract(load_pgm(args.image), embed_cfg)
    bits = watermark.vote(raw, cfg=embed_cfg)
    text = watermark.format_payload(bits)
    agreement = float((raw == bits[None, :]).mean())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"payload: {args.out}")
    else:
        print(text)
    print(f"copies agreeing with vote: {agreement * 100:.2f}%")
    return 0


def cmd_features(args) -> int:
    config = load_config(args.config)
    _, fis = build_setup(config)
    img = load_pgm(args.image)
    smap, maps = compute_strength(img, fis)
    maps = dict(maps, strength=smap)
    base = args.out_dir.rstrip("/") if args.out_dir else "."
    for name, data in maps.items():
        path = f"{base}/{name}.pgm"
        save_pgm(data * 255.0, path)
        print(f"{name}: {path} (min {data.min():.4f}, max {data.max():.4f})")
    return 0


def _fmt(value) -> str:
    if value == float("inf"):
        return "inf"
    return f"{value:.4f}"


def _params_str(params: dict) -> str:
    return ",".join(f"{k}={v}" for k, v in params.items())


def cmd_bench(args) -> int:
    config = load_config(args.config)
    bench = config.get("bench", {})
    images = args.images or bench.get("images")
    if not images:
        raise ValueError("bench needs images (config bench.images or --images)")
    battery = bench.get("attacks", "default")
    if battery == "default":
        battery = DEFAULT_ATTACKS
    else:
        battery = [(entry["name"], entry.get("params", {})) for entry in battery]
        known = {"none", "jpeg", "gaussian", "median", "salt_pepper", "awgn", "crop"}
        for name, _ in battery:
            if name not in known:
                raise ValueError(f"unknown attack {name!r} in bench config")
    trials = args.trials if args.trials is not None else int(bench.get("trials", DEFAULT_TRIALS))
    master = args.seed if args.seed is not None else int(bench.get("seed", DEFAULT_SEED))
    out_path = args.out or bench.get("out", "bench.csv")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")

    embed_cfg, fis = build_setup(config)
    rows = []
    for img_idx, path in enumerate(images):
        cover = load_pgm(path)
        bits = watermark.random_payload(derive_seed(master, img_idx, 0xFFFF, 0))
        smap, _ = compute_strength(cover, fis)
        marked = quantize(watermark.embed(cover, bits, smap, embed_cfg))
        label = path.rsplit("/", 1)[-1]
        for att_idx, (name, params) in enumerate(battery):
            group = []
            for trial in range(trials):
                seed = derive_seed(master, img_idx, att_idx, trial)
                row = {
                    "image": label, "attack": name, "params": _params_str(params),
                    "seed": str(seed), "trial": str(trial), "error": "",
                }
                try:
                    attacked = run_attack(name, params, marked, seed)
                    got = watermark.vote(watermark.extract(attacked, embed_cfg), cfg=embed_cfg)
                    values = {
                        "nc": metrics.nc(got, bits),
                        "ber": metrics.ber(got, bits),
                        "psnr": metrics.psnr(marked, attacked),
                        "mssim": metrics.mssim(marked, attacked),
                    }
                    row.update({k: _fmt(v) for k, v in values.items()})
                    group.append(values)
                except Exception as exc:  # keep the run going, record the row
                    row.update({"nc": "", "ber": "", "psnr": "", "mssim": "",
                                "error": f"{type(exc).__name__}: {exc}"})
                rows.append(row)
            if group:
                rows.append({
                    "image": label, "attack": name, "params": _params_str(params),
                    "seed": "", "trial": "mean", "error": "",
                    **{k: _fmt(float(np.mean([v[k] for v in group])))
                       for k in ("nc", "ber", "psnr", "mssim")},
                })
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {out_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzymark",
                                     description="Blind fuzzy-adaptive image watermarking")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a 128-bit payload into a PGM cover")
    p.add_argument("cover")
    p.add_argument("--payload", help="payload file (128 chars of 0/1)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help="payload RNG seed when --payload is absent")
    p.add_argument("--out", "-o", help="watermarked image path")
    p.add_argument("--config", help="JSON config (embed/fis sections)")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover the payload from an image")
    p.add_argument("image")
    p.add_argument("--out", "-o", help="write the payload here instead of stdout")
    p.add_argument("--config", help="JSON config (embed section)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("features", help="dump feature and strength maps as PGM")
    p.add_argument("image")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--config", help="JSON config (fis section)")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("bench", help="run the attack benchmark, write a CSV report")
    p.add_argument("--config", help="JSON config (bench/embed/fis sections)")
    p.add_argument("--images", nargs="*", help="cover images (overrides config)")
    p.add_argument("--trials", type=int, help=f"trials per attack (default {DEFAULT_TRIALS})")
    p.add_argument("--seed", type=int, help="master seed for payloads and attacks")
    p.add_argument("--out", "-o", help="CSV path (default bench.csv)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code or 0)
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - safety net
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
