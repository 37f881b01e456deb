"""``diffstr`` command-line entry point.

Subcommands: render-data, train, recognize, evaluate, ablate-head, ablate-steps.
stdout carries the primary result, stderr diagnostics.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import shutil
import sys
from contextlib import contextmanager
from pathlib import Path

import torch

log = logging.getLogger("diffstr")

SEED_ENV = "DIFFSTR_SEED"
MAX_PER_SEED = 1_000_000


class CommandError(Exception):
    pass


def _env_seed(default=0):
    v = os.environ.get(SEED_ENV)
    return int(v) if v not in (None, "") else default


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_sets(cfg, sets):
    over = {}
    for item in sets or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise CommandError(f"--set expects key=value, got {item!r}")
        over[key] = _parse_value(value)
    try:
        return cfg.replace(**over) if over else cfg
    except KeyError as e:
        raise CommandError(f"unknown config key {e}") from None


def _resolve_config(path, sets):
    from .config import load_config, load_profile

    if path is None:
        cfg = load_profile("toy")
        raw = {}
    else:
        p = Path(path)
        if not p.is_file():
            raise CommandError(f"config file not found: {p}")
        try:
            raw = json.loads(p.read_text())
            cfg = load_config(p)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise CommandError(f"invalid config {p}: {e}") from None
    if "seed" not in raw.get("train", {}) and os.environ.get(SEED_ENV):
        cfg = cfg.replace(**{"train.seed": _env_seed()})
    return _apply_sets(cfg, sets)


@contextmanager
def _locked(out: Path):
    out.mkdir(parents=True, exist_ok=True)
    lock = out / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise CommandError(f"output directory {out} is locked by another command ({lock})") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield out
    finally:
        lock.unlink(missing_ok=True)


def _parse_ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CommandError(f"expected comma-separated integers, got {text!r}") from None


# ----------------------------------------------------------------------------


def cmd_render_data(args):
    from .data import RenderSpec, render_dataset, write_dataset

    seed = args.seed if args.seed is not None else _env_seed()
    if args.n < 0 or args.n > MAX_PER_SEED:
        raise CommandError(f"--n must be in [0, {MAX_PER_SEED}]")
    flags = {f for f in (args.augment or "").split(",") if f and f != "none"}
    unknown = flags - {"rotation", "noise", "blur"}
    if unknown:
        raise CommandError(f"unknown augmentation(s): {sorted(unknown)}")
    spec = RenderSpec(charset=args.charset, min_len=1, max_len=args.maxlen, H=args.height,
                      W=args.width, C=args.channels, rotation="rotation" in flags,
                      noise="noise" in flags, blur="blur" in flags)
    out = Path(args.out)
    existed = out.exists()
    try:
        out.mkdir(parents=True, exist_ok=True)
        base = seed * MAX_PER_SEED
        samples = render_dataset(spec, range(base, base + args.n))
        write_dataset(samples, out, spec)
    except BaseException:
        if not existed:
            shutil.rmtree(out, ignore_errors=True)
        raise
    print(out)
    return 0


def cmd_train(args):
    from .checkpoint import save_checkpoint
    from .data import load_dataset, stack_images
    from .evaluation import build_model, evaluate
    from .train import NonFiniteLoss, fit

    if args.resume:
        raise CommandError("--resume is unsupported")
    cfg = _resolve_config(args.config, args.set)
    vocab, sched = cfg.vocabulary(), cfg.schedule()
    v = cfg.vision
    train_set = load_dataset(args.data, vocab, v.H, v.W, v.C, cfg.vocab.max_label_len)
    if not train_set:
        raise CommandError("empty dataset")
    val_set = None
    if args.val:
        val_set = load_dataset(args.val, vocab, v.H, v.W, v.C, cfg.vocab.max_label_len)

    with _locked(Path(args.out)) as out:
        (out / "config.resolved.json").write_text(cfg.to_json())
        model = build_model(cfg)
        best = {"score": -math.inf}
        metrics_fh = open(out / "metrics.jsonl", "w", encoding="utf-8")

        def on_step(m):
            metrics_fh.write(json.dumps(m, sort_keys=True) + "\n")

        def on_epoch(epoch, means):
            if val_set is not None:
                rep = evaluate(model, val_set, vocab, sched, cfg.diffusion.kernel,
                               cfg.eval.seeds[:1], cfg.eval.mode, cfg.eval.charset_mode,
                               cfg.eval.batch_size, "val")
                score, extra = rep.word_accuracy, {"val_word_accuracy": rep.word_accuracy}
            else:
                score, extra = -means["loss"], {}
            if score > best["score"]:
                best["score"] = score
                save_checkpoint(out / "best.ckpt", model, cfg,
                                {"epoch": epoch + 1, "train_loss": means["loss"], **extra})

        try:
            fit(model, stack_images(train_set), [s.label for s in train_set], vocab, sched,
                cfg.diffusion.kernel, cfg.train, on_step=on_step, on_epoch=on_epoch)
        except NonFiniteLoss as e:
            raise CommandError(f"training aborted: {e}") from None
        finally:
            metrics_fh.close()
        save_checkpoint(out / "final.ckpt", model, cfg, {"epoch": cfg.train.epochs})
        rep = evaluate(model, train_set, vocab, sched, cfg.diffusion.kernel, cfg.eval.seeds,
                       cfg.eval.mode, cfg.eval.charset_mode, cfg.eval.batch_size, "train")
        (out / "train_eval.json").write_text(rep.to_json())
    print(f"train word accuracy {rep.word_accuracy:.4f}")
    return 0


def cmd_recognize(args):
    from .checkpoint import load_checkpoint
    from .data import load_image
    from .evaluation import recognize

    ckpt = Path(args.checkpoint)
    if not ckpt.is_file():
        raise CommandError(f"checkpoint not found: {ckpt}")
    model, cfg, _ = load_checkpoint(ckpt)
    vocab, sched = cfg.vocabulary(), cfg.schedule()
    v = cfg.vision
    img = load_image(args.image, v.H, v.W, v.C)[None]
    seed = args.seed if args.seed is not None else _env_seed()
    gen = torch.Generator().manual_seed(seed)

    def trace(t, x):
        row = "".join(vocab.token_str(int(tok)) for tok in x[0])
        print(f"t={t - 1}\t{row}")

    (text,) = recognize(model, img, vocab, sched, cfg.diffusion.kernel, gen,
                        "greedy" if args.greedy else cfg.eval.mode,
                        callback=trace if args.trace else None)
    print(text)
    return 0


def cmd_evaluate(args):
    from .checkpoint import load_checkpoint
    from .data import load_dataset
    from .evaluation import evaluate

    model, cfg, _ = load_checkpoint(args.checkpoint)
    vocab, sched = cfg.vocabulary(), cfg.schedule()
    v = cfg.vision
    samples = load_dataset(args.data, vocab, v.H, v.W, v.C)
    if not samples:
        raise CommandError("empty dataset")
    seeds = _parse_ints(args.seeds) if args.seeds else cfg.eval.seeds
    mode = "greedy" if args.greedy else cfg.eval.mode
    charset_mode = args.charset_mode or cfg.eval.charset_mode
    with _locked(Path(args.out)) as out:
        rep = evaluate(model, samples, vocab, sched, cfg.diffusion.kernel, seeds, mode,
                       charset_mode, cfg.eval.batch_size, Path(args.data).name)
        (out / "report.json").write_text(rep.to_json())
    for run in rep.runs:
        print(f"seed {run.seed}\t{run.word_accuracy:.4f}")
    print(f"mean\t{rep.word_accuracy:.4f}")
    return 0


def cmd_ablate_head(args):
    from .evaluation import ablate_presence_head, write_reports

    cfg = _resolve_config(args.config, args.set)
    with _locked(Path(args.out)) as out:
        (out / "config.resolved.json").write_text(cfg.to_json())
        reports = ablate_presence_head(cfg)
        summary = write_reports(out, reports)
    sys.stdout.write(summary.read_text())
    return 0


def cmd_ablate_steps(args):
    from .evaluation import ablate_time_steps, write_reports

    cfg = _resolve_config(args.config, args.set)
    T_list = _parse_ints(args.T)
    if not T_list or min(T_list) < 1:
        raise CommandError(f"--T needs step counts >= 1, got {args.T!r}")
    with _locked(Path(args.out)) as out:
        (out / "config.resolved.json").write_text(cfg.to_json())
        reports = ablate_time_steps(cfg, T_list)
        summary = write_reports(out, {f"T{T}": r for T, r in zip(T_list, reports)})
    sys.stdout.write(summary.read_text())
    return 0


# ----------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="diffstr", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("render-data", help="render a synthetic dataset directory")
    r.add_argument("--out", required=True)
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--charset", default="alnum36", help="full94, alnum36 or a charset file")
    r.add_argument("--maxlen", type=int, default=8)
    r.add_argument("--augment", default="none", help="comma list of rotation,noise,blur")
    r.add_argument("--height", type=int, default=32)
    r.add_argument("--width", type=int, default=64)
    r.add_argument("--channels", type=int, default=1)
    r.set_defaults(func=cmd_render_data)

    t = sub.add_parser("train", help="train a model on a dataset directory")
    t.add_argument("--config")
    t.add_argument("--data", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--val", help="optional validation directory for best-checkpoint selection")
    t.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config field")
    t.add_argument("--resume", action="store_true", help=argparse.SUPPRESS)
    t.set_defaults(func=cmd_train)

    g = sub.add_parser("recognize", help="read the text in one image")
    g.add_argument("--checkpoint", required=True)
    g.add_argument("--image", required=True)
    g.add_argument("--greedy", action="store_true")
    g.add_argument("--seed", type=int)
    g.add_argument("--trace", action="store_true", help="print the sequence after every step")
    g.set_defaults(func=cmd_recognize)

    e = sub.add_parser("evaluate", help="word accuracy of a checkpoint on a dataset directory")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--seeds")
    e.add_argument("--greedy", action="store_true")
    e.add_argument("--charset-mode", choices=["full94", "alnum36-ci"])
    e.set_defaults(func=cmd_evaluate)

    for name, func, helptext in (("ablate-head", cmd_ablate_head, "presence-head ablation"),
                                 ("ablate-steps", cmd_ablate_steps, "total-step ablation")):
        a = sub.add_parser(name, help=helptext)
        a.add_argument("--config")
        a.add_argument("--out", required=True)
        a.add_argument("--set", action="append", metavar="KEY=VALUE")
        if name == "ablate-steps":
            a.add_argument("--T", required=True, help="comma-separated step counts")
        a.set_defaults(func=func)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CommandError as e:
        print(f"diffstr {args.command}: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as e:
        print(f"diffstr {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
