"""
Render, train, recognise
========================

A few minutes on a CPU: render a small synthetic set, fit a shrunken model and
decode held-out images.  The full toy protocol uses the ``toy`` profile as is
(5000 images, 30 epochs).
"""

import logging

from diffstr import load_profile
from diffstr.data import render_dataset, stack_images
from diffstr.evaluation import build_model, evaluate, recognize
from diffstr.train import fit

logging.basicConfig(level=logging.INFO, format="%(message)s")

cfg = load_profile("toy").replace(**{
    "vocab.max_label_len": 4, "data.render.max_len": 4,
    "vision.n_enc_layers": 2, "train.epochs": 12, "train.warmup_epochs": 1,
})
vocab, sched = cfg.vocabulary(), cfg.schedule()

train = render_dataset(cfg.data.render, range(0, 1000))
held_out = render_dataset(cfg.data.render, range(10_000_000, 10_000_128))

# Pixels are (H, W, C) in [-1, 1]; a quick look at one image as text art.
img = train[0].image[::2, :, 0]
print(train[0].label)
print("\n".join("".join("#" if v > 0 else "." for v in row) for row in img))

model = build_model(cfg)
fit(model, stack_images(train), [s.label for s in train], vocab, sched,
    cfg.diffusion.kernel, cfg.train)

report = evaluate(model, held_out, vocab, sched, cfg.diffusion.kernel, seeds=[1, 2])
print(f"held-out word accuracy {report.word_accuracy:.3f}")

preds = recognize(model, stack_images(held_out[:8]), vocab, sched, cfg.diffusion.kernel, mode="greedy")
for s, p in zip(held_out[:8], preds):
    print(f"{s.label:>6} -> {p}")
