"""Versioned binary checkpoint container.  Layout is documented in CHECKPOINT.md.

Byte-for-byte deterministic: no timestamps, keys sorted, tensors written in
``state_dict`` order as little-endian contiguous buffers.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
import torch

from .config import RunConfig
from .model import DiffusionSTR

MAGIC = b"DSTRCKPT"
VERSION = 1
_HEADER = struct.Struct("<8sIQ")  # magic, version, header length

_DTYPES = {
    torch.float32: "<f4",
    torch.float64: "<f8",
    torch.int64: "<i8",
}


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, model: DiffusionSTR, cfg: RunConfig, extra: dict | None = None):
    sched = cfg.schedule()
    arrays = [(f"model.{k}", v.detach().cpu()) for k, v in model.state_dict().items()]
    arrays.append(("schedule.betas", torch.tensor(np.asarray(sched.betas))))
    arrays.append(("schedule.alpha_bars", torch.tensor(np.asarray(sched.alpha_bars))))

    entries, blobs, offset = [], [], 0
    for name, t in arrays:
        dt = _DTYPES.get(t.dtype)
        if dt is None:
            raise CheckpointError(f"unsupported dtype {t.dtype} for {name}")
        buf = np.ascontiguousarray(t.numpy().astype(dt, copy=False)).tobytes()
        entries.append({"name": name, "dtype": dt, "shape": list(t.shape),
                        "offset": offset, "nbytes": len(buf)})
        blobs.append(buf)
        offset += len(buf)

    header = {
        "format": "diffstr-checkpoint",
        "version": VERSION,
        "config": cfg.to_dict(),
        "schedule": {"kind": sched.kind, "T": sched.T},
        "charset": cfg.vocabulary().charset.chars,
        "extra": extra or {},
        "tensors": entries,
    }
    hbytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, len(hbytes)))
        fh.write(hbytes)
        for b in blobs:
            fh.write(b)
    tmp.replace(path)


def read_checkpoint(path):
    """Return ``(header, {name: tensor})`` without building a model."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CheckpointError(f"{path}: truncated checkpoint")
    magic, version, hlen = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError(f"{path}: not a diffstr checkpoint")
    if version > VERSION:
        raise CheckpointError(f"{path}: checkpoint version {version} is newer than supported {VERSION}")
    start = _HEADER.size
    header = json.loads(data[start:start + hlen].decode("utf-8"))
    base = start + hlen
    tensors = {}
    for e in header["tensors"]:
        raw = data[base + e["offset"]: base + e["offset"] + e["nbytes"]]
        arr = np.frombuffer(raw, dtype=np.dtype(e["dtype"])).reshape(e["shape"])
        tensors[e["name"]] = torch.from_numpy(arr.astype(arr.dtype.newbyteorder("="), copy=True))
    return header, tensors


def load_checkpoint(path):
    """Rebuild ``(model, cfg, header)`` from a checkpoint file."""
    header, tensors = read_checkpoint(path)
    cfg = RunConfig.from_dict(header["config"])
    model = DiffusionSTR(cfg.vision, cfg.decoder_config())
    state = {k[len("model."):]: v for k, v in tensors.items() if k.startswith("model.")}
    model.load_state_dict(state)
    model.eval()
    return model, cfg, header
