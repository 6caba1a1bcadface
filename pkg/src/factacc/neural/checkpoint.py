"""Self-describing, byte-stable model checkpoints.

A checkpoint is a single JSON document: format version, model kind, config,
vocabulary, optional relation inventory, and parameter tensors as named
shapes with base64-packed little-endian payloads. Writing the same model
twice produces identical bytes, which the pipeline-determinism guarantees
build on.
"""

from __future__ import annotations

import base64
import json

import numpy as np
import torch

CHECKPOINT_FORMAT_VERSION = 1


def _pack(array: np.ndarray) -> dict:
    array = np.ascontiguousarray(array)
    return {
        "shape": list(array.shape),
        "dtype": str(array.dtype),
        "data": base64.b64encode(array.astype("<" + array.dtype.str[1:]).tobytes()).decode("ascii"),
    }


def _unpack(entry: dict) -> np.ndarray:
    raw = base64.b64decode(entry["data"])
    dtype = np.dtype(entry["dtype"]).newbyteorder("<")
    return np.frombuffer(raw, dtype=dtype).reshape(entry["shape"]).astype(entry["dtype"])


def save_checkpoint(path, kind: str, config: dict, vocab: list[str],
                    state_dict: dict, meta: dict | None = None) -> None:
    tensors = {}
    for name in sorted(state_dict):
        tensors[name] = _pack(state_dict[name].detach().cpu().numpy())
    payload = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "kind": kind,
        "config": config,
        "vocab": vocab,
        "meta": meta or {},
        "tensors": tensors,
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, sort_keys=True)
        f.write("\n")


def load_checkpoint(path) -> dict:
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    version = payload.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise ValueError(
            f"unsupported checkpoint format version {version!r}, expected {CHECKPOINT_FORMAT_VERSION}"
        )
    payload["tensors"] = {name: _unpack(entry) for name, entry in payload["tensors"].items()}
    return payload


def state_dict_from_tensors(tensors: dict[str, np.ndarray]) -> dict[str, torch.Tensor]:
    return {name: torch.from_numpy(np.array(array)) for name, array in tensors.items()}
