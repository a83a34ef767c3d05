"""Byte-stable persistence: JSON records, CSV sweeps, and the run manifest.

Every float is written with 17 significant digits (exact double round-trip);
keys are sorted; no timestamps enter data files.  The manifest carries the
config digest, per-stage file hashes, and stage durations, and is the one
file allowed to differ between reruns.
"""

from __future__ import annotations

import hashlib
import json
import os

__all__ = [
    "fmt17",
    "dump_json_text",
    "write_json",
    "read_json",
    "write_csv",
    "read_csv",
    "sha256_file",
    "Manifest",
]


def fmt17(x: float) -> str:
    return f"{float(x):.17g}"


def _render(obj, indent: int) -> str:
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj):
            items.append(f'{pad}  "{key}": {_render(obj[key], indent + 2)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_render(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, float):
        return fmt17(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(obj)


def dump_json_text(obj) -> str:
    return _render(obj, 0) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_json_text(obj))


def read_json(path):
    with open(path, "r", encoding="ascii") as fh:
        return json.load(fh)


def write_csv(path, header: list, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            cells.append(fmt17(cell) if isinstance(cell, float) else str(cell))
        lines.append(",".join(cells))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    header = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        row = {}
        for key, tok in zip(header, ln.split(",")):
            try:
                row[key] = int(tok)
            except ValueError:
                try:
                    row[key] = float(tok)
                except ValueError:
                    row[key] = tok
        rows.append(row)
    return header, rows


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    """Per-run record tying stage outputs to the configuration digest."""

    NAME = "manifest.json"

    def __init__(self, out_dir, artifact_version: str, config_digest: str,
                 config_text: str):
        self.out_dir = out_dir
        self.path = os.path.join(out_dir, self.NAME)
        if os.path.exists(self.path):
            self.data = read_json(self.path)
            if self.data.get("config_digest") != config_digest:
                # a new configuration starts a fresh manifest
                self.data = None
        else:
            self.data = None
        if self.data is None:
            self.data = {
                "artifact_version": artifact_version,
                "config_digest": config_digest,
                "config": config_text,
                "stages": {},
                "verdicts": {},
            }

    def record_stage(self, stage: str, files: list, seconds: float) -> None:
        hashes = {os.path.basename(f): sha256_file(f) for f in files}
        self.data["stages"][stage] = {"files": hashes, "seconds": seconds}
        self.save()

    def record_verdicts(self, verdicts: dict) -> None:
        self.data["verdicts"] = verdicts
        self.save()

    def stage_files(self, stage: str) -> dict:
        return self.data["stages"].get(stage, {}).get("files", {})

    def has_stage(self, stage: str) -> bool:
        return stage in self.data["stages"]

    def save(self) -> None:
        write_json(self.path, self.data)
