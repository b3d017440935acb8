"""CSV / JSON / JSONL artifact writers and readers.

Every emitted file starts with a provenance header (version, seed, host
hash). CSV headers are '#'-prefixed key: value lines before the column
row; JSON payloads carry a "meta" object; JSONL streams start with a meta
record. Readers invert the writers so artifacts round-trip.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .hostgraph import HostGraph, host_to_json


def host_hash(g: HostGraph) -> str:
    payload = json.dumps(host_to_json(g), separators=(",", ":"), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def artifact_meta(g: HostGraph | None = None, seed: int | None = None, **extra) -> dict:
    meta = {"version": __version__}
    if seed is not None:
        meta["seed"] = seed
    if g is not None:
        meta["host_hash"] = host_hash(g)
    meta.update(extra)
    return meta


def write_csv(path: Path | str, meta: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf)
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)
    Path(path).write_text(buf.getvalue())


def read_csv(path: Path | str) -> tuple[dict, list[str], list[list[str]]]:
    meta: dict = {}
    lines = Path(path).read_text().splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        key, _, value = line[1:].partition(":")
        meta[key.strip()] = value.strip()
    reader = csv.reader(lines[body_start:])
    table = [row for row in reader if row]
    return meta, table[0], table[1:]


def write_json(path: Path | str, meta: dict, payload) -> None:
    Path(path).write_text(json.dumps({"meta": meta, "data": payload}, indent=2) + "\n")


def read_json(path: Path | str) -> tuple[dict, object]:
    obj = json.loads(Path(path).read_text())
    return obj["meta"], obj["data"]


def write_jsonl(path: Path | str, meta: dict, records: Iterable[dict]) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps({"meta": meta}) + "\n")
        for record in records:
            fh.write(json.dumps(record) + "\n")


def read_jsonl(path: Path | str) -> tuple[dict, list[dict]]:
    with open(path) as fh:
        first = json.loads(fh.readline())
        records = [json.loads(line) for line in fh if line.strip()]
    return first["meta"], records
