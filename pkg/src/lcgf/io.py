"""Binary field and kernel dumps, CSV/JSON outputs, run manifests, key = value configs."""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .covariance import CovarianceKernel, explicit_kernel
from .lattice import Lattice
from .samplers import FieldSample

FIELD_MAGIC = b"LCGF1\n"
KERNEL_MAGIC = b"LCGK1\n"
SCHEMA_VERSION = 1


class FormatError(ValueError):
    pass


# --- field dumps: magic, "d N model seed\n", N^d little-endian float64 row-major


def write_field(path: str, f: FieldSample) -> None:
    header = f"{f.d} {f.N} {f.model.lower()} {f.seed}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(FIELD_MAGIC)
        fh.write(header)
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_field(path: str) -> FieldSample:
    with open(path, "rb") as fh:
        if fh.readline() != FIELD_MAGIC:
            raise FormatError(f"{path}: not a field dump")
        parts = fh.readline().decode("ascii").split()
        if len(parts) != 4:
            raise FormatError(f"{path}: malformed header")
        d, N, model, seed = int(parts[0]), int(parts[1]), parts[2], parts[3]
        raw = fh.read()
    lat = Lattice(N, d)
    if len(raw) != 8 * lat.size:
        raise FormatError(f"{path}: expected {lat.size} values, found {len(raw) / 8:g}")
    values = np.frombuffer(raw, dtype="<f8").astype(float)
    return FieldSample(lat, values, model.upper(), None if seed == "None" else int(seed))


# --- kernel dumps: magic, "m N d\n", m*d int64 vertex coords, m*m float64 matrix (all LE)


def write_kernel(path: str, k: CovarianceKernel) -> None:
    M = k.matrix()
    coords = k.lattice.coords[k.vertices] if k.vertices is not None else k.lattice.coords
    with open(path, "wb") as fh:
        fh.write(KERNEL_MAGIC)
        fh.write(f"{M.shape[0]} {k.lattice.N} {k.lattice.d}\n".encode("ascii"))
        fh.write(np.ascontiguousarray(coords, dtype="<i8").tobytes())
        fh.write(np.ascontiguousarray(M, dtype="<f8").tobytes())


def read_kernel(path: str) -> CovarianceKernel:
    with open(path, "rb") as fh:
        if fh.readline() != KERNEL_MAGIC:
            raise FormatError(f"{path}: not a kernel dump")
        m, N, d = map(int, fh.readline().decode("ascii").split())
        coords = np.frombuffer(fh.read(8 * m * d), dtype="<i8").reshape(m, d)
        M = np.frombuffer(fh.read(8 * m * m), dtype="<f8").reshape(m, m).copy()
    lat = Lattice(N, d)
    verts = np.array([lat.index(tuple(int(c) for c in v)) for v in coords], dtype=np.int64)
    return explicit_kernel(M, lat, verts)


# --- CSV / JSON


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


def write_csv(path: str, columns, rows) -> None:
    """RFC-4180: comma separated, CRLF line ends, minimal quoting; floats at full precision."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(x) for x in row])


def read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _plain(x):
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return _plain(x.to_dict() if hasattr(x, "to_dict") else dataclasses.asdict(x))
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def write_json(path: str, kind: str, payload: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind, **_plain(payload)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- config files


def parse_config(text: str) -> dict:
    """`key = value` lines, `#` comments; comma lists become lists; numbers are converted."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise FormatError(f"line {lineno}: empty key")
        if "," in value:
            out[key] = [_scalar(v.strip()) for v in value.split(",") if v.strip()]
        else:
            out[key] = _scalar(value)
    return out


def _scalar(s: str):
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


def config_digest(text: str) -> str:
    """sha256 over the canonical form (sorted keys, parsed values)."""
    canon = json.dumps(parse_config(text), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# --- manifest


@dataclass
class RunManifest:
    config_digest: str
    version: str
    seeds: list
    started: str
    finished: str = ""
    outputs: list = field(default_factory=list)
    config_text: str = ""

    @staticmethod
    def now() -> str:
        return datetime.now(timezone.utc).isoformat(timespec="seconds")

    def verify(self) -> bool:
        return config_digest(self.config_text) == self.config_digest

    def to_dict(self) -> dict:
        return {**dataclasses.asdict(self), "schema_version": SCHEMA_VERSION}

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, path: str) -> "RunManifest":
        with open(path) as fh:
            doc = json.load(fh)
        doc.pop("schema_version", None)
        return cls(**doc)


def output_paths(out_dir: str, name: str) -> tuple[str, str, str]:
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, name)
    return base + ".csv", base + ".json", base + ".manifest.json"
