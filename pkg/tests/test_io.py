import csv

import numpy as np
import pytest

from lcgf import io
from lcgf.covariance import build_aux_covariance, build_packing, kernel
from lcgf.rng import RngStream
from lcgf.samplers import sample_mbrw


def test_field_roundtrip_bit_exact(tmp_path):
    f = sample_mbrw(4, 2, RngStream(3))
    f.seed = 3
    p = tmp_path / "f.lcgf"
    io.write_field(str(p), f)
    raw = p.read_bytes()
    assert raw.startswith(b"LCGF1\n2 16 mbrw 3\n")
    assert len(raw) == len(b"LCGF1\n2 16 mbrw 3\n") + 8 * 256
    g = io.read_field(str(p))
    assert g.values.tobytes() == f.values.tobytes()
    assert (g.N, g.d, g.model, g.seed) == (16, 2, "MBRW", 3)


def test_field_format_errors(tmp_path):
    p = tmp_path / "bad"
    p.write_bytes(b"NOPE\n")
    with pytest.raises(io.FormatError):
        io.read_field(str(p))
    p.write_bytes(b"LCGF1\n1 4 brw 0\n" + b"\0" * 8)
    with pytest.raises(io.FormatError):
        io.read_field(str(p))


def test_kernel_roundtrip(tmp_path):
    base = kernel("MBRW", 16, 2)
    aux = build_aux_covariance(base, build_packing(16, 2, 1, 2), kernel("MBRW", 2, 2))
    p = tmp_path / "k.lcgk"
    io.write_kernel(str(p), aux)
    back = io.read_kernel(str(p))
    assert np.array_equal(back.vertices, aux.vertices)
    assert back.matrix().tobytes() == aux.matrix().tobytes()


def test_csv_rfc4180(tmp_path):
    p = tmp_path / "x.csv"
    io.write_csv(str(p), ["a", "b"], [(1, 0.1), ("x,y", np.float64(1 / 3)), ('q"', np.int64(7))])
    raw = p.read_bytes()
    assert raw.count(b"\r\n") == 4
    assert b'"x,y"' in raw and b'"q"""' in raw
    with open(p, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[2] == ["x,y", repr(1 / 3)]
    cols, body = io.read_csv(str(p))
    assert cols == ["a", "b"] and len(body) == 3


def test_parse_config():
    text = """# header
experiment = level_set
N = 64, 128   # grid
replicas=20
beta_factor = 2.5
model = MBRW
"""
    cfg = io.parse_config(text)
    assert cfg == {"experiment": "level_set", "N": [64, 128], "replicas": 20, "beta_factor": 2.5, "model": "MBRW"}
    with pytest.raises(io.FormatError):
        io.parse_config("no equals sign")
    assert io.config_digest(text) == io.config_digest(text + "\n# trailing comment\n")


def test_manifest_roundtrip(tmp_path):
    text = "experiment = bridge\nreplicas = 1000\n"
    m = io.RunManifest(io.config_digest(text), "0.1.0", [1], io.RunManifest.now(), config_text=text)
    assert m.verify()
    p = tmp_path / "m.json"
    m.write(str(p))
    back = io.RunManifest.read(str(p))
    assert back.verify() and back.config_digest == m.config_digest
    back.config_text = "experiment = bridge\nreplicas = 2000\n"
    assert not back.verify()


def test_json_schema_version(tmp_path):
    p = tmp_path / "s.json"
    io.write_json(str(p), "level_set", {"x": np.float64(1.5), "inf": float("inf"), "arr": np.arange(3)})
    import json
    doc = json.loads(p.read_text())
    assert doc["schema_version"] == io.SCHEMA_VERSION and doc["kind"] == "level_set"
    assert doc["arr"] == [0, 1, 2] and doc["inf"] == "inf"
