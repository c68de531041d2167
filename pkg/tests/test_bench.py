import csv
import io
import json
import random

import pytest

from _data import P256
from qrschnorr.bench import CSV_HEADER, export_csv, export_json, report_csv, run_bench
from qrschnorr.errors import StorageError


@pytest.fixture(scope="module")
def report():
    return run_bench(P256, 50, rng=random.Random(1))


def test_series(report):
    assert report.iterations == 50
    assert len(report.gen_times) == len(report.verify_times) == len(report.proof_sizes) == 50
    assert all(t > 0 for t in report.gen_times + report.verify_times)
    # key id "bench" has the same length as "alice", so 226 bytes as in the codec tests
    assert set(report.proof_sizes) == {226}


def test_summary(report):
    summary = report.summary
    gen = summary["gen_seconds"]
    assert gen["min"] <= gen["median"] <= gen["max"]
    assert summary["proof_bytes"]["min"] == summary["proof_bytes"]["max"]


def test_warmup_flag(toy):
    assert len(run_bench(toy, 3, include_warmup=True, rng=random.Random(2)).gen_times) == 3
    with pytest.raises(ValueError):
        run_bench(toy, 0)


def test_csv(report, tmp_path):
    data = report_csv(report)
    lines = data.decode().splitlines()
    assert len(lines) == 51
    assert tuple(lines[0].split(",")) == CSV_HEADER
    rows = list(csv.DictReader(io.StringIO(data.decode())))
    assert [int(r["iteration"]) for r in rows] == list(range(1, 51))
    assert float(rows[0]["gen_seconds"]) == pytest.approx(report.gen_times[0], abs=1e-9)
    path = tmp_path / "bench.csv"
    export_csv(report, path)
    first = path.read_bytes()
    export_csv(report, path)
    assert path.read_bytes() == first == data


def test_json(report, tmp_path):
    path = tmp_path / "bench.json"
    export_json(report, path)
    doc = json.loads(path.read_bytes())
    assert doc["bit_length"] == 256
    assert doc["gen_times"] == report.gen_times
    assert set(doc["summary"]) == {"gen_seconds", "verify_seconds", "proof_bytes"}


def test_unwritable_path(report, tmp_path):
    target = tmp_path / "no-such-dir" / "bench.csv"
    with pytest.raises(StorageError):
        export_csv(report, target)
    assert not target.parent.exists()
    assert list(tmp_path.iterdir()) == []


def test_timing_envelope(report):
    gen = report.summary["gen_seconds"]["median"]
    ver = report.summary["verify_seconds"]["median"]
    assert gen <= 2 * ver
    assert gen < 0.005 and ver < 0.005
