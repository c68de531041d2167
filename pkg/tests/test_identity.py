import json
import os
import random
import threading

import pytest

from qrschnorr.errors import (
    KeyConflictError,
    KeyNotFoundError,
    ParameterError,
    ParamsMismatchError,
    StorageError,
)
from qrschnorr.group import GroupParams
from qrschnorr.identity import (
    KeyPair,
    KeyRegistry,
    PublicKey,
    keygen,
    lookup_key,
    register_key,
    save_private_key,
)


def test_forced_secrets(toy):
    assert keygen(toy, x=6).y == 8
    assert keygen(toy, x=21).y == 14
    assert keygen(toy, x=0).y == 1
    assert 5 * 14 % 23 == 1


def test_keygen_range_small_group(toy):
    rng = random.Random(11)
    seen = set()
    for _ in range(10_000):
        kp = keygen(toy, rng)
        assert 1 <= kp.x <= 21
        y = 1
        for _ in range(kp.x):
            y = y * 5 % 23
        assert kp.y == y
        seen.add(kp.x)
    assert seen == set(range(1, 22))


def test_keypair_binds_params(toy, params256, rng):
    kp = keygen(params256, rng)
    assert kp.params_digest == params256.digest()
    assert kp.params_digest != toy.digest()


def test_repr_hides_secret(params256, rng):
    kp = keygen(params256, rng)
    assert str(kp.x) not in repr(kp)
    assert hex(kp.x)[2:] not in repr(kp)


def test_private_key_file(tmp_path, params256, rng):
    kp = keygen(params256, rng)
    path = tmp_path / "key.json"
    save_private_key(kp, path)
    doc = json.loads(path.read_bytes())
    assert doc == {"x": str(kp.x), "params_digest": params256.digest().hex()}
    assert KeyPair.from_json(path.read_bytes(), params256) == kp
    if os.name == "posix":
        assert path.stat().st_mode & 0o777 == 0o600


def test_private_key_file_rejected(params256, toy):
    digest = params256.digest().hex()
    with pytest.raises(ParameterError):
        KeyPair.from_json(json.dumps({"x": str(params256.p), "params_digest": digest}), params256)
    with pytest.raises(ParameterError):
        KeyPair.from_json(b"{}", params256)
    # wrong group is reported as a mismatch even when x is also out of range
    with pytest.raises(ParamsMismatchError):
        KeyPair.from_json(json.dumps({"x": "100", "params_digest": digest}), toy)


def test_public_key_round_trip(params256, rng):
    pub = keygen(params256, rng).public()
    assert PublicKey.from_json(pub.to_json()) == pub


class TestRegistry:
    def test_register_lookup(self):
        reg = KeyRegistry()
        register_key(reg, "alice", 8, b"D" * 32)
        assert lookup_key(reg, "alice") == (8, b"D" * 32)
        assert "alice" in reg and len(reg) == 1

    def test_duplicate(self):
        reg = KeyRegistry()
        reg.register("alice", 8, b"D")
        with pytest.raises(KeyConflictError):
            reg.register("alice", 9, b"D")
        assert reg.lookup("alice").y == 8

    @pytest.mark.parametrize("key_id", ["", "x" * 65, None])
    def test_bad_ids(self, key_id):
        with pytest.raises(ValueError):
            KeyRegistry().register(key_id, 8, b"D")

    def test_max_length_id(self):
        reg = KeyRegistry()
        reg.register("x" * 64, 8, b"D")

    def test_not_found(self):
        with pytest.raises(KeyNotFoundError):
            lookup_key(KeyRegistry(), "ghost")

    def test_persistence(self, tmp_path):
        path = tmp_path / "registry.json"
        reg = KeyRegistry(path)
        reg.register("alice", 8, bytes(range(32)))
        reg.register("bob", 14, bytes(32))
        doc = json.loads(path.read_bytes())
        assert doc["alice"] == {"y": "8", "params_digest": bytes(range(32)).hex()}
        again = KeyRegistry.load(path)
        assert lookup_key(again, "alice") == (8, bytes(range(32)))
        assert lookup_key(again, "bob") == (14, bytes(32))

    def test_canonical_save(self, tmp_path):
        path = tmp_path / "registry.json"
        reg = KeyRegistry(path)
        for name in ("zed", "alice", "mallory"):
            reg.register(name, len(name), b"\x01" * 32)
        first = path.read_bytes()
        KeyRegistry.load(path).save()
        assert path.read_bytes() == first
        copy = tmp_path / "copy.json"
        KeyRegistry.load(path).save(copy)
        assert copy.read_bytes() == first

    def test_missing_file(self, tmp_path):
        assert len(KeyRegistry.load(tmp_path / "nope.json")) == 0
        with pytest.raises(StorageError):
            KeyRegistry.load(tmp_path / "nope.json", missing_ok=False)

    def test_corrupt_file(self, tmp_path):
        path = tmp_path / "registry.json"
        path.write_text('{"alice": {"y": "x"}}')
        with pytest.raises(StorageError):
            KeyRegistry.load(path)

    def test_storage_failure_rolls_back(self, tmp_path):
        reg = KeyRegistry(tmp_path / "missing-dir" / "registry.json")
        with pytest.raises(StorageError):
            reg.register("alice", 8, b"D")
        assert "alice" not in reg

    def test_no_temp_files_left(self, tmp_path):
        reg = KeyRegistry(tmp_path / "registry.json")
        reg.register("alice", 8, b"D")
        assert [p.name for p in tmp_path.iterdir()] == ["registry.json"]

    def test_concurrent_registration(self):
        reg = KeyRegistry()
        wins, losses = [], []
        barrier = threading.Barrier(16)

        def worker(i):
            barrier.wait()
            try:
                reg.register("contended", i, b"D")
                wins.append(i)
            except KeyConflictError:
                losses.append(i)

        threads = [threading.Thread(target=worker, args=(i,)) for i in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(wins) == 1 and len(losses) == 15
        assert reg.lookup("contended").y == wins[0]


def test_unused_group_param_constructs():
    # GroupParams does not validate on construction; validate_params does
    assert GroupParams(24, 5, 5).p == 24
