"""Reference vectors for canonical transaction JSON, the leaf map, the dummy
leaf and CIDv1 identifiers, computed with the Python standard library only.

    python3 scripts/oracles/tx_cid_vectors.py > tests/vectors/tx_cid_vectors.json
"""
import base64
import hashlib
import json

P = 0x30644E72E131A029B85045B68181585D2833E84879B9709143E1F593F0000001


def cid_of(data: bytes) -> str:
    # CIDv1, raw codec (0x55), multihash sha2-256 (0x12, 32 bytes), multibase base32 lower ('b').
    raw = bytes([0x01, 0x55, 0x12, 0x20]) + hashlib.sha256(data).digest()
    return "b" + base64.b32encode(raw).decode().lower().rstrip("=")


def canonical(tx: dict) -> bytes:
    return json.dumps(tx, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def leaf(tx: dict) -> str:
    v = int.from_bytes(hashlib.sha256(canonical(tx)).digest(), "big") % P
    return format(v, "064x")


sample = {
    "assetId": "asset-0001",
    "participant": "Org1MSP-user1",
    "assetCid": cid_of(b"sample asset payload"),
    "clientTimestamp": 1700000000000,
}
dummy = {"assetId": "DUMMY", "participant": "DUMMY", "assetCid": cid_of(b""), "clientTimestamp": 0}

print(json.dumps({
    "cid": [
        {"utf8": "", "cid": cid_of(b"")},
        {"utf8": "hello world", "cid": cid_of(b"hello world")},
    ],
    "sample_tx": sample,
    "sample_canonical": canonical(sample).decode(),
    "sample_leaf": leaf(sample),
    "dummy_tx": dummy,
    "dummy_canonical": canonical(dummy).decode(),
    "dummy_leaf": leaf(dummy),
}, indent=2))
