"""Python bindings for the farmledger core."""

import json as _json

from ._farmledger import (
    FarmledgerError,
    Simulation,
    analyze as _analyze,
    base58_decode,
    base58_encode,
    canonicalize_csv,
    check_canonical,
    cid_from_bytes,
    cli,
    generate_peer,
    parse_cid,
    parse_multiaddr,
    qr_png,
    run_sim as _run_sim,
    sign_jwt,
    visualizer_link,
)

__all__ = [
    "FarmledgerError",
    "Simulation",
    "analyze",
    "base58_decode",
    "base58_encode",
    "canonicalize_csv",
    "check_canonical",
    "cid_from_bytes",
    "cli",
    "generate_peer",
    "parse_cid",
    "parse_multiaddr",
    "qr_png",
    "run_sim",
    "sign_jwt",
    "visualizer_link",
]


def analyze(canonical: bytes, **params: str) -> dict:
    return _json.loads(_analyze(canonical, {k: str(v) for k, v in params.items()}))


def run_sim(nodes: int = 20, seed: int = 42, duration_hours: float = 24.0,
            payload_bytes: int = 1 << 20, retrievers: int = 3):
    summary, csv = _run_sim(nodes, seed, duration_hours, payload_bytes, retrievers)
    return _json.loads(summary), csv
