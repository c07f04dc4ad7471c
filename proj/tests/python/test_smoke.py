import hashlib
import json

import pytest

import farmledger as fl

HEADER = "date,farm_id,location,farm_type,product_type,yield_kg,water_l,electricity_kwh,fertilizer_kg"

B58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"


def b58(data: bytes) -> str:
    n = int.from_bytes(data, "big")
    out = ""
    while n:
        n, r = divmod(n, 58)
        out = B58[r] + out
    return "1" * (len(data) - len(data.lstrip(b"\0"))) + out


def test_cid_matches_hashlib():
    for payload in (b"", b"hello", bytes(range(256)) * 3):
        expected = b58(b"\x12\x20" + hashlib.sha256(payload).digest())
        assert fl.cid_from_bytes(payload) == expected
        assert fl.parse_cid(expected) == b"\x12\x20" + hashlib.sha256(payload).digest()


def test_errors_carry_a_code():
    with pytest.raises(fl.FarmledgerError) as info:
        fl.parse_cid("Qm0")
    assert info.value.code in {"InvalidCharacter", "InvalidLength"}
    with pytest.raises(fl.FarmledgerError) as info:
        fl.parse_multiaddr("/ip4/1.2.3.4/udp/1/p2p/x")
    assert info.value.code == "MalformedMultiaddr"


def test_canonical_dataset_and_analysis():
    rows = [
        "2022-03-02,F2,Dhaka,conventional,kale,4,20,3,1",
        "2022-03-01,F1,Dhaka,vertical,lettuce,2.50,10,5,0.5",
    ]
    a = fl.canonicalize_csv(HEADER + "\n" + "\n".join(rows) + "\n")
    b = fl.canonicalize_csv(HEADER + "\n" + "\n".join(reversed(rows)) + "\n")
    assert a == b
    assert b'"yield_kg":2.5,' in a
    assert fl.check_canonical(a) == 2
    chart = fl.analyze(a, chart="timeseries", bucket="month")
    assert chart["series"] == [{"bucket_start": "2022-03-01", "value": 6.5}]
    assert chart["summary"]["record_count"] == 2
    with pytest.raises(fl.FarmledgerError) as info:
        fl.canonicalize_csv(HEADER + "\n2022-03-01,F1,Dhaka,hydro,x,1,1,1,1\n")
    assert info.value.code == "RowError"


def test_qr_png_decodes():
    zxingcpp = pytest.importorskip("zxingcpp")
    import io

    from PIL import Image

    link = fl.visualizer_link("http://127.0.0.1:5173/", fl.cid_from_bytes(b"x"))
    png = fl.qr_png(link)
    text = zxingcpp.read_barcodes(Image.open(io.BytesIO(png)))[0].text
    assert text == link


def test_simulation_round_trip():
    sim = fl.Simulation(12, 42)
    assert len(sim) == 12
    cid = sim.add(11, b"farm" * 1000)
    assert sim.cat(2, cid) == b"farm" * 1000
    providers = sim.find_providers(5, cid)
    assert sim.peer_id(11) in providers
    assert sim.peer_id(2) in providers
    assert sim.bytes_sent == sim.bytes_received
    assert sim.bandwidth_csv().startswith("bucket_start_s,bytes_in,bytes_out\n")


def test_run_sim_is_deterministic():
    a, csv_a = fl.run_sim(nodes=8, seed=42, duration_hours=1, payload_bytes=50000)
    b, csv_b = fl.run_sim(nodes=8, seed=42, duration_hours=1, payload_bytes=50000)
    assert a == b and csv_a == csv_b
    assert a["conserved"] is True
    assert set(a) >= {"trace_hash", "events", "bytes_total", "providers_final"}


def test_jwt_layout():
    token = fl.sign_jwt("ab" * 20, "cd" * 32, 1700000000)
    header, payload, sig = token.split(".")
    pad = lambda s: s + "=" * (-len(s) % 4)
    import base64
    assert base64.urlsafe_b64decode(pad(header)) == b'{"alg":"HS256","typ":"JWT"}'
    assert json.loads(base64.urlsafe_b64decode(pad(payload))) == {"key": "ab" * 20, "iat": 1700000000}
    import hmac
    mac = hmac.new(bytes.fromhex("cd" * 32), f"{header}.{payload}".encode(), hashlib.sha256).digest()
    assert base64.urlsafe_b64decode(pad(sig)) == mac


def test_cli_in_process():
    code, out, err = fl.cli(["sim", "run", "--nodes", "4", "--seed", "1", "--duration", "0", "--payload-bytes", "1000"])
    assert code == 0, err
    assert json.loads(out)["nodes"] == 4
    code, _, _ = fl.cli(["nonsense"])
    assert code == 1
