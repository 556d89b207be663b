import json
import socket
import urllib.request

import pytest

from qxir.backends import AcceleratorBuffer, ExecutionOptions, get_backend
from qxir.errors import CapacityError, RemoteExecutionError, TransportError
from qxir.ir import FunctionNode, gate, measure
from qxir.qmi_lang import parse_qmi_kernels
from qxir.remote import ExecutionServer, RemoteAccelerator, handle_execute, serve


@pytest.fixture(scope="module")
def sv_server():
    server = ExecutionServer(get_backend("sv")).start()
    yield server
    server.stop()


def post(url, body: bytes):
    req = urllib.request.Request(url + "/execute", data=body, method="POST")
    try:
        with urllib.request.urlopen(req) as r:
            return r.status, json.loads(r.read())
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read())


def x_measure():
    return FunctionNode("k", (), [gate("X", 0), measure(0, 0)])


def test_info(sv_server):
    with urllib.request.urlopen(sv_server.url + "/info") as r:
        info = json.loads(r.read())
    assert {k: info[k] for k in ("name", "model", "max_qubits")} == {"name": "sv", "model": "gate", "max_qubits": 26}


def test_execute_deterministic(sv_server):
    remote = RemoteAccelerator(sv_server.url)
    b = remote.execute(AcceleratorBuffer("q", 1), x_measure(), ExecutionOptions(shots=10))
    assert b.measurements == ["1"] * 10


def test_bad_ir(sv_server):
    body = json.dumps({"schema": "qxir/1", "ir": {"schema": "qxir/1", "functions": [{"nope": 1}]},
                       "buffer": {"name": "q", "size": 1}, "options": {}}).encode()
    status, doc = post(sv_server.url, body)
    assert status == 400 and doc["error"]["code"] == "bad-ir" and "bitstrings" not in doc


def test_bad_requests(sv_server):
    assert post(sv_server.url, b"{not json")[1]["error"]["code"] == "bad-request"
    assert post(sv_server.url, json.dumps({"schema": "qxir/9"}).encode())[1]["error"]["code"] == "schema-version"


def test_domain_errors_are_reraised(sv_server):
    remote = RemoteAccelerator(sv_server.url)
    f = FunctionNode("k", (), [gate("H", 0), measure(0, 0), gate("H", 0), measure(0, 0)])
    with pytest.raises(RemoteExecutionError) as e:
        remote.execute(AcceleratorBuffer("q", 1), f, ExecutionOptions(mode="exact"))
    assert e.value.code == "mode"
    # the server keeps serving after a failed request
    assert remote.execute(AcceleratorBuffer("q", 1), x_measure(), ExecutionOptions(shots=2)).measurements == ["1", "1"]


def test_local_remote_equality(sv_server, deuteron_ir):
    from qxir.ir import evaluate_parameters

    remote = RemoteAccelerator(sv_server.url)
    local = get_backend("sv")
    for name in ("z0", "x0x1", "y0y1"):
        f = evaluate_parameters(deuteron_ir.get(name), {"t0": 0.8})
        for opts in (ExecutionOptions(shots=300, seed=1), ExecutionOptions(mode="exact")):
            a = local.execute(AcceleratorBuffer("q", 2), f, opts)
            b = remote.execute(AcceleratorBuffer("q", 2), f, opts)
            assert a == b


def test_remote_annealing_matches_local():
    server = ExecutionServer(get_backend("ising")).start()
    try:
        remote = get_backend("remote:" + server.url)
        f = parse_qmi_kernels("__qpu__ p() {\n0 0 -1;\n1 1 -1;\n0 1 2;\n}").functions[0]
        opts = ExecutionOptions(num_samples=3)
        a = get_backend("ising").execute(AcceleratorBuffer("q", 2), f, opts)
        b = remote.execute(AcceleratorBuffer("q", 2), f, opts)
        assert a == b
        remote.execute(b, f, opts)
        assert b.energies() == a.energies() * 2
    finally:
        server.stop()


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_server_down():
    with pytest.raises(TransportError):
        RemoteAccelerator(f"http://127.0.0.1:{free_port()}", timeout=2)
    server = ExecutionServer(get_backend("sv")).start()
    remote = RemoteAccelerator(server.url, timeout=2)
    server.stop()
    with pytest.raises(TransportError):
        remote.execute(AcceleratorBuffer("q", 1), x_measure(), ExecutionOptions(shots=1))


def test_capacity_checked_client_side(monkeypatch):
    server = ExecutionServer(get_backend("sv", max_qubits=2)).start()
    try:
        remote = RemoteAccelerator(server.url)
        calls = []
        monkeypatch.setattr(remote, "_request", lambda *a: calls.append(a))
        with pytest.raises(CapacityError):
            remote.execute(AcceleratorBuffer("q", 3), x_measure(), ExecutionOptions(shots=1))
        with pytest.raises(CapacityError):
            remote.create_buffer("q", 3)
        assert calls == []
    finally:
        server.stop()


def test_bind_failure():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        s.listen()
        with pytest.raises(TransportError):
            serve("sv", s.getsockname()[1])


def test_timeout_from_environment(monkeypatch, sv_server):
    monkeypatch.setenv("QXIR_REMOTE_TIMEOUT_MS", "1500")
    assert RemoteAccelerator(sv_server.url).timeout == 1.5


def test_handler_is_pure():
    status, doc = handle_execute(get_backend("sv"), b"[]")
    assert status == 400 and doc["error"]["code"] == "bad-request"
