"""JSON-over-HTTP execution service and the client-side accelerator that talks to it.

Endpoints (UTF-8 JSON bodies, schema tag ``qxir/1``)::

    GET  /info     -> {"name", "model", "max_qubits", "transformations"}
    POST /execute  <- {"schema", "ir": <persisted container, one function>,
                       "buffer": {"name", "size"}, "options": {shots, seed, mode, num_samples, strategy}}
                   -> {"schema", "bitstrings", "metadata", "exact_expectation"}
                    | {"schema", "error": {"code", "message"}}

The server keeps no state between requests; buffers live with the client.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from qxir.backends.base import Accelerator, AcceleratorDescriptor, ExecutionOptions
from qxir.backends.buffer import AcceleratorBuffer
from qxir.errors import (
    CapacityError,
    ParseError,
    QxirError,
    RemoteExecutionError,
    SchemaVersionError,
    TransportError,
)
from qxir.ir.nodes import IRContainer
from qxir.ir.persist import SCHEMA, from_document, to_document

log = logging.getLogger(__name__)

TIMEOUT_ENV = "QXIR_REMOTE_TIMEOUT_MS"
DEFAULT_TIMEOUT_MS = 30_000


def encode_request(buffer: AcceleratorBuffer, ir: IRContainer, options: ExecutionOptions) -> dict:
    return {
        "schema": SCHEMA,
        "ir": to_document(ir),
        "buffer": {"name": buffer.name, "size": buffer.size},
        "options": options.to_json(),
    }


def handle_execute(backend: Accelerator, body: bytes) -> tuple[int, dict]:
    """Pure request -> (HTTP status, response document). Never raises."""
    try:
        req = json.loads(body.decode("utf-8"))
        if not isinstance(req, dict):
            raise ValueError("request must be a JSON object")
    except (UnicodeDecodeError, ValueError) as e:
        return 400, _error("bad-request", f"malformed JSON: {e}")
    if req.get("schema") != SCHEMA:
        return 400, _error("schema-version", f"unsupported schema {req.get('schema')!r}")
    try:
        ir = from_document(req.get("ir"))
        if len(ir.functions) != 1:
            raise ParseError(f"expected exactly one function, got {len(ir.functions)}")
    except (ParseError, SchemaVersionError) as e:
        return 400, _error("bad-ir", str(e))
    try:
        buf = req["buffer"]
        options = ExecutionOptions(**req.get("options", {}))
        buffer = backend.create_buffer(str(buf["name"]), int(buf["size"]))
    except QxirError as e:
        return 422, _error(e.code, str(e))
    except (KeyError, TypeError, ValueError) as e:
        return 400, _error("bad-request", f"{type(e).__name__}: {e}")
    try:
        backend.execute(buffer, ir.functions[0], options)
    except QxirError as e:
        return 422, _error(e.code, str(e))
    except Exception as e:  # request isolation: report, keep serving
        log.exception("execute failed")
        return 500, _error("internal", f"{type(e).__name__}: {e}")
    return 200, {
        "schema": SCHEMA,
        "bitstrings": buffer.measurements,
        "metadata": buffer.metadata,
        "exact_expectation": buffer.exact_expectation,
    }


def _error(code: str, message: str) -> dict:
    return {"schema": SCHEMA, "error": {"code": code, "message": message}}


class _Handler(BaseHTTPRequestHandler):
    server: ExecutionServer
    protocol_version = "HTTP/1.1"

    def _send(self, status: int, doc: dict) -> None:
        data = json.dumps(doc, allow_nan=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        if self.path == "/info":
            self._send(200, self.server.backend.descriptor.to_json())
        else:
            self._send(404, _error("not-found", self.path))

    def do_POST(self):
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length)
        if self.path != "/execute":
            self._send(404, _error("not-found", self.path))
            return
        self._send(*handle_execute(self.server.backend, body))

    def log_message(self, fmt, *args):
        log.debug("%s - " + fmt, self.address_string(), *args)


class ExecutionServer(ThreadingHTTPServer):
    """Hosts one local backend; requests are handled on a bounded worker pool."""

    daemon_threads = True

    def __init__(self, backend: Accelerator, host: str = "127.0.0.1", port: int = 0, workers: int = 8):
        self.backend = backend
        self._pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="qxir-worker")
        super().__init__((host, port), _Handler)

    def process_request(self, request, client_address):
        self._pool.submit(self.process_request_thread, request, client_address)

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> ExecutionServer:
        threading.Thread(target=self.serve_forever, daemon=True, name="qxir-server").start()
        return self

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        self._pool.shutdown(wait=True)


def serve(backend_name: str, port: int, host: str = "127.0.0.1", workers: int = 8, **backend_kwargs) -> ExecutionServer:
    """Bind a server for ``backend_name`` (not yet serving; call ``serve_forever`` or ``start``)."""
    from qxir.backends import get_backend

    backend = get_backend(backend_name, **backend_kwargs)
    try:
        return ExecutionServer(backend, host, port, workers)
    except OSError as e:
        raise TransportError(f"cannot bind {host}:{port}: {e}") from e


def _timeout() -> float:
    return int(os.environ.get(TIMEOUT_ENV, DEFAULT_TIMEOUT_MS)) / 1000.0


class RemoteAccelerator(Accelerator):
    """Client adapter: same contract as a local backend, execution happens on the server."""

    def __init__(self, url: str, timeout: float | None = None):
        self.url = url.rstrip("/")
        self.timeout = _timeout() if timeout is None else timeout
        self.descriptor = AcceleratorDescriptor.from_json(self._request("GET", "/info"))

    def _request(self, method: str, path: str, doc: dict | None = None) -> dict:
        data = None if doc is None else json.dumps(doc, allow_nan=False).encode("utf-8")
        req = urllib.request.Request(self.url + path, data=data, method=method,
                                     headers={"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = resp.read()
        except urllib.error.HTTPError as e:
            payload = e.read()
        except (urllib.error.URLError, OSError) as e:
            raise TransportError(f"{method} {self.url}{path}: {e}") from e
        try:
            out = json.loads(payload.decode("utf-8"))
        except ValueError as e:
            raise TransportError(f"{method} {self.url}{path}: response is not JSON") from e
        if isinstance(out, dict) and "error" in out:
            raise RemoteExecutionError(out["error"]["code"], out["error"]["message"])
        return out

    def execute(self, buffer: AcceleratorBuffer, function, options: ExecutionOptions | None = None) -> AcceleratorBuffer:
        if buffer.size > self.descriptor.max_qubits:
            raise CapacityError(f"buffer of {buffer.size} exceeds remote capacity {self.descriptor.max_qubits}")
        language = "anneal-qmi" if self.model == "anneal" else "gate-quil"
        ir = IRContainer([function], language)
        out = self._request("POST", "/execute", encode_request(buffer, ir, options or ExecutionOptions()))
        offset = len(buffer.measurements)
        buffer.append_measurements(out["bitstrings"])
        for k, v in out["metadata"].items():
            if k.startswith("energy[") and k.endswith("]"):
                k = f"energy[{int(k[7:-1]) + offset}]"
            buffer.metadata[k] = float(v)
        if "min_energy" in out["metadata"]:
            buffer.metadata["min_energy"] = min(buffer.energies())
        if out.get("exact_expectation") is not None:
            buffer.exact_expectation = float(out["exact_expectation"])
        return buffer
