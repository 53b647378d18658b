"""HTTP front door: REST API plus static UI hosting.

Runs on the stdlib ThreadingHTTPServer; request volume is a handful of
designers clicking around, not a public service, so a framework would buy
nothing here. All endpoints speak JSON. Validation failures come back as
400 with the offending field, oversized patterns as 422 with code
REJECT_TOO_LONG, and a send that exhausts its retries as 502.
"""

from __future__ import annotations

import argparse
import json
import logging
import mimetypes
import threading
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote, urlsplit

from . import transport as transport_mod
from .envelope import PatternSpec, PatternTooLongError, SpecError, render_cycle, render_pattern
from .library import LibraryError, PresetLibrary
from .transport import FaultInjector, UdpTransport

log = logging.getLogger(__name__)

MAX_BODY_BYTES = 1 << 20

_FALLBACK_INDEX = """<!doctype html>
<html><head><meta charset="utf-8"><title>hdesigner</title></head>
<body>
<h1>hdesigner server</h1>
<p>No UI bundle is installed. The API lives under <code>/api/</code>:
devices, render, play, stop, presets.</p>
</body></html>
"""


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.field = field

    def body(self) -> dict:
        err = {"code": self.code, "message": self.message}
        if self.field is not None:
            err["field"] = self.field
        return {"error": err}


class HapticServer:
    """Owns the UDP transport, the preset library and the HTTP listener."""

    def __init__(self, http_host: str = "127.0.0.1", http_port: int = 0,
                 udp_port: int = 0, library_path: str = "presets.json",
                 ack_timeout_ms: int = transport_mod.ACK_TIMEOUT_MS,
                 ui_dir: str | None = None,
                 faults: FaultInjector | None = None):
        self.library = PresetLibrary(library_path)
        self.transport = UdpTransport(bind_port=udp_port,
                                      ack_timeout_ms=ack_timeout_ms,
                                      faults=faults)
        self.ui_dir = Path(ui_dir).resolve() if ui_dir else None
        self._httpd = ThreadingHTTPServer((http_host, http_port), _Handler)
        self._httpd.daemon_threads = True
        self._httpd.app = self  # type: ignore[attr-defined]
        self._thread: threading.Thread | None = None

    @property
    def http_port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def udp_port(self) -> int:
        return self.transport.port

    def start(self) -> None:
        self._thread = threading.Thread(
            target=lambda: self._httpd.serve_forever(poll_interval=0.05),
            name="http", daemon=True)
        self._thread.start()
        log.info("listening on http://%s:%d (udp %d)",
                 self._httpd.server_address[0], self.http_port, self.udp_port)

    def serve_forever(self) -> None:
        self._httpd.serve_forever()

    def close(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        self.transport.close()
        if self._thread is not None:
            self._thread.join(timeout=5.0)

    # -- endpoint logic ----------------------------------------------------

    def handle_api(self, method: str, parts: list[str], body: dict | None) -> tuple[int, dict]:
        if parts == ["devices"] and method == "GET":
            return 200, {"devices": self.transport.registry.snapshot()}
        if parts == ["render"] and method == "POST":
            return 200, self._render(body)
        if len(parts) == 3 and parts[0] == "devices" and method == "POST":
            if parts[2] == "play":
                return self._play(parts[1], body)
            if parts[2] == "stop":
                return self._stop(parts[1])
        if parts == ["presets"] and method == "GET":
            return 200, {"presets": [e.to_dict() for e in self.library.entries()]}
        if len(parts) == 2 and parts[0] == "presets":
            return self._preset(method, parts[1], body)
        raise ApiError(404, "E_NOT_FOUND", "no such endpoint")

    def _parse_spec(self, obj, field: str = "spec") -> PatternSpec:
        try:
            spec = PatternSpec.from_dict(obj)
            spec.validate()
        except SpecError as e:
            raise ApiError(400, "E_BAD_SPEC", e.message, field=e.field) from e
        return spec

    def _render(self, body: dict | None) -> dict:
        if body is None:
            raise ApiError(400, "E_BAD_JSON", "request body must be a JSON object")
        try:
            rendered = render_pattern(self._parse_spec(body, field=""))
        except PatternTooLongError as e:
            raise ApiError(422, e.code, str(e)) from e
        return rendered.to_dict()

    def _play(self, device_id: str, body: dict | None) -> tuple[int, dict]:
        if body is None or not isinstance(body.get("spec"), dict):
            raise ApiError(400, "E_BAD_SPEC", "body must carry a spec object", field="spec")
        realtime = body.get("realtime", False)
        if not isinstance(realtime, bool):
            raise ApiError(400, "E_BAD_SPEC", "realtime must be a boolean", field="realtime")
        spec = self._parse_spec(body["spec"])
        if self.transport.registry.get(device_id) is None:
            raise ApiError(404, "E_NO_DEVICE", f"unknown device {device_id!r}")
        try:
            cycle = render_cycle(spec)
        except PatternTooLongError as e:
            raise ApiError(422, e.code, str(e)) from e
        fields = {"delta_ms": spec.delta_ms, "repeat": spec.repeat,
                  "delay_ms": spec.delay_ms, "channels": cycle}
        result = self.transport.send_pattern(device_id, fields, coalesce=realtime)
        return self._delivery_response(result)

    def _stop(self, device_id: str) -> tuple[int, dict]:
        if self.transport.registry.get(device_id) is None:
            raise ApiError(404, "E_NO_DEVICE", f"unknown device {device_id!r}")
        return self._delivery_response(self.transport.send_stop(device_id))

    def _delivery_response(self, result) -> tuple[int, dict]:
        payload = {"status": result.status, "attempts": result.attempts}
        if result.rtt_ms is not None:
            payload["rtt_ms"] = round(result.rtt_ms, 2)
        if result.status == transport_mod.FAILED:
            raise ApiError(502, "E_DELIVERY", "device did not acknowledge")
        return 200, payload

    def _preset(self, method: str, raw_name: str, body: dict | None) -> tuple[int, dict]:
        name = unquote(raw_name)
        if method == "GET":
            entry = self.library.get(name)
            if entry is None:
                raise ApiError(404, "E_NO_PRESET", f"no preset named {name!r}")
            return 200, entry.to_dict()
        if method == "PUT":
            if body is None:
                raise ApiError(400, "E_BAD_JSON", "request body must be a JSON object")
            spec = self._parse_spec(body, field="")
            existed = self.library.get(name) is not None
            try:
                entry = self.library.put(name, spec)
            except LibraryError as e:
                raise ApiError(400, "E_BAD_NAME", str(e)) from e
            return (200 if existed else 201), entry.to_dict()
        if method == "DELETE":
            try:
                removed = self.library.delete(name)
            except LibraryError as e:
                raise ApiError(409, "E_BUILTIN", str(e)) from e
            if not removed:
                raise ApiError(404, "E_NO_PRESET", f"no preset named {name!r}")
            return 200, {"deleted": name}
        raise ApiError(405, "E_METHOD", f"{method} not allowed here")

    # -- static files ------------------------------------------------------

    def static_file(self, path: str) -> tuple[bytes, str] | None:
        if path in ("", "/"):
            path = "/index.html"
        if self.ui_dir is None:
            if path == "/index.html":
                return _FALLBACK_INDEX.encode("utf-8"), "text/html; charset=utf-8"
            return None
        candidate = (self.ui_dir / path.lstrip("/")).resolve()
        # Refuse anything that escapes the UI root.
        if not candidate.is_relative_to(self.ui_dir) or not candidate.is_file():
            return None
        ctype = mimetypes.guess_type(candidate.name)[0] or "application/octet-stream"
        if ctype.startswith("text/") or ctype in ("application/javascript", "application/json"):
            ctype += "; charset=utf-8"
        return candidate.read_bytes(), ctype


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def app(self) -> HapticServer:
        return self.server.app  # type: ignore[attr-defined]

    def log_message(self, format, *args):
        log.debug("%s - %s", self.address_string(), format % args)

    def _send_json(self, status: int, payload: dict) -> None:
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _read_body(self) -> dict | None:
        length = int(self.headers.get("Content-Length") or 0)
        if length > MAX_BODY_BYTES:
            raise ApiError(413, "E_TOO_LARGE", "request body too large")
        if length == 0:
            return None
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw)
        except ValueError as e:
            raise ApiError(400, "E_BAD_JSON", f"invalid JSON body: {e}") from None
        if not isinstance(body, dict):
            raise ApiError(400, "E_BAD_JSON", "request body must be a JSON object")
        return body

    def _dispatch(self, method: str) -> None:
        path = urlsplit(self.path).path
        try:
            if path == "/api" or path.startswith("/api/"):
                parts = [p for p in path[len("/api/"):].split("/") if p]
                body = self._read_body() if method in ("POST", "PUT") else None
                status, payload = _normalize(self.app.handle_api(method, parts, body))
                self._send_json(status, payload)
                return
            if method == "GET":
                found = self.app.static_file(path)
                if found is not None:
                    data, ctype = found
                    self.send_response(200)
                    self.send_header("Content-Type", ctype)
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                    return
            raise ApiError(404, "E_NOT_FOUND", "not found")
        except ApiError as e:
            self._send_json(e.status, e.body())
        except Exception:
            log.exception("unhandled error serving %s %s", method, self.path)
            self._send_json(500, {"error": {"code": "E_INTERNAL",
                                            "message": "internal server error"}})

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_PUT(self):
        self._dispatch("PUT")

    def do_DELETE(self):
        self._dispatch("DELETE")


def _normalize(result) -> tuple[int, dict]:
    if isinstance(result, tuple):
        return result
    return 200, result


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hdesigner-server",
        description="Haptic pattern design server: REST API + UDP device link.")
    parser.add_argument("--http-host", default="127.0.0.1")
    parser.add_argument("--http-port", type=int, default=8765)
    parser.add_argument("--udp-port", type=int, default=9999)
    parser.add_argument("--library-path", default="presets.json",
                        help="JSON file for stored presets (default: %(default)s)")
    parser.add_argument("--ack-timeout-ms", type=int, default=transport_mod.ACK_TIMEOUT_MS)
    parser.add_argument("--ui-dir", default=None,
                        help="directory with the built web UI to serve at /")
    parser.add_argument("--fault-drop-rate", type=float, default=0.0,
                        help="probability of dropping an outbound send (testing aid)")
    parser.add_argument("--fault-dup-next", type=int, default=0, metavar="N",
                        help="transmit the next N reliable sends twice (testing aid)")
    parser.add_argument("--fault-seed", type=int, default=None)
    parser.add_argument("--log-level", default="INFO")
    args = parser.parse_args(argv)

    logging.basicConfig(level=args.log_level.upper(),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    faults = FaultInjector(drop_rate=args.fault_drop_rate, seed=args.fault_seed)
    if args.fault_dup_next:
        faults.dup_next(args.fault_dup_next)
    server = HapticServer(http_host=args.http_host, http_port=args.http_port,
                          udp_port=args.udp_port, library_path=args.library_path,
                          ack_timeout_ms=args.ack_timeout_ms, ui_dir=args.ui_dir,
                          faults=faults)
    server.start()
    print(f"hdesigner-server on http://{args.http_host}:{server.http_port} "
          f"(udp {server.udp_port})", flush=True)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        server.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
