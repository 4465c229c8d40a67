"""HTTP/JSON front end over the service engine.

Framework-free: a threading stdlib server with one routing handler.
Paths:

    POST /v1/session                                 -> {session_id, state}
    POST /v1/session/{id}/challenge?modality=...     -> challenge payload
    POST /v1/session/{id}/response                   -> {verdict, state, next_challenge?, token?}
    GET  /v1/session/{id}/verdict                    -> {state, token?}
    GET  /v1/healthz                                 -> {status, qtable_version}
    GET  /v1/challenge/{id}/tile/{i}.pgm             -> image/x-portable-graymap (url asset mode)
    GET  /v1/challenge/{id}/audio.wav                -> audio/wav (url asset mode)

Errors are {code, message} with 404/409/410/422 per the engine's
contract; malformed JSON bodies are 422.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .core import ApiError, CaptchaService

log = logging.getLogger(__name__)

_SESSION = re.compile(r"^/v1/session/([0-9a-f]{32})(/challenge|/response|/verdict)$")
_TILE = re.compile(r"^/v1/challenge/([0-9a-f]{32})/tile/(\d)\.pgm$")
_AUDIO = re.compile(r"^/v1/challenge/([0-9a-f]{32})/audio\.wav$")

MAX_BODY_BYTES = 4 * 1024 * 1024


class _Handler(BaseHTTPRequestHandler):
    server_version = "adaptcha/0.1"
    protocol_version = "HTTP/1.1"

    @property
    def engine(self) -> CaptchaService:
        return self.server.engine  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):  # route through logging, not stderr
        log.debug("http: " + fmt, *args)

    def _send_json(self, status: int, doc: dict) -> None:
        body = json.dumps(doc).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_bytes(self, data: bytes, content_type: str) -> None:
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _send_error_doc(self, status: int, code: str, message: str) -> None:
        self._send_json(status, {"code": code, "message": message})

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length > MAX_BODY_BYTES:
            raise ApiError(422, "invalid", "request body too large")
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ApiError(422, "invalid", f"malformed JSON body: {exc}") from exc
        if not isinstance(doc, dict):
            raise ApiError(422, "invalid", "body must be a JSON object")
        return doc

    def _route(self, method: str) -> None:
        url = urlparse(self.path)
        try:
            if method == "GET" and url.path == "/v1/healthz":
                self._send_json(200, self.engine.healthz())
                return
            m = _SESSION.match(url.path)
            if m:
                session_id, tail = m.group(1), m.group(2)
                if method == "POST" and tail == "/challenge":
                    modality = parse_qs(url.query).get("modality", ["grid"])[0]
                    self._send_json(200, self.engine.issue_challenge(session_id, modality))
                    return
                if method == "POST" and tail == "/response":
                    body = self._read_body()
                    for field in ("challenge_id", "solution", "telemetry"):
                        if field not in body:
                            raise ApiError(422, "invalid", f"missing field {field!r}")
                    self._send_json(
                        200,
                        self.engine.submit_response(
                            session_id, body["challenge_id"], body["solution"], body["telemetry"]
                        ),
                    )
                    return
                if method == "GET" and tail == "/verdict":
                    self._send_json(200, self.engine.get_verdict(session_id))
                    return
            if method == "POST" and url.path == "/v1/session":
                self._send_json(200, self.engine.create_session())
                return
            m = _TILE.match(url.path)
            if m and method == "GET":
                data = self.engine.challenge_asset(m.group(1), "tile", int(m.group(2)))
                self._send_bytes(data, "image/x-portable-graymap")
                return
            m = _AUDIO.match(url.path)
            if m and method == "GET":
                data = self.engine.challenge_asset(m.group(1), "audio")
                self._send_bytes(data, "audio/wav")
                return
            self._send_error_doc(404, "not_found", f"no route for {method} {url.path}")
        except ApiError as exc:
            self._send_error_doc(exc.status, exc.code, exc.message)
        except Exception:  # noqa: BLE001 - boundary: never leak a traceback
            log.exception("unhandled error serving %s %s", method, self.path)
            self._send_error_doc(500, "internal", "internal server error")

    def do_GET(self):
        self._route("GET")

    def do_POST(self):
        self._route("POST")

    def do_OPTIONS(self):
        # CORS preflight for the cross-origin widget
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Max-Age", "600")
        self.send_header("Content-Length", "0")
        self.end_headers()


class ServiceServer:
    """Owns the socket plus its serving thread."""

    def __init__(self, engine: CaptchaService, host: str | None = None, port: int | None = None):
        self.engine = engine
        self._httpd = ThreadingHTTPServer(
            (host if host is not None else engine.config.host,
             port if port is not None else engine.config.port),
            _Handler,
        )
        self._httpd.engine = engine  # type: ignore[attr-defined]
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._httpd.server_address[:2]

    def start(self) -> None:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self._httpd.serve_forever()

    def shutdown(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
        self.engine.journal.close()
