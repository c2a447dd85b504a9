"""Tiny threaded HTTP server for exported bundles and a dashboard build.

Routes:

* ``/bundle/<name>`` — the six bundle documents, served as JSON; ``<name>``
  is the filename without extension (``/bundle/meta`` → ``meta.json``).
* ``/`` and any other path — static files from the optional UI directory,
  ``/`` mapping to ``index.html``. Without a UI directory, ``/`` returns a
  plain-text index of the bundle routes.

Files are read per request, so every concurrent reader sees the same bytes
for the same path. Nothing is cached and nothing is writable.
"""

from __future__ import annotations

import mimetypes
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .bundle import BUNDLE_FILES

_BUNDLE_ROUTES = {
    "/bundle/" + name.removesuffix(".json"): name for name in BUNDLE_FILES
}


def _build_handler(bundle_dir: Path, ui_dir: Path | None):
    class BundleHandler(BaseHTTPRequestHandler):
        server_version = "telemodes"

        def log_message(self, format, *args):  # noqa: A002 - stdlib signature
            pass

        def _send(self, payload: bytes, content_type: str, status: int = 200) -> None:
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(payload)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(payload)

        def _not_found(self) -> None:
            self._send(b"not found\n", "text/plain; charset=utf-8", status=404)

        def do_GET(self) -> None:  # noqa: N802 - stdlib casing
            path = self.path.split("?", 1)[0]
            if path in _BUNDLE_ROUTES:
                target = bundle_dir / _BUNDLE_ROUTES[path]
                if not target.exists():
                    self._not_found()
                    return
                self._send(target.read_bytes(), "application/json")
                return
            if ui_dir is None:
                if path == "/":
                    index = "".join(
                        f"{route}\n" for route in sorted(_BUNDLE_ROUTES)
                    )
                    self._send(index.encode(), "text/plain; charset=utf-8")
                    return
                self._not_found()
                return
            relative = "index.html" if path == "/" else path.lstrip("/")
            target = (ui_dir / relative).resolve()
            if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
                self._not_found()
                return
            content_type = (
                mimetypes.guess_type(target.name)[0] or "application/octet-stream"
            )
            self._send(target.read_bytes(), content_type)

    return BundleHandler


def make_server(
    bundle_dir,
    port: int = 8787,
    host: str = "127.0.0.1",
    ui_dir=None,
) -> ThreadingHTTPServer:
    """Build (but do not start) the server; port 0 binds an ephemeral port."""
    bundle_dir = Path(bundle_dir)
    if not bundle_dir.is_dir():
        raise ValueError(f"bundle directory does not exist: {bundle_dir}")
    handler = _build_handler(bundle_dir, Path(ui_dir) if ui_dir else None)
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(bundle_dir, port: int = 8787, host: str = "127.0.0.1", ui_dir=None):
    """Blocking entry point used by the command line."""
    httpd = make_server(bundle_dir, port=port, host=host, ui_dir=ui_dir)
    address = httpd.server_address
    print(f"serving bundle at http://{address[0]}:{address[1]}/bundle/meta")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
