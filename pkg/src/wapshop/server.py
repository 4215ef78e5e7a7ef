"""HTTP front ends: the textual origin server and the binary gateway.

The origin serves decks as text (text/vnd.wap.wml) plus the HTML
channel and placeholder image bytes.  The gateway fetches from the
origin over HTTP, compiles, and serves binary (application/vnd.wap.wmlc)
along with the decoded-JSON endpoint the phone emulator uses.
"""

from __future__ import annotations

import json
import threading
import urllib.error
import urllib.parse
import urllib.request
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import shop, wml
from .gateway import Gateway
from .storefront import Storefront, parse_route

WML_TYPE = "text/vnd.wap.wml; charset=utf-8"
WMLC_TYPE = "application/vnd.wap.wmlc"


def _read_form(handler: BaseHTTPRequestHandler) -> dict:
    length = int(handler.headers.get("Content-Length") or 0)
    body = handler.rfile.read(length).decode("utf-8") if length else ""
    return dict(urllib.parse.parse_qsl(body, keep_blank_values=True))


class OriginHandler(BaseHTTPRequestHandler):
    storefront: Storefront  # set on the server class

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, content_type: str, body: bytes,
              location: str | None = None) -> None:
        self.send_response(status)
        if location is not None:
            self.send_header("Location", location)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _image_bytes(self, path: str) -> bytes | None:
        sf = self.server.storefront
        weights = sf.asset_weights()
        if path in weights:
            return b"\x00" * weights[path]
        # HTML channel assets: /img/<pid>_thumb.jpg and /img/<pid>_photo.jpg
        name = path.rsplit("/", 1)[-1]
        stem, _, _ = name.partition(".")
        pid, _, kind = stem.partition("_")
        try:
            product = sf.store.get_product(pid)
        except shop.NotFound:
            return None
        if kind == "thumb":
            return b"\x00" * product.thumb_bytes
        if kind == "photo":
            return b"\x00" * product.photo_bytes
        return None

    def do_GET(self):
        sf = self.server.storefront
        if self.path.startswith("/img/"):
            body = self._image_bytes(self.path.split("?", 1)[0])
            if body is None:
                self._send(404, "text/plain", b"no such image")
            else:
                self._send(200, "application/octet-stream", body)
            return
        if self.path.startswith("/html/"):
            route = parse_route(self.path[len("/html"):])
            try:
                body, _assets = sf.render_html_page(route)
                self._send(200, "text/html; charset=utf-8", body)
            except shop.NotFound as exc:
                self._send(404, "text/html; charset=utf-8",
                           f"<html><body><p>{exc}</p></body></html>".encode())
            return
        deck = sf.render_page(parse_route(self.path))
        self._send(200, WML_TYPE, wml.serialize_deck(deck).encode("utf-8"))

    def do_POST(self):
        sf = self.server.storefront
        fields = _read_form(self)
        result = sf.handle_form(parse_route(self.path), fields)
        if result.redirect is not None:
            self._send(302, WML_TYPE, b"", location=result.redirect.url())
            return
        deck = result.deck or sf._error_deck("form failed")
        self._send(200, WML_TYPE, wml.serialize_deck(deck).encode("utf-8"))


class OriginServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, storefront: Storefront, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), OriginHandler)
        self.storefront = storefront


class GatewayHandler(BaseHTTPRequestHandler):
    def log_message(self, fmt, *args):
        pass

    def _send(self, status: int, content_type: str, body: bytes) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        gw: Gateway = self.server.gateway
        if self.path.startswith("/ui/deck"):
            query = urllib.parse.urlparse(self.path).query
            params = dict(urllib.parse.parse_qsl(query, keep_blank_values=True))
            url = params.get("url", "/intro")
            doc = gw.deck_json(url)
            self._send(200, "application/json; charset=utf-8",
                       json.dumps(doc, ensure_ascii=False).encode("utf-8"))
            return
        self._send(200, WMLC_TYPE, gw.handle_request(self.path))

    def do_POST(self):
        # Forward the form to the origin; urllib turns the origin's 302
        # into a GET of the redirect target, whose deck we then compile.
        gw: Gateway = self.server.gateway
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length)
        ui_mode = self.path.startswith("/ui/deck")
        if ui_mode:
            query = urllib.parse.urlparse(self.path).query
            params = dict(urllib.parse.parse_qsl(query, keep_blank_values=True))
            target = params.get("url", "/")
        else:
            target = self.path
        try:
            final_url, text = self.server.post_to_origin(target, body)
        except urllib.error.URLError as exc:
            self._send(200, WMLC_TYPE, gw._error_bytes(f"Origin failed: {exc.reason}"))
            return
        data = gw.compile_source(text)
        if ui_mode:
            doc = gw.json_from_bytes(data)
            doc["url"] = final_url
            self._send(200, "application/json; charset=utf-8",
                       json.dumps(doc, ensure_ascii=False).encode("utf-8"))
        else:
            self._send(200, WMLC_TYPE, data)


class GatewayServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, origin_base: str, gateway: Gateway | None = None,
                 host: str = "127.0.0.1", port: int = 0, **gateway_kwargs):
        super().__init__((host, port), GatewayHandler)
        self.origin_base = origin_base.rstrip("/")
        self.gateway = gateway or Gateway(self.fetch_origin_text, **gateway_kwargs)

    def fetch_origin_text(self, url: str) -> str:
        with urllib.request.urlopen(self.origin_base + url, timeout=10) as resp:
            return resp.read().decode("utf-8")

    def post_to_origin(self, url: str, body: bytes):
        """POST a form to the origin; returns the final path and deck text."""
        req = urllib.request.Request(self.origin_base + url, data=body, method="POST")
        req.add_header("Content-Type", "application/x-www-form-urlencoded")
        with urllib.request.urlopen(req, timeout=10) as resp:
            final = resp.geturl()
            text = resp.read().decode("utf-8")
        if final.startswith(self.origin_base):
            final = final[len(self.origin_base):]
        return final or "/", text


def serve_pair(storefront: Storefront, origin_port: int = 0, gateway_port: int = 0,
               **gateway_kwargs):
    """Start origin and gateway servers on daemon threads; returns both."""
    origin = OriginServer(storefront, port=origin_port)
    origin_base = f"http://127.0.0.1:{origin.server_address[1]}"
    gw_server = GatewayServer(origin_base, port=gateway_port,
                              image_weights=storefront.asset_weights(),
                              **gateway_kwargs)
    for server in (origin, gw_server):
        threading.Thread(target=server.serve_forever,
                         kwargs={"poll_interval": 0.05}, daemon=True).start()
    return origin, gw_server
