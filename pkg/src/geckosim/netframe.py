"""Minimal RFC 6455 framing over blocking sockets.

Covers what the console link needs: the HTTP upgrade handshake, text and
close frames, ping/pong, and client-side masking. Fragmented messages are
reassembled; extensions and subprotocols are not negotiated.
"""

from __future__ import annotations

import base64
import hashlib
import os
import socket
import struct
from typing import Optional, Tuple

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT = 0x0
OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class HandshakeError(Exception):
    pass


class ConnectionClosed(Exception):
    pass


def accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def _read_until(sock: socket.socket, marker: bytes, limit: int = 65536) -> bytes:
    data = b""
    while marker not in data:
        chunk = sock.recv(4096)
        if not chunk:
            raise HandshakeError("peer closed during handshake")
        data += chunk
        if len(data) > limit:
            raise HandshakeError("oversized handshake")
    return data


def server_handshake(sock: socket.socket) -> str:
    """Answer an HTTP upgrade; returns the request path."""
    raw = _read_until(sock, b"\r\n\r\n")
    head = raw.split(b"\r\n\r\n", 1)[0].decode("latin-1")
    lines = head.split("\r\n")
    parts = lines[0].split(" ")
    if len(parts) < 3 or parts[0] != "GET":
        raise HandshakeError(f"bad request line: {lines[0]!r}")
    headers = {}
    for line in lines[1:]:
        if ":" in line:
            k, v = line.split(":", 1)
            headers[k.strip().lower()] = v.strip()
    if headers.get("upgrade", "").lower() != "websocket":
        raise HandshakeError("not a websocket upgrade")
    key = headers.get("sec-websocket-key")
    if not key:
        raise HandshakeError("missing Sec-WebSocket-Key")
    response = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {accept_key(key)}\r\n"
        "\r\n"
    )
    sock.sendall(response.encode("ascii"))
    return parts[1]


def client_handshake(sock: socket.socket, host: str, port: int, path: str = "/") -> None:
    key = base64.b64encode(os.urandom(16)).decode("ascii")
    request = (
        f"GET {path} HTTP/1.1\r\n"
        f"Host: {host}:{port}\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Key: {key}\r\n"
        "Sec-WebSocket-Version: 13\r\n"
        "\r\n"
    )
    sock.sendall(request.encode("ascii"))
    raw = _read_until(sock, b"\r\n\r\n")
    status = raw.split(b"\r\n", 1)[0].decode("latin-1")
    if " 101 " not in status + " ":
        raise HandshakeError(f"upgrade refused: {status}")
    expect = accept_key(key).encode("ascii")
    if expect not in raw:
        raise HandshakeError("bad Sec-WebSocket-Accept")


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionClosed("socket closed mid-frame")
        buf += chunk
    return buf


def write_frame(sock: socket.socket, opcode: int, payload: bytes,
                mask: bool = False) -> None:
    head = bytes([0x80 | opcode])
    n = len(payload)
    mask_bit = 0x80 if mask else 0
    if n < 126:
        head += bytes([mask_bit | n])
    elif n < 65536:
        head += bytes([mask_bit | 126]) + struct.pack(">H", n)
    else:
        head += bytes([mask_bit | 127]) + struct.pack(">Q", n)
    if mask:
        key = os.urandom(4)
        body = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        sock.sendall(head + key + body)
    else:
        sock.sendall(head + payload)


def _read_frame(sock: socket.socket) -> Tuple[int, bool, bytes]:
    b0, b1 = _recv_exact(sock, 2)
    fin = bool(b0 & 0x80)
    opcode = b0 & 0x0F
    masked = bool(b1 & 0x80)
    n = b1 & 0x7F
    if n == 126:
        n = struct.unpack(">H", _recv_exact(sock, 2))[0]
    elif n == 127:
        n = struct.unpack(">Q", _recv_exact(sock, 8))[0]
    if masked:
        key = _recv_exact(sock, 4)
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(_recv_exact(sock, n)))
    else:
        payload = _recv_exact(sock, n)
    return (opcode, fin, payload)


def read_message(sock: socket.socket, respond_ping: bool = True,
                 mask_replies: bool = False) -> Optional[str]:
    """Next complete text message, or None when the peer closes."""
    parts = []
    while True:
        opcode, fin, payload = _read_frame(sock)
        if opcode == OP_CLOSE:
            try:
                write_frame(sock, OP_CLOSE, payload[:2], mask=mask_replies)
            except OSError:
                pass
            return None
        if opcode == OP_PING:
            if respond_ping:
                write_frame(sock, OP_PONG, payload, mask=mask_replies)
            continue
        if opcode == OP_PONG:
            continue
        if opcode in (OP_TEXT, OP_BINARY, OP_CONT):
            parts.append(payload)
            if fin:
                return b"".join(parts).decode("utf-8")


def send_text(sock: socket.socket, text: str, mask: bool = False) -> None:
    write_frame(sock, OP_TEXT, text.encode("utf-8"), mask=mask)


def send_close(sock: socket.socket, mask: bool = False) -> None:
    try:
        write_frame(sock, OP_CLOSE, struct.pack(">H", 1000), mask=mask)
    except OSError:
        pass
