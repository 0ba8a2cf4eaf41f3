"""Minimal JSON-over-HTTP client for a remote completion endpoint."""

from __future__ import annotations

import json
import os
import socket
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Any, Optional

URL_ENV = "REMOTE_EXPERT_URL"
TOKEN_ENV = "REMOTE_EXPERT_TOKEN"


class RemoteExpertError(RuntimeError):
    pass


@dataclass(frozen=True)
class RemoteEndpoint:
    """Where to send ``{"model", "prompt"}`` and where the reply text lives.

    ``text_path`` is a dotted path into the JSON reply; integer parts index lists,
    e.g. ``choices.0.text``.
    """

    url: str
    model: str = ""
    token: Optional[str] = None
    text_path: str = "text"
    timeout: float = 30.0
    retries: int = 3

    @classmethod
    def from_env(cls, model: str = "", **kwargs) -> "RemoteEndpoint":
        url = os.environ.get(URL_ENV)
        if not url:
            raise RemoteExpertError(f"{URL_ENV} is not set")
        return cls(url=url, model=model, token=os.environ.get(TOKEN_ENV), **kwargs)


def _extract(payload: Any, path: str) -> str:
    node = payload
    for part in path.split("."):
        if isinstance(node, list):
            node = node[int(part)]
        else:
            node = node[part]
    if not isinstance(node, str):
        raise TypeError(f"value at {path!r} is not text")
    return node


def remote_expert_query(endpoint: RemoteEndpoint, prompt: str) -> str:
    """Completion text for ``prompt``; a timeout yields ``""`` so the parser fallback applies."""
    body = json.dumps({"model": endpoint.model, "prompt": prompt}).encode()
    headers = {"Content-Type": "application/json"}
    if endpoint.token:
        headers["Authorization"] = f"Bearer {endpoint.token}"
    last: Optional[Exception] = None
    for _ in range(max(1, endpoint.retries)):
        req = urllib.request.Request(endpoint.url, data=body, headers=headers, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=endpoint.timeout) as resp:
                raw = resp.read()
        except (socket.timeout, TimeoutError):
            return ""
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, (socket.timeout, TimeoutError)):
                return ""
            last = exc
            continue
        try:
            return _extract(json.loads(raw), endpoint.text_path)
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            last = exc
    raise RemoteExpertError(f"remote expert failed after {max(1, endpoint.retries)} attempts: {last}")
