"""Ways of getting a chat-completion response: live HTTP, fixture replay, recording."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import urllib.error
import urllib.request
from pathlib import Path
from typing import Callable, Mapping, Optional, Protocol

from ..errors import FixtureMissing, NetworkError

log = logging.getLogger(__name__)


def fixture_key(kind: str, messages) -> str:
    """Content hash of a request; the model name is deliberately left out."""
    blob = kind + "\n" + json.dumps(messages, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class Transport(Protocol):
    def send(self, kind: str, body: Mapping) -> dict: ...


def _debug() -> bool:
    return bool(os.environ.get("SSR_GATEWAY_DEBUG"))


class HTTPTransport:
    """POSTs an OpenAI-style chat-completion body to ``endpoint``."""

    def __init__(self, endpoint: str, api_key: Optional[str] = None, *, timeout: float = 120.0, max_in_flight: int = 4) -> None:
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout
        self._slots = threading.BoundedSemaphore(max(1, max_in_flight))

    def send(self, kind: str, body: Mapping) -> dict:
        data = json.dumps(body).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        req = urllib.request.Request(self.endpoint, data=data, headers=headers, method="POST")
        if _debug():
            log.debug("%s request: %s", kind, data.decode("utf-8"))
        with self._slots:
            try:
                with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                    raw = resp.read().decode("utf-8")
            except (urllib.error.URLError, TimeoutError, OSError) as exc:
                raise NetworkError(f"{kind} request failed: {exc}") from exc
        if _debug():
            log.debug("%s response: %s", kind, raw)
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise NetworkError(f"{kind} response is not JSON") from exc


class FixtureStore:
    """One JSON document per request, named by its content hash."""

    def __init__(self, root: str | os.PathLike) -> None:
        self.root = Path(root)
        self._lock = threading.Lock()

    def path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def load(self, kind: str, messages) -> dict:
        key = fixture_key(kind, messages)
        p = self.path(key)
        try:
            doc = json.loads(p.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise FixtureMissing(key, kind) from None
        return doc["response"]

    def save(self, kind: str, messages, response: Mapping) -> Path:
        key = fixture_key(kind, messages)
        doc = {"kind": kind, "key": key, "messages": messages, "response": response}
        p = self.path(key)
        with self._lock:
            self.root.mkdir(parents=True, exist_ok=True)
            tmp = p.with_suffix(".tmp")
            tmp.write_text(json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8")
            tmp.replace(p)
        return p

    def __len__(self) -> int:
        return len(list(self.root.glob("*.json"))) if self.root.is_dir() else 0


class ReplayTransport:
    """Answers only from fixtures; never touches the network."""

    def __init__(self, store: FixtureStore) -> None:
        self.store = store

    def send(self, kind: str, body: Mapping) -> dict:
        return self.store.load(kind, body["messages"])


class RecordTransport:
    def __init__(self, inner: Transport, store: FixtureStore) -> None:
        self.inner = inner
        self.store = store

    def send(self, kind: str, body: Mapping) -> dict:
        resp = self.inner.send(kind, body)
        self.store.save(kind, body["messages"], resp)
        return resp


class ScriptedTransport:
    """Builds responses from a callable; used to author fixtures and in tests."""

    def __init__(self, script: Callable[[str, list], object]) -> None:
        self.script = script

    def send(self, kind: str, body: Mapping) -> dict:
        out = self.script(kind, body["messages"])
        if isinstance(out, Mapping):
            return dict(out)
        return completion(str(out))


def completion(content: str, logprobs: Optional[list] = None) -> dict:
    """Minimal chat-completion response body."""
    choice: dict = {"index": 0, "message": {"role": "assistant", "content": content}, "finish_reason": "stop"}
    if logprobs is not None:
        choice["logprobs"] = {"content": logprobs}
    return {"object": "chat.completion", "choices": [choice]}
