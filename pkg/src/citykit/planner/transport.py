"""Chat-completion transports: live HTTP, recording, and fixture replay.

A transport is a callable taking the JSON request payload and returning the
parsed JSON response body. Recording wraps any transport and appends
request/response pairs to a JSONL fixture; replay serves a fixture back in
order, which is how the planner's network behavior is tested offline.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Callable, Dict, List, Optional

import requests

Transport = Callable[[dict], dict]


class PlannerTimeoutError(RuntimeError):
    pass


class AuthFailureError(RuntimeError):
    pass


class HttpChatTransport:
    def __init__(self, endpoint: str, api_key: Optional[str] = None, timeout_s: float = 60.0):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout_s = timeout_s
        self._session = requests.Session()

    def __call__(self, payload: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = self._session.post(
                self.endpoint, json=payload, headers=headers, timeout=self.timeout_s
            )
        except (requests.Timeout, requests.ConnectionError) as exc:
            raise PlannerTimeoutError(f"planner endpoint unreachable: {exc}") from exc
        if resp.status_code in (401, 403):
            raise AuthFailureError(f"planner endpoint rejected credentials (HTTP {resp.status_code})")
        if resp.status_code != 200:
            raise RuntimeError(f"planner endpoint returned HTTP {resp.status_code}: {resp.text[:200]}")
        return resp.json()


class RecordingTransport:
    """Wraps a transport; logs every exchange to a JSONL fixture file."""

    def __init__(self, inner: Transport, path: Path):
        self.inner = inner
        self.path = Path(path)

    def __call__(self, payload: dict) -> dict:
        response = self.inner(payload)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps({"request": payload, "response": response}) + "\n")
        return response


class ReplayTransport:
    """Serves a recorded fixture sequentially; raises when exhausted."""

    def __init__(self, path: Path):
        self.exchanges: List[Dict] = []
        with Path(path).open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    self.exchanges.append(json.loads(line))
        self.cursor = 0
        self.requests_seen: List[dict] = []

    def __call__(self, payload: dict) -> dict:
        if self.cursor >= len(self.exchanges):
            raise PlannerTimeoutError("replay fixture exhausted")
        exchange = self.exchanges[self.cursor]
        self.cursor += 1
        self.requests_seen.append(payload)
        return exchange["response"]
