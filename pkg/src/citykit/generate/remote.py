"""HTTP generator backend speaking the remote-tile wire protocol.

Request: POST JSON {seed, size, ratios?, text?, known?{canvas, mask, origin}}
where canvas is a base64 indexed PNG, mask a base64 grayscale PNG (255 =
committed), and origin the tile's global pixel offset. Response: the tile
as an indexed PNG body. Calls are idempotent by seed, so timeouts retry.
"""
from __future__ import annotations

import base64
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np
import requests
from PIL import Image

from ..layout import GenerationCondition, SemanticLayout, decode_png, encode_png
from .backend import BackendFailureError, GeneratorBackend, KnownRegion


@dataclass(frozen=True)
class RemoteGeneratorConfig:
    endpoint: str
    timeout_s: float = 30.0
    retries: int = 2


def _mask_png(mask: np.ndarray) -> bytes:
    img = Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


class RemoteBackend(GeneratorBackend):
    name = "remote"
    supports_ratios = True
    supports_text = True
    supports_partial = True

    def __init__(self, config: RemoteGeneratorConfig, session: Optional[requests.Session] = None):
        self.config = config
        self._session = session or requests.Session()

    def generate_tile(
        self,
        condition: GenerationCondition,
        width: int,
        height: int,
        known: Optional[KnownRegion] = None,
    ) -> SemanticLayout:
        if width != height:
            raise BackendFailureError("remote protocol carries a single square tile size")
        body = {"seed": condition.seed, "size": width}
        if condition.ratios is not None:
            body["ratios"] = [float(v) for v in condition.ratios.ratios]
        if condition.text is not None:
            body["text"] = condition.text
        if known is not None:
            canvas = SemanticLayout(known.labels, 1.0)
            body["known"] = {
                "canvas": base64.b64encode(encode_png(canvas)).decode("ascii"),
                "mask": base64.b64encode(_mask_png(known.mask)).decode("ascii"),
                "origin": list(known.origin),
            }
        last_error: Exception | None = None
        for _ in range(self.config.retries + 1):
            try:
                resp = self._session.post(
                    self.config.endpoint, json=body, timeout=self.config.timeout_s
                )
            except (requests.Timeout, requests.ConnectionError) as exc:
                last_error = exc
                continue
            if resp.status_code != 200:
                raise BackendFailureError(
                    f"generator endpoint returned HTTP {resp.status_code}: {resp.text[:200]}"
                )
            try:
                return decode_png(resp.content)
            except Exception as exc:
                raise BackendFailureError(f"generator response is not a valid layout PNG: {exc}") from exc
        raise BackendFailureError(f"generator endpoint unreachable: {last_error}")
