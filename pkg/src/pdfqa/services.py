"""HTTP adapters for the pluggable model services.

Every external model (captioner, embedder, LLM, question and answer
generators) is selected by an environment variable holding its URL;
when the variable is absent the deterministic offline mock is used
instead. Wire formats are single-POST JSON.
"""

from __future__ import annotations

import base64
import logging
import os
from typing import Sequence

import numpy as np
import requests

from .embedding import MockEmbedder
from .errors import DimensionMismatchError, RetriableServiceError, ServiceError
from .llm import EchoTopChunkLlm, FirstSentenceAnswerLlm, QuestionGenLlm
from .media import MockCaptioner

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30.0

LLM_URL_VAR = "LLM_URL"
EMBEDDER_URL_VAR = "EMBEDDER_URL"
CAPTIONER_URL_VAR = "CAPTIONER_URL"
QGEN_URL_VAR = "QGEN_URL"
AGEN_URL_VAR = "AGEN_URL"


def _post_json(url: str, payload: dict, timeout: float) -> dict:
    try:
        resp = requests.post(url, json=payload, timeout=timeout)
    except requests.RequestException as exc:
        raise RetriableServiceError(f"service call to {url} failed: {exc}") from exc
    if resp.status_code != 200:
        raise RetriableServiceError(
            f"service at {url} returned HTTP {resp.status_code}"
        )
    try:
        data = resp.json()
    except ValueError as exc:
        raise ServiceError(f"service at {url} returned invalid JSON") from exc
    if not isinstance(data, dict):
        raise ServiceError(f"service at {url} returned a non-object response")
    return data


class HttpLlmClient:
    """POSTs {prompt, max_tokens}, expects {completion}."""

    def __init__(self, url: str, timeout: float = DEFAULT_TIMEOUT):
        self.url = url
        self.timeout = timeout

    def complete(self, prompt: str, max_tokens: int = 512) -> str:
        data = _post_json(self.url, {"prompt": prompt, "max_tokens": max_tokens}, self.timeout)
        completion = data.get("completion")
        if not isinstance(completion, str):
            raise ServiceError(f"LLM service at {self.url} returned no completion")
        return completion


class HttpEmbedder:
    """POSTs {texts: [...]}, expects {vectors: [[...], ...]}.

    The dimension is pinned by the first response; a later response
    with a different width is a fatal mismatch, not a retriable one.
    """

    def __init__(self, url: str, timeout: float = DEFAULT_TIMEOUT):
        self.url = url
        self.timeout = timeout
        self.dim: int = 0  # unknown until the first call

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        texts = list(texts)
        if not texts:
            return []
        data = _post_json(self.url, {"texts": texts}, self.timeout)
        vectors = data.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ServiceError(
                f"embedder at {self.url} returned {0 if not isinstance(vectors, list) else len(vectors)} "
                f"vectors for {len(texts)} texts"
            )
        out = []
        for raw in vectors:
            vec = np.asarray(raw, dtype=float)
            if vec.ndim != 1:
                raise ServiceError(f"embedder at {self.url} returned a non-flat vector")
            if self.dim == 0:
                self.dim = int(vec.shape[0])
            elif vec.shape[0] != self.dim:
                raise DimensionMismatchError(
                    f"embedder at {self.url} changed dimension from {self.dim} "
                    f"to {vec.shape[0]}"
                )
            out.append(vec)
        return out

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]


class HttpCaptioner:
    """POSTs {image_id, image_base64}, expects {caption}."""

    def __init__(self, url: str, timeout: float = DEFAULT_TIMEOUT):
        self.url = url
        self.timeout = timeout

    def caption(self, image_id: str, data: bytes) -> str:
        payload = {
            "image_id": image_id,
            "image_base64": base64.b64encode(data).decode("ascii"),
        }
        resp = _post_json(self.url, payload, self.timeout)
        caption = resp.get("caption")
        if not isinstance(caption, str) or not caption.strip():
            raise ServiceError(f"captioner at {self.url} returned no caption")
        return caption


def _url_from(env_var: str, config_url: str | None) -> str | None:
    return os.environ.get(env_var) or config_url


def resolve_llm(config_url: str | None = None):
    url = _url_from(LLM_URL_VAR, config_url)
    return HttpLlmClient(url) if url else EchoTopChunkLlm()


def resolve_embedder(config_url: str | None = None, dim: int = 128, seed: int = 0):
    url = _url_from(EMBEDDER_URL_VAR, config_url)
    return HttpEmbedder(url) if url else MockEmbedder(dim=dim, seed=seed)


def resolve_captioner(config_url: str | None = None):
    url = _url_from(CAPTIONER_URL_VAR, config_url)
    return HttpCaptioner(url) if url else MockCaptioner()


def resolve_qgen(config_url: str | None = None):
    url = _url_from(QGEN_URL_VAR, config_url)
    return HttpLlmClient(url) if url else QuestionGenLlm()


def resolve_agen(config_url: str | None = None):
    url = _url_from(AGEN_URL_VAR, config_url)
    return HttpLlmClient(url) if url else FirstSentenceAnswerLlm()
