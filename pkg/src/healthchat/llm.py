"""Chat-completion gateway: one seam for every generated reply.

Everything above this module talks to an LLMGateway; tests and offline
runs use the scripted stub, deployments point the remote gateway at any
chat-completion endpoint speaking the common messages schema.
"""

from __future__ import annotations

import copy
import os
import threading
import time
from dataclasses import dataclass

import httpx

from .errors import HealthchatError

API_KEY_ENV = "LLM_API_KEY"


class LLMError(HealthchatError):
    """Completion failed (timeout, bad status, or exhausted stub script)."""


@dataclass(frozen=True)
class Message:
    role: str  # system | user | assistant
    content: str


@dataclass(frozen=True)
class CompletionRequest:
    messages: tuple[Message, ...]
    temperature: float = 0.0
    max_tokens: int = 1024

    def __post_init__(self):
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")
        for i, message in enumerate(self.messages):
            if message.role not in ("system", "user", "assistant"):
                raise ValueError(f"unknown role {message.role!r}")
            if message.role == "system" and i != 0:
                raise ValueError("system message must come first")
            if not message.content.strip():
                raise ValueError("message contents must be non-empty")


class LLMGateway:
    def complete(self, request: CompletionRequest) -> str:
        raise NotImplementedError


class ScriptedLLM(LLMGateway):
    """Deterministic stub: replays a fixed script and records every request.

    An exhausted script raises rather than silently reusing replies, so a
    test that under-provisions its script fails loudly.
    """

    def __init__(self, script: list[str]):
        self.script = list(script)
        self.recording: list[CompletionRequest] = []
        self._cursor = 0
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> str:
        with self._lock:
            self.recording.append(copy.deepcopy(request))
            if self._cursor >= len(self.script):
                raise LLMError(
                    f"stub script exhausted after {len(self.script)} replies"
                )
            reply = self.script[self._cursor]
            self._cursor += 1
            return reply

    @property
    def calls(self) -> int:
        return self._cursor


class FailingLLM(LLMGateway):
    """Stub that always fails; used to exercise degradation paths."""

    def __init__(self, message: str = "gateway unavailable"):
        self.message = message

    def complete(self, request: CompletionRequest) -> str:
        raise LLMError(self.message)


class RemoteLLM(LLMGateway):
    """HTTP chat-completion client with one retry on transient failure."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        timeout: float = 30.0,
        retry_backoff: float = 0.5,
        api_key: str | None = None,
        client: httpx.Client | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout
        self.retry_backoff = retry_backoff
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self._client = client or httpx.Client(timeout=timeout)

    def _post(self, request: CompletionRequest) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        response = self._client.post(
            self.endpoint, json=body, headers=headers, timeout=self.timeout
        )
        response.raise_for_status()
        doc = response.json()
        try:
            return doc["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as e:
            raise LLMError(f"malformed completion response from {self.endpoint}") from e

    def complete(self, request: CompletionRequest) -> str:
        attempts = 0
        while True:
            try:
                return self._post(request)
            except (httpx.TimeoutException, httpx.TransportError) as e:
                attempts += 1
                if attempts > 1:
                    raise LLMError(f"completion failed after retry: {e}") from e
            except httpx.HTTPStatusError as e:
                if e.response.status_code < 500:
                    raise LLMError(
                        f"completion rejected with status {e.response.status_code}"
                    ) from e
                attempts += 1
                if attempts > 1:
                    raise LLMError(f"completion failed after retry: {e}") from e
            time.sleep(self.retry_backoff)
