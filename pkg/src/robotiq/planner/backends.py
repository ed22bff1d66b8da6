"""Planner backends: the deterministic rule grammar and an external
chat-completions-style HTTP endpoint."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass

import requests

from ..errors import BackendError
from .grammar import RuleGrammar


@dataclass
class RuleBasedBackend:
    """Bypasses prompting entirely: grammar output serialized as the plan."""

    grammar: RuleGrammar
    id: str = "rule"

    def generate(self, user_text: str) -> str:
        steps = self.grammar.parse_command(user_text)
        return json.dumps([s.to_dict() for s in steps])


@dataclass
class ExternalBackend:
    """HTTP POST to a chat-completions endpoint; the reply text is the plan."""

    endpoint: str
    model: str = "default"
    token: str | None = None
    timeout: float = 30.0
    id: str = "llm"

    def __post_init__(self):
        if not self.timeout > 0:
            raise BackendError("external backend timeout must be positive")

    def generate(self, prompt: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        body = {"model": self.model, "messages": [{"role": "user", "content": prompt}]}
        try:
            resp = requests.post(self.endpoint, json=body, headers=headers, timeout=self.timeout)
        except requests.RequestException as exc:
            raise BackendError(f"backend request failed: {exc}") from exc
        if resp.status_code != 200:
            raise BackendError(f"backend returned HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"backend response not in chat-completions shape: {exc}") from exc


PlannerBackend = RuleBasedBackend | ExternalBackend


def call_backend(backend: PlannerBackend, prompt: str, user_text: str = "") -> tuple[str, float]:
    """Run the backend; returns (raw text, elapsed wall-clock seconds)."""
    t0 = time.perf_counter()
    if isinstance(backend, RuleBasedBackend):
        raw = backend.generate(user_text)
    else:
        raw = backend.generate(prompt)
    return raw, time.perf_counter() - t0


def external_backend_from_env(
    endpoint: str | None = None,
    model: str | None = None,
    token: str | None = None,
    timeout: float = 30.0,
) -> ExternalBackend:
    endpoint = endpoint or os.environ.get("ROBOTIQ_LLM_ENDPOINT")
    if not endpoint:
        raise BackendError("no endpoint configured (set ROBOTIQ_LLM_ENDPOINT)")
    return ExternalBackend(
        endpoint=endpoint,
        model=model or os.environ.get("ROBOTIQ_LLM_MODEL", "default"),
        token=token or os.environ.get("ROBOTIQ_LLM_TOKEN"),
        timeout=timeout,
    )
