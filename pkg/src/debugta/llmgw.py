"""Chat-completion gateway: one HTTP backend, one scripted mock, one ledger.

Every LLM interaction in the platform goes through :class:`Gateway`, which
renders a prompt template, sends it to the configured backend, and records
token usage in an append-only ledger. The mock backend replays canned
responses from a script and fails hard on any request its script does not
cover, so tests never fall through to a silent default.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import templates
from .lexing import lexical_tokens


class GatewayError(Exception):
    pass


class GatewayConfigError(GatewayError):
    """Configuration problem (bad URL, rejected key); retrying will not help."""


class MalformedModelOutput(GatewayError):
    """The model reply could not be parsed into the expected shape."""


class MockScriptError(GatewayError):
    """A request reached the mock backend that its script does not cover."""


def count_tokens(text: str) -> int:
    """Deterministic token count used by the mock backend and fallbacks."""
    return len(lexical_tokens(text))


@dataclass(frozen=True)
class ChatRequest:
    template_id: str
    slots: dict[str, str]
    temperature: float = 0.0
    max_tokens: int = 2048
    phase: str = ""

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class ChatResponse:
    text: str
    prompt_tokens: int
    completion_tokens: int
    backend_id: str


@dataclass(frozen=True)
class LedgerEntry:
    template_id: str
    phase: str
    backend_id: str
    prompt_tokens: int
    completion_tokens: int
    duration_ms: int
    # Full texts kept for leak audits; excluded from usage summaries.
    prompt: str = ""
    response_text: str = ""


class UsageLedger:
    """Append-only, thread-safe record of every completed LLM call."""

    def __init__(self):
        self._entries: list[LedgerEntry] = []
        self._lock = threading.Lock()

    def append(self, entry: LedgerEntry) -> None:
        with self._lock:
            self._entries.append(entry)

    def entries(self) -> tuple[LedgerEntry, ...]:
        with self._lock:
            return tuple(self._entries)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


@dataclass
class TokenUsageSummary:
    prompt_tokens: int
    completion_tokens: int
    total_tokens: int
    calls: int
    per_template: dict[str, dict[str, int]]

    def to_dict(self) -> dict:
        return {
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "total_tokens": self.total_tokens,
            "calls": self.calls,
            "per_template": self.per_template,
        }


def usage_report(ledger: UsageLedger | tuple[LedgerEntry, ...] | list[LedgerEntry]) -> TokenUsageSummary:
    """Totals and per-template breakdown; additive under ledger concatenation."""
    entries = ledger.entries() if isinstance(ledger, UsageLedger) else tuple(ledger)
    per_template: dict[str, dict[str, int]] = {}
    prompt = completion = 0
    for e in entries:
        prompt += e.prompt_tokens
        completion += e.completion_tokens
        bucket = per_template.setdefault(
            e.template_id, {"prompt_tokens": 0, "completion_tokens": 0, "calls": 0}
        )
        bucket["prompt_tokens"] += e.prompt_tokens
        bucket["completion_tokens"] += e.completion_tokens
        bucket["calls"] += 1
    return TokenUsageSummary(
        prompt_tokens=prompt,
        completion_tokens=completion,
        total_tokens=prompt + completion,
        calls=len(entries),
        per_template=per_template,
    )


# -- backends ------------------------------------------------------------


@dataclass
class _MockEntry:
    template_id: str
    response: str
    slot_contains: dict[str, str] = field(default_factory=dict)
    phase: str | None = None
    max_uses: int | None = None
    uses: int = 0

    def matches(self, request: ChatRequest) -> bool:
        if self.template_id != request.template_id:
            return False
        if self.phase is not None and self.phase != request.phase:
            return False
        if self.max_uses is not None and self.uses >= self.max_uses:
            return False
        for slot, needle in self.slot_contains.items():
            if needle not in request.slots.get(slot, ""):
                return False
        return True


class MockBackend:
    """Deterministic scripted backend; first matching entry wins."""

    backend_id = "mock"

    def __init__(self, script: list[dict]):
        self._entries = [
            _MockEntry(
                template_id=item["template_id"],
                response=item["response"],
                slot_contains=dict(item.get("slot_contains", {})),
                phase=item.get("phase"),
                max_uses=item.get("max_uses"),
            )
            for item in script
        ]
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> "MockBackend":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def complete(self, request: ChatRequest, prompt: str) -> ChatResponse:
        with self._lock:
            for entry in self._entries:
                if entry.matches(request):
                    entry.uses += 1
                    return ChatResponse(
                        text=entry.response,
                        prompt_tokens=count_tokens(prompt),
                        completion_tokens=count_tokens(entry.response),
                        backend_id=self.backend_id,
                    )
        raise MockScriptError(
            f"unmatched mock request: template={request.template_id!r} "
            f"phase={request.phase!r} slots={sorted(request.slots)}"
        )


class HttpBackend:
    """Chat-completions HTTP backend (messages array, bearer token)."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        timeout_ms: int = 120000,
        max_inflight: int = 4,
        max_retries: int = 3,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get("LLM_API_KEY", "")
        self.timeout_s = timeout_ms / 1000.0
        self.max_retries = max_retries
        self.backend_id = model
        self._limiter = threading.Semaphore(max_inflight)

    def complete(self, request: ChatRequest, prompt: str) -> ChatResponse:
        import requests

        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        last_error: Exception | None = None
        for attempt in range(self.max_retries):
            backoff = min(2.0**attempt, 8.0) if attempt + 1 < self.max_retries else 0.0
            try:
                with self._limiter:
                    resp = requests.post(
                        f"{self.base_url}/chat/completions",
                        json=payload,
                        headers=headers,
                        timeout=self.timeout_s,
                    )
            except requests.RequestException as exc:
                last_error = exc
                time.sleep(backoff)
                continue
            if 400 <= resp.status_code < 500:
                raise GatewayConfigError(
                    f"backend rejected request: HTTP {resp.status_code}: {resp.text[:500]}"
                )
            if resp.status_code >= 500:
                last_error = GatewayError(f"backend error HTTP {resp.status_code}")
                time.sleep(backoff)
                continue
            body = resp.json()
            text = body["choices"][0]["message"]["content"]
            usage = body.get("usage", {})
            return ChatResponse(
                text=text,
                prompt_tokens=int(usage.get("prompt_tokens", count_tokens(prompt))),
                completion_tokens=int(usage.get("completion_tokens", count_tokens(text))),
                backend_id=self.backend_id,
            )
        raise GatewayError(f"backend unreachable after {self.max_retries} attempts: {last_error}")


# -- response parsing ------------------------------------------------------

_FENCED_BLOCK_RE = re.compile(r"```[a-zA-Z+]*\r?\n(.*?)```", re.S)
_JSON_REMINDER = "Output only the JSON object, without any additional text."
_CODE_REMINDER = "Output only the complete program in a single fenced code block."


def extract_json(response_text: str) -> dict:
    """First well-formed JSON object in the reply, fences and prose stripped."""
    decoder = json.JSONDecoder()
    for match in re.finditer(r"\{", response_text):
        try:
            value, _ = decoder.raw_decode(response_text, match.start())
        except ValueError:
            continue
        if isinstance(value, dict):
            return value
    raise MalformedModelOutput("no JSON object found in model reply")


def extract_code(response_text: str) -> str:
    """Program text from the reply: the first fenced block, or the reply
    itself when it already looks like a bare program."""
    match = _FENCED_BLOCK_RE.search(response_text)
    if match:
        return match.group(1)
    stripped = response_text.strip()
    if "#include" in stripped or ("{" in stripped and ";" in stripped):
        return stripped
    raise MalformedModelOutput("no code block found in model reply")


class Gateway:
    """Renders templates, talks to one backend, and accounts every call."""

    def __init__(self, backend, ledger: UsageLedger | None = None, deterministic: bool = False):
        self.backend = backend
        self.ledger = ledger if ledger is not None else UsageLedger()
        self.deterministic = deterministic

    def complete(self, request: ChatRequest, prompt_suffix: str = "") -> ChatResponse:
        prompt = templates.render(request.template_id, request.slots, request.phase)
        if prompt_suffix:
            prompt = f"{prompt}\n\n{prompt_suffix}"
        start = time.monotonic()
        response = self.backend.complete(request, prompt)
        duration_ms = 0 if self.deterministic else int((time.monotonic() - start) * 1000)
        self.ledger.append(
            LedgerEntry(
                template_id=request.template_id,
                phase=request.phase,
                backend_id=response.backend_id,
                prompt_tokens=response.prompt_tokens,
                completion_tokens=response.completion_tokens,
                duration_ms=duration_ms,
                prompt=prompt,
                response_text=response.text,
            )
        )
        return response

    def complete_json(self, request: ChatRequest, validate=None, reasks: int = 2) -> dict:
        """Complete and parse a JSON-object reply, re-asking on malformed output."""
        last: MalformedModelOutput | None = None
        for attempt in range(reasks + 1):
            suffix = _JSON_REMINDER if attempt else ""
            response = self.complete(request, prompt_suffix=suffix)
            try:
                data = extract_json(response.text)
                if validate is not None:
                    validate(data)
                return data
            except MalformedModelOutput as exc:
                last = exc
        raise last if last else MalformedModelOutput("unreachable")

    def complete_code(self, request: ChatRequest, reasks: int = 2) -> str:
        """Complete and extract a program, re-asking on non-code replies."""
        last: MalformedModelOutput | None = None
        for attempt in range(reasks + 1):
            suffix = _CODE_REMINDER if attempt else ""
            response = self.complete(request, prompt_suffix=suffix)
            try:
                return extract_code(response.text)
            except MalformedModelOutput as exc:
                last = exc
        raise last if last else MalformedModelOutput("unreachable")
