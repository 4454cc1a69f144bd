"""The teaching agent: memory, adaptive routing, and baseline strategies.

For each erroneous submission the agent stores the program and problem in its
memory, probes the compiler, and routes exclusively: non-empty diagnostics
take the syntax branch (one focused LLM call on code + messages); an empty
report takes the logic branch (pool retrieval, conditional variable
alignment, then a logic-correction call that sees only the aligned reference,
the student program, and the problem statement). Every LLM call receives the
slots its template declares and nothing else.

Suggestions pass a leakage guard before they reach the student: any item
quoting more than a configured number of contiguous reference lines triggers
one regeneration, then mechanical truncation of the offending block.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

from . import align as align_mod
from . import templates
from .corpus import PoolEntry, Problem
from .llmgw import ChatRequest, Gateway, MalformedModelOutput
from .plagiarism import matching_blocks
from .retrieval import EmptyPoolError, code_search

MEMORY_KEYS = frozenset(
    {
        "question",
        "erroneous_code",
        "error_messages",
        "standard_code",
        "aligned_code",
        "suggestions_syntax",
        "suggestions_logic",
        "alignment_failed",
    }
)

KIND_SYNTAX = "syntax"
KIND_LOGIC = "logic"
KIND_COMBINED = "combined"

OUTPUT_CODE = "code"
OUTPUT_SUGGESTIONS = "suggestions"

DEFAULT_MAX_SNIPPET_LINES = 3


class MemoryKeyError(KeyError):
    pass


class Memory:
    """Dictionary-shaped agent memory with a fixed slot vocabulary."""

    def __init__(self):
        self._slots: dict[str, str] = {}

    def write(self, key: str, value: str) -> None:
        if key not in MEMORY_KEYS:
            raise MemoryKeyError(f"unknown memory slot {key!r}")
        self._slots[key] = value

    def read(self, key: str) -> str | None:
        """Value of the slot, or None when nothing was stored (never '')."""
        if key not in MEMORY_KEYS:
            raise MemoryKeyError(f"unknown memory slot {key!r}")
        return self._slots.get(key)

    def has(self, key: str) -> bool:
        return key in self._slots

    def as_dict(self) -> dict[str, str]:
        return dict(self._slots)


@dataclass(frozen=True)
class ToolCall:
    name: str
    inputs_hash: str
    duration_ms: int
    prompt_tokens: int
    completion_tokens: int

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs_hash": self.inputs_hash,
            "duration_ms": self.duration_ms,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
        }


@dataclass
class SuggestionSet:
    kind: str  # syntax | logic | combined
    items: list[str]
    source_trace: list[ToolCall] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "items": list(self.items),
            "source_trace": [c.to_dict() for c in self.source_trace],
        }


def trace_to_jsonl(calls: list[ToolCall]) -> str:
    """One JSON line per tool or LLM call, in invocation order."""
    return "\n".join(json.dumps(c.to_dict(), sort_keys=True) for c in calls)


@dataclass(frozen=True)
class TeacherStrategy:
    id: str
    output_mode: str


STRATEGIES: dict[str, TeacherStrategy] = {
    s.id: s
    for s in (
        TeacherStrategy("debugta", OUTPUT_SUGGESTIONS),
        TeacherStrategy("direct_debug", OUTPUT_CODE),
        TeacherStrategy("debug_with_s", OUTPUT_CODE),
        TeacherStrategy("selfdebug_explain", OUTPUT_CODE),
        TeacherStrategy("selfdebug_trace", OUTPUT_CODE),
        TeacherStrategy("direct_teach", OUTPUT_SUGGESTIONS),
    )
}


@dataclass
class AgentConfig:
    max_snippet_lines: int = DEFAULT_MAX_SNIPPET_LINES
    skip_jaccard: float = align_mod.DEFAULT_SKIP_JACCARD
    align_max_retries: int = align_mod.DEFAULT_MAX_RETRIES
    bm25_k1: float = 1.2
    bm25_b: float = 0.75
    tokenizer: object | None = None  # retrieval.Tokenizer; None means lexical


def _inputs_hash(*parts: str) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()[:16]


def _normalized_lines(text: str) -> list[str]:
    return [line.strip() for line in text.splitlines() if line.strip()]


def longest_shared_run(item_text: str, reference_text: str) -> int:
    """Longest run of contiguous whitespace-normalized lines shared verbatim."""
    item_lines = _normalized_lines(item_text)
    ref_lines = _normalized_lines(reference_text)
    if not item_lines or not ref_lines:
        return 0
    blocks = matching_blocks(item_lines, ref_lines)
    return max((k for _, _, k in blocks), default=0)


def violates_snippet_guard(items: list[str], references: list[str], max_lines: int) -> bool:
    return any(
        longest_shared_run(item, ref) > max_lines
        for item in items
        for ref in references
    )


def truncate_long_snippets(item: str, references: list[str], max_lines: int) -> str:
    """Cut any shared block down to ``max_lines`` lines, marking the elision."""
    lines = item.splitlines()
    for ref in references:
        while True:
            norm_map = [i for i, line in enumerate(lines) if line.strip()]
            norm_lines = [lines[i].strip() for i in norm_map]
            ref_lines = _normalized_lines(ref)
            if not norm_lines or not ref_lines:
                break
            overlong = [
                (i, k)
                for i, _, k in matching_blocks(norm_lines, ref_lines)
                if k > max_lines
            ]
            if not overlong:
                break
            start, k = overlong[0]
            cut = [norm_map[j] for j in range(start + max_lines, start + k)]
            kept: list[str] = []
            for idx, line in enumerate(lines):
                if idx == cut[0]:
                    kept.append("[reference code elided]")
                if idx not in cut:
                    kept.append(line)
            lines = kept
    return "\n".join(lines)


def _validated_suggestions(data: dict) -> None:
    items = data.get("suggestions")
    if not isinstance(items, list) or not items or not all(
        isinstance(i, str) and i.strip() for i in items
    ):
        raise MalformedModelOutput("reply JSON lacks a non-empty suggestions list")


class DebugTeacher:
    """The tool-using teacher plus the five baseline strategies."""

    def __init__(self, gateway: Gateway, judge, config: AgentConfig | None = None):
        self.gateway = gateway
        self.judge = judge
        self.config = config or AgentConfig()
        self.memory = Memory()
        self.last_s_star: PoolEntry | None = None
        self.last_warnings: list[str] = []

    # -- trace helpers ---------------------------------------------------

    def _traced(self, trace: list[ToolCall], name: str, inputs: tuple[str, ...], fn):
        before = len(self.gateway.ledger)
        start = time.monotonic()
        result = fn()
        duration = 0 if self.gateway.deterministic else int((time.monotonic() - start) * 1000)
        new_entries = self.gateway.ledger.entries()[before:]
        trace.append(
            ToolCall(
                name=name,
                inputs_hash=_inputs_hash(*inputs),
                duration_ms=duration,
                prompt_tokens=sum(e.prompt_tokens for e in new_entries),
                completion_tokens=sum(e.completion_tokens for e in new_entries),
            )
        )
        return result

    # -- the adaptive guideline -------------------------------------------

    def debug_and_teach(self, erroneous_code: str, problem: Problem) -> SuggestionSet:
        """Route between the syntax and logic branches and emit suggestions."""
        self.memory = Memory()
        self.last_s_star = None
        self.last_warnings = []
        trace: list[ToolCall] = []

        self.memory.write("question", problem.statement)
        self.memory.write("erroneous_code", erroneous_code)

        report = self._traced(
            trace, "compile", (erroneous_code,), lambda: self.judge.compile(erroneous_code)
        )
        self.memory.write("error_messages", report.messages)

        if report.messages:
            suggestions = self._syn_correction_items(trace)
            return SuggestionSet(kind=KIND_SYNTAX, items=suggestions, source_trace=trace)

        return self._logic_branch(problem, trace)

    def _syn_correction_items(self, trace: list[ToolCall]) -> list[str]:
        code = self.memory.read("erroneous_code")
        messages = self.memory.read("error_messages")
        data = self._traced(
            trace,
            "syn_correction",
            (code, messages),
            lambda: self.gateway.complete_json(
                ChatRequest(
                    templates.SYN_CORRECTION,
                    slots={"erroneous_code": code, "error_messages": messages},
                ),
                validate=_validated_suggestions,
            ),
        )
        items = [i.strip() for i in data["suggestions"]]
        self.memory.write("suggestions_syntax", "\n".join(items))
        return items

    def _logic_branch(self, problem: Problem, trace: list[ToolCall]) -> SuggestionSet:
        code = self.memory.read("erroneous_code")
        question = self.memory.read("question")

        try:
            retrieval = self._traced(
                trace,
                "code_search",
                (code, problem.id),
                lambda: code_search(
                    code,
                    problem.pool,
                    tokenizer=self.config.tokenizer,
                    k1=self.config.bm25_k1,
                    b=self.config.bm25_b,
                ),
            )
        except EmptyPoolError:
            self.last_warnings.append(
                f"standard-code pool empty for problem {problem.id!r}; "
                "falling back to reference-free suggestions"
            )
            return self._empty_pool_fallback(problem, trace)

        s_star = retrieval.entry
        self.last_s_star = s_star
        self.memory.write("standard_code", s_star.code)

        if align_mod.should_skip_alignment(s_star.code, code, self.config.skip_jaccard):
            aligned = align_mod.AlignedCode(
                code=s_star.code,
                mapping_used=align_mod.VariableMapping({}),
                verified=True,
                attempts=0,
            )
        else:
            aligned = self._traced(
                trace,
                "align",
                (s_star.code, code),
                lambda: align_mod.align(
                    self.gateway,
                    self.judge,
                    s_star,
                    code,
                    problem,
                    max_retries=self.config.align_max_retries,
                ),
            )
            if aligned.fallback:
                self.memory.write("alignment_failed", "true")
        self.memory.write("aligned_code", aligned.code)

        items = self._logic_correction_items(aligned, code, question, trace)
        return SuggestionSet(kind=KIND_LOGIC, items=items, source_trace=trace)

    def _logic_correction_items(
        self,
        aligned: align_mod.AlignedCode,
        erroneous_code: str,
        question: str,
        trace: list[ToolCall],
    ) -> list[str]:
        if not aligned.verified:
            raise ValueError("logic correction requires a verified aligned reference")
        request = ChatRequest(
            templates.LOGIC_CORRECTION,
            slots={
                "question": question,
                "aligned_code": aligned.code,
                "erroneous_code": erroneous_code,
            },
        )
        references = [aligned.code]
        if self.last_s_star is not None and self.last_s_star.code != aligned.code:
            references.append(self.last_s_star.code)

        def ask() -> list[str]:
            data = self.gateway.complete_json(request, validate=_validated_suggestions)
            return [i.strip() for i in data["suggestions"]]

        items = self._traced(
            trace, "logic_correction", (aligned.code, erroneous_code), ask
        )
        if violates_snippet_guard(items, references, self.config.max_snippet_lines):
            items = self._traced(
                trace, "logic_correction_retry", (aligned.code, erroneous_code), ask
            )
            items = [
                truncate_long_snippets(i, references, self.config.max_snippet_lines)
                for i in items
            ]
        self.memory.write("suggestions_logic", "\n".join(items))
        return items

    def _empty_pool_fallback(self, problem: Problem, trace: list[ToolCall]) -> SuggestionSet:
        code = self.memory.read("erroneous_code")
        question = self.memory.read("question")
        data = self._traced(
            trace,
            "empty_pool_teach",
            (code,),
            lambda: self.gateway.complete_json(
                ChatRequest(
                    templates.EMPTY_POOL_TEACH,
                    slots={"question": question, "erroneous_code": code},
                ),
                validate=_validated_suggestions,
            ),
        )
        items = [i.strip() for i in data["suggestions"]]
        self.memory.write("suggestions_logic", "\n".join(items))
        return SuggestionSet(kind=KIND_LOGIC, items=items, source_trace=trace)

    # -- spec-facing single ops -------------------------------------------

    def syn_correction(self, erroneous_code: str, error_messages: str) -> SuggestionSet:
        """Syntax-branch suggestions for a program with compiler diagnostics."""
        if not error_messages:
            raise ValueError("syn_correction requires non-empty error messages")
        self.memory = Memory()
        self.memory.write("erroneous_code", erroneous_code)
        self.memory.write("error_messages", error_messages)
        trace: list[ToolCall] = []
        items = self._syn_correction_items(trace)
        return SuggestionSet(kind=KIND_SYNTAX, items=items, source_trace=trace)

    def logic_correction(
        self, aligned: align_mod.AlignedCode, erroneous_code: str, question: str
    ) -> SuggestionSet:
        """Logic-branch suggestions given a verified aligned reference."""
        self.memory = Memory()
        self.memory.write("erroneous_code", erroneous_code)
        self.memory.write("question", question)
        self.memory.write("aligned_code", aligned.code)
        trace: list[ToolCall] = []
        items = self._logic_correction_items(aligned, erroneous_code, question, trace)
        return SuggestionSet(kind=KIND_LOGIC, items=items, source_trace=trace)

    # -- baselines ----------------------------------------------------------

    def run_baseline(
        self, strategy: TeacherStrategy, erroneous_code: str, problem: Problem
    ) -> SuggestionSet | str:
        """One baseline teacher step: revised code, or suggestions for the student."""
        if strategy.id not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy.id!r}")
        self.last_s_star = None
        slots = {"question": problem.statement, "erroneous_code": erroneous_code}

        if strategy.id == "debugta":
            return self.debug_and_teach(erroneous_code, problem)

        if strategy.id == "direct_debug":
            return self.gateway.complete_code(
                ChatRequest(templates.BASELINE_DIRECT_DEBUG, slots=slots)
            )

        if strategy.id in ("debug_with_s", "direct_teach"):
            retrieval = code_search(
                erroneous_code,
                problem.pool,
                tokenizer=self.config.tokenizer,
                k1=self.config.bm25_k1,
                b=self.config.bm25_b,
            )
            self.last_s_star = retrieval.entry
            slots["standard_code"] = retrieval.entry.code
            if strategy.id == "debug_with_s":
                return self.gateway.complete_code(
                    ChatRequest(templates.BASELINE_DEBUG_WITH_S, slots=slots)
                )
            data = self.gateway.complete_json(
                ChatRequest(templates.BASELINE_DIRECT_TEACH, slots=slots),
                validate=_validated_suggestions,
            )
            return SuggestionSet(
                kind=KIND_COMBINED, items=[i.strip() for i in data["suggestions"]]
            )

        template_id = (
            templates.BASELINE_SELFDEBUG_EXPLAIN
            if strategy.id == "selfdebug_explain"
            else templates.BASELINE_SELFDEBUG_TRACE
        )
        analysis = self.gateway.complete(
            ChatRequest(template_id, slots=slots, phase=templates.PHASE_ANALYZE)
        ).text
        return self.gateway.complete_code(
            ChatRequest(
                template_id,
                slots={**slots, "analysis": analysis},
                phase=templates.PHASE_FIX,
            )
        )


@dataclass
class TeachOutcome:
    """Normalized result of one teacher step for the session loop."""

    suggestions: SuggestionSet | None
    revised_code: str | None
    s_star: PoolEntry | None
    warnings: list[str] = field(default_factory=list)


class Teacher:
    """Strategy-dispatching facade used by the session runner."""

    def __init__(self, strategy_id: str, gateway: Gateway, judge, config: AgentConfig | None = None):
        if strategy_id not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy_id!r}")
        self.strategy = STRATEGIES[strategy_id]
        self.agent = DebugTeacher(gateway, judge, config)

    def teach(self, code: str, problem: Problem) -> TeachOutcome:
        result = self.agent.run_baseline(self.strategy, code, problem)
        if isinstance(result, SuggestionSet):
            return TeachOutcome(
                suggestions=result,
                revised_code=None,
                s_star=self.agent.last_s_star,
                warnings=list(self.agent.last_warnings),
            )
        return TeachOutcome(
            suggestions=None,
            revised_code=result,
            s_star=self.agent.last_s_star,
            warnings=list(self.agent.last_warnings),
        )
