"""The simulated student and the teacher-student session loop.

The student receives only the problem statement, its own current program, and
the teacher's suggestions; it never sees reference code, raw compiler output,
or test cases. Each round the teacher is re-invoked on the student's latest
program, the student revises, and the judge scores the revision; the loop
stops at the round cap or as soon as every test passes. Code-mode baseline
strategies return a full program directly and end the session in one round.

After the loop the final program is checked for plagiarism against the last
retrieved reference (or a fresh retrieval when none was recorded) and the
recorded score is zeroed if the check trips.
"""

from __future__ import annotations

import hashlib
import json
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from . import templates
from .agent import STRATEGIES, SuggestionSet, Teacher, ToolCall
from .corpus import Problem
from .judge import JudgeResult
from .llmgw import ChatRequest, Gateway, MalformedModelOutput, UsageLedger
from .plagiarism import PlagiarismConfig, PlagiarismVerdict, apply_plag_zeroing, plag_check
from .retrieval import EmptyPoolError, code_search

DEFAULT_MAX_ROUNDS = 3


@dataclass(frozen=True)
class SessionConfig:
    max_rounds: int = DEFAULT_MAX_ROUNDS
    early_stop_on_ac_all: bool = True
    strategy_id: str = "debugta"

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.strategy_id not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy_id!r}")


class StuBot:
    """LLM student: applies suggestions to its program, one call per round."""

    def __init__(self, gateway: Gateway):
        self.gateway = gateway

    def revise(self, code: str, suggestions: SuggestionSet, question: str) -> str:
        if not suggestions.items:
            raise ValueError("cannot revise without suggestions")
        numbered = "\n".join(f"{i}. {s}" for i, s in enumerate(suggestions.items, 1))
        return self.gateway.complete_code(
            ChatRequest(
                templates.STUBOT_REVISE,
                slots={"question": question, "current_code": code, "suggestions": numbered},
            )
        )


@dataclass
class RoundRecord:
    round_index: int
    code_before: str
    suggestions: SuggestionSet | None
    code_after: str
    judge_result: JudgeResult
    prompt_tokens: int
    completion_tokens: int

    def to_dict(self) -> dict:
        return {
            "round_index": self.round_index,
            "code_before": self.code_before,
            "suggestions": self.suggestions.to_dict() if self.suggestions else None,
            "code_after": self.code_after,
            "judge_result": self.judge_result.to_dict(),
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RoundRecord":
        suggestions = None
        if data["suggestions"] is not None:
            raw = data["suggestions"]
            suggestions = SuggestionSet(
                kind=raw["kind"],
                items=list(raw["items"]),
                source_trace=[ToolCall(**c) for c in raw["source_trace"]],
            )
        return cls(
            round_index=data["round_index"],
            code_before=data["code_before"],
            suggestions=suggestions,
            code_after=data["code_after"],
            judge_result=JudgeResult.from_dict(data["judge_result"]),
            prompt_tokens=data["prompt_tokens"],
            completion_tokens=data["completion_tokens"],
        )


@dataclass
class SessionTranscript:
    session_id: str
    dataset_id: str
    problem_id: str
    submission_id: str
    strategy_id: str
    max_rounds: int
    initial_code: str
    initial_judge: JudgeResult
    rounds: list[RoundRecord]
    final_code: str
    final_judge: JudgeResult
    plagiarism: PlagiarismVerdict | None
    stopped_early: bool
    prompt_tokens: int
    completion_tokens: int
    config: dict = field(default_factory=dict)
    config_fingerprint: str = ""
    deterministic_timings: bool = False

    @property
    def tokens_total(self) -> int:
        return self.prompt_tokens + self.completion_tokens

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "dataset_id": self.dataset_id,
            "problem_id": self.problem_id,
            "submission_id": self.submission_id,
            "strategy_id": self.strategy_id,
            "max_rounds": self.max_rounds,
            "initial_code": self.initial_code,
            "initial_judge": self.initial_judge.to_dict(),
            "rounds": [r.to_dict() for r in self.rounds],
            "final_code": self.final_code,
            "final_judge": self.final_judge.to_dict(),
            "plagiarism": self.plagiarism.to_dict() if self.plagiarism else None,
            "stopped_early": self.stopped_early,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "tokens_total": self.tokens_total,
            "config": self.config,
            "config_fingerprint": self.config_fingerprint,
            "deterministic_timings": self.deterministic_timings,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def save(self, directory: str | Path) -> Path:
        path = Path(directory) / f"{self.session_id}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path

    @classmethod
    def from_dict(cls, data: dict) -> "SessionTranscript":
        return cls(
            session_id=data["session_id"],
            dataset_id=data["dataset_id"],
            problem_id=data["problem_id"],
            submission_id=data["submission_id"],
            strategy_id=data["strategy_id"],
            max_rounds=data["max_rounds"],
            initial_code=data["initial_code"],
            initial_judge=JudgeResult.from_dict(data["initial_judge"]),
            rounds=[RoundRecord.from_dict(r) for r in data["rounds"]],
            final_code=data["final_code"],
            final_judge=JudgeResult.from_dict(data["final_judge"]),
            plagiarism=(
                PlagiarismVerdict.from_dict(data["plagiarism"])
                if data["plagiarism"] is not None
                else None
            ),
            stopped_early=data["stopped_early"],
            prompt_tokens=data["prompt_tokens"],
            completion_tokens=data["completion_tokens"],
            config=data["config"],
            config_fingerprint=data["config_fingerprint"],
            deterministic_timings=data["deterministic_timings"],
        )

    @classmethod
    def load(cls, path: str | Path) -> "SessionTranscript":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def config_fingerprint(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True).encode("utf-8")
    ).hexdigest()[:16]


def _ledger_delta(ledgers: list[UsageLedger], marks: list[int]) -> tuple[int, int]:
    prompt = completion = 0
    for ledger, mark in zip(ledgers, marks):
        for entry in ledger.entries()[mark:]:
            prompt += entry.prompt_tokens
            completion += entry.completion_tokens
    return prompt, completion


def run_session(
    problem: Problem,
    initial_code: str,
    config: SessionConfig,
    teacher: Teacher,
    stubot: StuBot,
    judge,
    plag_config: PlagiarismConfig | None = None,
    dataset_id: str = "",
    submission_id: str = "",
    deterministic: bool = False,
) -> SessionTranscript:
    """Run one full teaching session and return its transcript.

    With ``deterministic`` set, wall times are zeroed and the session id is
    derived from the inputs, so transcripts are byte-stable across runs under
    the mock backend.
    """
    plag_cfg = plag_config or PlagiarismConfig()
    ledgers: list[UsageLedger] = [teacher.agent.gateway.ledger]
    if stubot.gateway.ledger is not ledgers[0]:
        ledgers.append(stubot.gateway.ledger)
    session_start_marks = [len(l) for l in ledgers]

    def normalized(result: JudgeResult) -> JudgeResult:
        return result.with_zeroed_times() if deterministic else result

    initial_judge = normalized(judge.run_tests(initial_code, problem))
    rounds: list[RoundRecord] = []
    current = initial_code
    solved = initial_judge.ac_all
    last_s_star = None

    if not solved:
        for round_index in range(1, config.max_rounds + 1):
            marks = [len(l) for l in ledgers]
            outcome = teacher.teach(current, problem)
            if outcome.s_star is not None:
                last_s_star = outcome.s_star

            code_mode = outcome.revised_code is not None
            if code_mode:
                new_code = outcome.revised_code
                suggestions = None
            else:
                suggestions = outcome.suggestions
                try:
                    new_code = stubot.revise(current, suggestions, problem.statement)
                except MalformedModelOutput:
                    new_code = current  # failed round: code unchanged
            judge_result = normalized(judge.run_tests(new_code, problem))
            prompt_toks, completion_toks = _ledger_delta(ledgers, marks)
            rounds.append(
                RoundRecord(
                    round_index=round_index,
                    code_before=current,
                    suggestions=suggestions,
                    code_after=new_code,
                    judge_result=judge_result,
                    prompt_tokens=prompt_toks,
                    completion_tokens=completion_toks,
                )
            )
            current = new_code
            if code_mode:
                solved = judge_result.ac_all
                break
            if config.early_stop_on_ac_all and judge_result.ac_all:
                solved = True
                break

    final_code = current
    final_judge = rounds[-1].judge_result if rounds else initial_judge

    verdict: PlagiarismVerdict | None = None
    standard = last_s_star
    if standard is None and problem.pool:
        try:
            standard = code_search(final_code, problem.pool).entry
        except EmptyPoolError:
            standard = None
    if standard is not None:
        verdict = plag_check(
            standard.code, initial_code, final_code, plag_cfg, standard_id=standard.id
        )
        if verdict.plagiarized:
            final_judge = apply_plag_zeroing(final_judge, verdict)

    prompt_total, completion_total = _ledger_delta(ledgers, session_start_marks)

    strategy = STRATEGIES[config.strategy_id]
    config_data = {
        "strategy_id": config.strategy_id,
        "output_mode": strategy.output_mode,
        "max_rounds": config.max_rounds,
        "early_stop_on_ac_all": config.early_stop_on_ac_all,
        "tau_sim": plag_cfg.tau_sim,
        "tau_diff": plag_cfg.tau_diff,
        "bm25_k1": teacher.agent.config.bm25_k1,
        "bm25_b": teacher.agent.config.bm25_b,
        "skip_jaccard": teacher.agent.config.skip_jaccard,
        "max_snippet_lines": teacher.agent.config.max_snippet_lines,
        "align_max_retries": teacher.agent.config.align_max_retries,
        "curve_convention": "best_so_far",
    }

    if deterministic:
        seed = f"{dataset_id}|{problem.id}|{submission_id}|{config.strategy_id}|{initial_code}"
        session_id = hashlib.sha256(seed.encode("utf-8")).hexdigest()[:16]
    else:
        session_id = uuid.uuid4().hex[:16]

    return SessionTranscript(
        session_id=session_id,
        dataset_id=dataset_id,
        problem_id=problem.id,
        submission_id=submission_id,
        strategy_id=config.strategy_id,
        max_rounds=config.max_rounds,
        initial_code=initial_code,
        initial_judge=initial_judge,
        rounds=rounds,
        final_code=final_code,
        final_judge=final_judge,
        plagiarism=verdict,
        stopped_early=solved and len(rounds) < config.max_rounds,
        prompt_tokens=prompt_total,
        completion_tokens=completion_total,
        config=config_data,
        config_fingerprint=config_fingerprint(config_data),
        deterministic_timings=deterministic,
    )
