"""Application configuration: TOML file plus DEBUGTA_-prefixed env overrides.

Sections and keys (all optional; defaults shown in the dataclasses below):

    [llm]        backend ("mock"|"http"), base_url, model, mock_script,
                 max_inflight, timeout_ms, temperature, max_retries
    [stubot]     same keys as [llm]; unset keys fall back to [llm]
    [judge]      compiler_cmd (one string, space separated), compile_timeout_ms,
                 run_workers, cache_dir
    [retrieval]  bm25_k1, bm25_b, tokenizer ("lexical"|"bpe"), vocab_path,
                 merges_path
    [align]      max_retries, skip_jaccard
    [plagiarism] tau_sim, tau_diff
    [agent]      max_snippet_lines
    [corpus]     exclusion_window_hours, verify_pool
    [service]    round_cap, data_dir, bearer_token

Environment variables such as DEBUGTA_LLM_MODEL or DEBUGTA_PLAGIARISM_TAU_SIM
override file values; the API key is always read from LLM_API_KEY.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .agent import AgentConfig
from .judge import Judge, JudgeConfig
from .llmgw import Gateway, HttpBackend, MockBackend, UsageLedger


class ConfigError(Exception):
    pass


@dataclass
class LlmSection:
    backend: str = "http"
    base_url: str = "http://localhost:8000/v1"
    model: str = "gpt-4o-mini"
    mock_script: str = ""
    max_inflight: int = 4
    timeout_ms: int = 120000
    temperature: float = 0.0
    max_retries: int = 3


@dataclass
class JudgeSection:
    compiler_cmd: str = "g++ -O2 -std=c++17"
    compile_timeout_ms: int = 30000
    run_workers: int = 1
    cache_dir: str = ""


@dataclass
class RetrievalSection:
    bm25_k1: float = 1.2
    bm25_b: float = 0.75
    tokenizer: str = "lexical"
    vocab_path: str = ""
    merges_path: str = ""


@dataclass
class AlignSection:
    max_retries: int = 2
    skip_jaccard: float = 0.8


@dataclass
class PlagiarismSection:
    tau_sim: float = 0.8
    tau_diff: float = 0.1


@dataclass
class AgentSection:
    max_snippet_lines: int = 3


@dataclass
class CorpusSection:
    exclusion_window_hours: float = 24.0
    verify_pool: bool = True


@dataclass
class ServiceSection:
    round_cap: int = 10
    data_dir: str = "runs/service"
    bearer_token: str = ""


@dataclass
class AppConfig:
    llm: LlmSection = field(default_factory=LlmSection)
    stubot: LlmSection | None = None
    judge: JudgeSection = field(default_factory=JudgeSection)
    retrieval: RetrievalSection = field(default_factory=RetrievalSection)
    align: AlignSection = field(default_factory=AlignSection)
    plagiarism: PlagiarismSection = field(default_factory=PlagiarismSection)
    agent: AgentSection = field(default_factory=AgentSection)
    corpus: CorpusSection = field(default_factory=CorpusSection)
    service: ServiceSection = field(default_factory=ServiceSection)

    def stubot_section(self) -> LlmSection:
        return self.stubot if self.stubot is not None else self.llm


_SECTIONS = {
    "llm": LlmSection,
    "stubot": LlmSection,
    "judge": JudgeSection,
    "retrieval": RetrievalSection,
    "align": AlignSection,
    "plagiarism": PlagiarismSection,
    "agent": AgentSection,
    "corpus": CorpusSection,
    "service": ServiceSection,
}


def _coerce(current, raw: str):
    if isinstance(current, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    return raw


def _apply_section(section_obj, data: dict, where: str):
    known = {f.name for f in fields(section_obj)}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown key {key!r} in section [{where}]")
        setattr(section_obj, key, value)


def load_config(path: str | Path | None = None, env: dict | None = None) -> AppConfig:
    """Defaults, overlaid with the TOML file (if given), then env overrides."""
    config = AppConfig()
    if path is not None:
        try:
            data = tomllib.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for section_name, section_data in data.items():
            if section_name not in _SECTIONS:
                raise ConfigError(f"unknown config section [{section_name}]")
            if not isinstance(section_data, dict):
                raise ConfigError(f"section [{section_name}] must be a table")
            if section_name == "stubot" and config.stubot is None:
                config.stubot = LlmSection(**vars(config.llm))
            target = getattr(config, section_name)
            _apply_section(target, section_data, section_name)
        # Script paths in a config file are relative to that file.
        base = Path(path).resolve().parent
        for section in (config.llm, config.stubot):
            if section is not None and section.mock_script:
                section.mock_script = str((base / section.mock_script).resolve())

    environ = os.environ if env is None else env
    for name, raw in environ.items():
        if not name.startswith("DEBUGTA_"):
            continue
        rest = name[len("DEBUGTA_"):].lower()
        section_name, _, key = rest.partition("_")
        if section_name not in _SECTIONS or not key:
            continue
        if section_name == "stubot" and config.stubot is None:
            config.stubot = LlmSection(**vars(config.llm))
        target = getattr(config, section_name)
        if not hasattr(target, key):
            raise ConfigError(f"unknown config key {key!r} for env override {name}")
        setattr(target, key, _coerce(getattr(target, key), raw))
    return config


def make_gateway(
    section: LlmSection, ledger: UsageLedger | None = None, deterministic: bool = False
) -> Gateway:
    if section.backend == "mock":
        if not section.mock_script:
            raise ConfigError("mock backend requires llm.mock_script")
        backend = MockBackend.from_file(section.mock_script)
        return Gateway(backend, ledger=ledger, deterministic=True)
    if section.backend == "http":
        backend = HttpBackend(
            base_url=section.base_url,
            model=section.model,
            timeout_ms=section.timeout_ms,
            max_inflight=section.max_inflight,
            max_retries=section.max_retries,
        )
        return Gateway(backend, ledger=ledger, deterministic=deterministic)
    raise ConfigError(f"unknown llm backend {section.backend!r}")


def make_judge(config: AppConfig) -> Judge:
    section = config.judge
    return Judge(
        JudgeConfig(
            compiler_cmd=tuple(section.compiler_cmd.split()),
            compile_timeout_ms=section.compile_timeout_ms,
            run_workers=section.run_workers,
            cache_dir=section.cache_dir or None,
        )
    )


def make_tokenizer(config: AppConfig):
    """Tokenizer instance per [retrieval]; None selects the lexical default."""
    section = config.retrieval
    if section.tokenizer == "lexical":
        return None
    if section.tokenizer == "bpe":
        if not section.vocab_path or not section.merges_path:
            raise ConfigError("bpe tokenizer requires retrieval.vocab_path and retrieval.merges_path")
        from .bpe import BpeTokenizer

        return BpeTokenizer(section.vocab_path, section.merges_path)
    raise ConfigError(f"unknown tokenizer {section.tokenizer!r}")


def make_agent_config(config: AppConfig) -> AgentConfig:
    return AgentConfig(
        max_snippet_lines=config.agent.max_snippet_lines,
        skip_jaccard=config.align.skip_jaccard,
        align_max_retries=config.align.max_retries,
        bm25_k1=config.retrieval.bm25_k1,
        bm25_b=config.retrieval.bm25_b,
        tokenizer=make_tokenizer(config),
    )
