"""Sandboxed compile-and-run harness with OI-style scoring.

Programs are compiled once per source hash (binaries are content-addressed in
a shared cache directory) and executed per test under resource limits: wall
clock enforced by a watchdog that kills the process group, CPU and address
space by rlimits, and the filesystem confined to a throwaway working
directory. When the ``unshare`` tool supports user+network namespaces the
program additionally runs with no network; otherwise it runs without that
isolation (probed once at startup).

Verdicts follow online-judge conventions: AC, WA, TLE, MLE, RE, CE. The AC
rate is the percentage of passed tests; AC@all means every test passed.
"""

from __future__ import annotations

import hashlib
import os
import resource
import shutil
import signal
import subprocess
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .corpus import Problem, TestCase

VERDICT_AC = "AC"
VERDICT_WA = "WA"
VERDICT_TLE = "TLE"
VERDICT_MLE = "MLE"
VERDICT_RE = "RE"
VERDICT_CE = "CE"

_OUTPUT_EXCERPT_CHARS = 200
_STDERR_CAP_BYTES = 65536
_OUTPUT_CAP_BYTES = 64 * 1024 * 1024
_WALL_GRACE_SEC = 0.25


class JudgeEnvironmentError(Exception):
    """Sandbox or toolchain failure; never silently scored as zero."""


@dataclass(frozen=True)
class CompileReport:
    success: bool
    messages: str  # error diagnostics; empty iff success
    compiler_exit_code: int
    warning_messages: str = ""  # diagnostics from successful compiles


@dataclass(frozen=True)
class PerTestResult:
    index: int
    verdict: str
    wall_time_ms: int
    output_excerpt: str


@dataclass(frozen=True)
class JudgeResult:
    per_test: tuple[PerTestResult, ...]
    ac_rate: float
    ac_all: bool
    # Audit trail filled only when a plagiarism verdict zeroed the score.
    original_ac_rate: float | None = None
    original_ac_all: bool | None = None

    def to_dict(self) -> dict:
        data = {
            "per_test": [
                {
                    "index": t.index,
                    "verdict": t.verdict,
                    "wall_time_ms": t.wall_time_ms,
                    "output_excerpt": t.output_excerpt,
                }
                for t in self.per_test
            ],
            "ac_rate": self.ac_rate,
            "ac_all": self.ac_all,
        }
        if self.original_ac_rate is not None:
            data["original_ac_rate"] = self.original_ac_rate
            data["original_ac_all"] = self.original_ac_all
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "JudgeResult":
        return cls(
            per_test=tuple(
                PerTestResult(
                    index=t["index"],
                    verdict=t["verdict"],
                    wall_time_ms=t["wall_time_ms"],
                    output_excerpt=t["output_excerpt"],
                )
                for t in data["per_test"]
            ),
            ac_rate=data["ac_rate"],
            ac_all=data["ac_all"],
            original_ac_rate=data.get("original_ac_rate"),
            original_ac_all=data.get("original_ac_all"),
        )

    def with_zeroed_times(self) -> "JudgeResult":
        """Copy with wall times zeroed, for byte-stable transcripts."""
        return JudgeResult(
            per_test=tuple(
                PerTestResult(t.index, t.verdict, 0, t.output_excerpt)
                for t in self.per_test
            ),
            ac_rate=self.ac_rate,
            ac_all=self.ac_all,
            original_ac_rate=self.original_ac_rate,
            original_ac_all=self.original_ac_all,
        )


def result_from_verdicts(verdicts: list[tuple[int, str, int, str]]) -> JudgeResult:
    per_test = tuple(PerTestResult(*v) for v in verdicts)
    n_tests = len(per_test)
    n_ac = sum(1 for t in per_test if t.verdict == VERDICT_AC)
    ac_rate = 100.0 * n_ac / n_tests if n_tests else 0.0
    return JudgeResult(per_test=per_test, ac_rate=ac_rate, ac_all=n_tests > 0 and n_ac == n_tests)


def normalize_output(raw: bytes) -> list[bytes]:
    """Line-wise comparison form: trailing whitespace and trailing blank lines dropped."""
    lines = [line.rstrip(b" \t\r") for line in raw.split(b"\n")]
    while lines and not lines[-1]:
        lines.pop()
    return lines


@dataclass
class JudgeConfig:
    compiler_cmd: tuple[str, ...] = ("g++", "-O2", "-std=c++17")
    compile_timeout_ms: int = 30000
    run_workers: int = 1
    cache_dir: str | None = None
    isolate_network: bool | None = None  # None: probe for unshare support


@dataclass
class _RawRun:
    timed_out: bool
    status: int
    wall_ms: int
    maxrss_kb: int
    stdout: bytes
    stderr: bytes


def _default_cache_dir() -> Path:
    return Path(tempfile.gettempdir()) / f"debugta-bincache-{os.getuid()}"


_unshare_probe_lock = threading.Lock()
_unshare_probe: bool | None = None


def _unshare_available() -> bool:
    global _unshare_probe
    with _unshare_probe_lock:
        if _unshare_probe is None:
            try:
                probe = subprocess.run(
                    ["unshare", "-r", "-n", "true"],
                    stdout=subprocess.DEVNULL,
                    stderr=subprocess.DEVNULL,
                    timeout=10,
                )
                _unshare_probe = probe.returncode == 0
            except (OSError, subprocess.TimeoutExpired):
                _unshare_probe = False
        return _unshare_probe


class Judge:
    """Thread-safe judging facade; binary cache is internally synchronized."""

    def __init__(self, config: JudgeConfig | None = None):
        self.config = config or JudgeConfig()
        self._cache_dir = (
            Path(self.config.cache_dir) if self.config.cache_dir else _default_cache_dir()
        )
        self._cache_dir.mkdir(parents=True, exist_ok=True)
        self._reports: dict[str, CompileReport] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        if self.config.isolate_network is None:
            self._isolate_network = _unshare_available()
        else:
            self._isolate_network = self.config.isolate_network

    # -- compilation ---------------------------------------------------

    def _source_key(self, program: str) -> str:
        h = hashlib.sha256()
        h.update(" ".join(self.config.compiler_cmd).encode("utf-8"))
        h.update(b"\0")
        h.update(program.encode("utf-8"))
        return h.hexdigest()

    def _key_lock(self, key: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(key, threading.Lock())

    def compile(self, program: str) -> CompileReport:
        """Compile ``program``; diagnostics captured, binary cached by source hash."""
        compiler = self.config.compiler_cmd[0]
        if shutil.which(compiler) is None:
            raise JudgeEnvironmentError(f"compiler binary missing: {compiler!r}")
        if not program.strip():
            return CompileReport(
                success=False, messages="empty source: nothing to compile", compiler_exit_code=-1
            )

        key = self._source_key(program)
        with self._key_lock(key):
            cached = self._reports.get(key)
            binary = self._cache_dir / key
            if cached is not None and (not cached.success or binary.exists()):
                return cached
            if binary.exists():
                report = CompileReport(success=True, messages="", compiler_exit_code=0)
                self._reports[key] = report
                return report
            report = self._compile_uncached(program, binary)
            self._reports[key] = report
            return report

    def _compile_uncached(self, program: str, binary: Path) -> CompileReport:
        with tempfile.TemporaryDirectory(prefix="debugta-cc-") as tmp:
            src = Path(tmp) / "main.cpp"
            out = Path(tmp) / "main.bin"
            src.write_text(program, encoding="utf-8")
            # Relative paths and a fixed locale keep diagnostics byte-identical
            # across runs and hosts.
            cmd = list(self.config.compiler_cmd) + ["main.cpp", "-o", "main.bin"]
            env = dict(os.environ, LC_ALL="C", LANG="C")
            try:
                proc = subprocess.run(
                    cmd,
                    capture_output=True,
                    cwd=tmp,
                    env=env,
                    timeout=self.config.compile_timeout_ms / 1000.0,
                )
            except subprocess.TimeoutExpired:
                return CompileReport(
                    success=False, messages="compile timeout", compiler_exit_code=-1
                )
            except OSError as exc:
                raise JudgeEnvironmentError(f"failed to invoke compiler: {exc}") from exc
            diagnostics = proc.stderr.decode("utf-8", errors="replace")
            if proc.returncode != 0:
                return CompileReport(
                    success=False,
                    messages=diagnostics,
                    compiler_exit_code=proc.returncode,
                )
            staged = binary.with_name(binary.name + f".tmp{os.getpid()}")
            shutil.move(str(out), staged)
            staged.chmod(0o755)
            os.replace(staged, binary)
            return CompileReport(
                success=True,
                messages="",
                compiler_exit_code=0,
                warning_messages=diagnostics,
            )

    # -- execution -----------------------------------------------------

    def _run_one(
        self, binary: Path, test: TestCase, time_limit_ms: int, memory_limit_kb: int
    ) -> _RawRun:
        wall_limit = time_limit_ms / 1000.0 + _WALL_GRACE_SEC
        cpu_seconds = max(1, int(time_limit_ms / 1000.0) + 1)

        def set_limits():
            os.setsid()
            resource.setrlimit(resource.RLIMIT_CPU, (cpu_seconds, cpu_seconds + 1))
            mem_bytes = memory_limit_kb * 1024
            resource.setrlimit(resource.RLIMIT_AS, (mem_bytes, mem_bytes))
            resource.setrlimit(resource.RLIMIT_FSIZE, (_OUTPUT_CAP_BYTES, _OUTPUT_CAP_BYTES))
            resource.setrlimit(resource.RLIMIT_CORE, (0, 0))

        argv = [str(binary)]
        if self._isolate_network:
            argv = ["unshare", "-r", "-n"] + argv

        with tempfile.TemporaryDirectory(prefix="debugta-run-") as tmp:
            workdir = Path(tmp)
            in_path = workdir / "stdin.txt"
            out_path = workdir / "stdout.txt"
            err_path = workdir / "stderr.txt"
            in_path.write_bytes(test.input)

            timed_out = threading.Event()
            start = time.monotonic()
            try:
                with open(in_path, "rb") as fin, open(out_path, "wb") as fout, open(
                    err_path, "wb"
                ) as ferr:
                    proc = subprocess.Popen(
                        argv,
                        stdin=fin,
                        stdout=fout,
                        stderr=ferr,
                        cwd=str(workdir),
                        preexec_fn=set_limits,
                    )
            except OSError as exc:
                raise JudgeEnvironmentError(f"sandbox setup failed: {exc}") from exc

            def kill_group():
                timed_out.set()
                try:
                    os.killpg(proc.pid, signal.SIGKILL)
                except (ProcessLookupError, PermissionError):
                    pass

            watchdog = threading.Timer(wall_limit, kill_group)
            watchdog.start()
            try:
                _, status, rusage = os.wait4(proc.pid, 0)
            finally:
                watchdog.cancel()
            proc.returncode = 0  # already reaped via wait4
            wall_ms = int((time.monotonic() - start) * 1000)

            stdout = out_path.read_bytes()
            stderr = err_path.read_bytes()[:_STDERR_CAP_BYTES]
            return _RawRun(
                timed_out=timed_out.is_set(),
                status=status,
                wall_ms=wall_ms,
                maxrss_kb=rusage.ru_maxrss,
                stdout=stdout,
                stderr=stderr,
            )

    def _verdict_for(
        self, raw: _RawRun, test: TestCase, time_limit_ms: int, memory_limit_kb: int
    ) -> tuple[str, str]:
        excerpt = raw.stdout[: 4 * _OUTPUT_EXCERPT_CHARS].decode("utf-8", errors="replace")
        excerpt = excerpt[:_OUTPUT_EXCERPT_CHARS]
        looks_oom = b"bad_alloc" in raw.stderr or raw.maxrss_kb > memory_limit_kb
        if raw.timed_out:
            return VERDICT_TLE, excerpt
        if os.WIFSIGNALED(raw.status):
            sig = os.WTERMSIG(raw.status)
            if sig == signal.SIGXCPU:
                return VERDICT_TLE, excerpt
            if looks_oom:
                return VERDICT_MLE, excerpt
            return VERDICT_RE, excerpt
        if os.WEXITSTATUS(raw.status) != 0:
            return (VERDICT_MLE if looks_oom else VERDICT_RE), excerpt
        if raw.wall_ms > time_limit_ms:
            return VERDICT_TLE, excerpt
        if raw.maxrss_kb > memory_limit_kb:
            return VERDICT_MLE, excerpt
        if normalize_output(raw.stdout) == normalize_output(test.expected_output):
            return VERDICT_AC, excerpt
        return VERDICT_WA, excerpt

    def run_tests(self, program: str, problem: Problem) -> JudgeResult:
        """Judge ``program`` against every hidden test of ``problem``.

        Compile failure yields a CE verdict on every test. Verdicts are a
        pure function of (source, tests, limits) for deterministic programs.
        """
        report = self.compile(program)
        if not report.success:
            return result_from_verdicts(
                [(t.index, VERDICT_CE, 0, "") for t in problem.tests]
            )
        binary = self._cache_dir / self._source_key(program)

        def judge_test(test: TestCase) -> tuple[int, str, int, str]:
            raw = self._run_one(binary, test, problem.time_limit_ms, problem.memory_limit_kb)
            verdict, excerpt = self._verdict_for(
                raw, test, problem.time_limit_ms, problem.memory_limit_kb
            )
            return (test.index, verdict, raw.wall_ms, excerpt)

        if self.config.run_workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.run_workers) as pool:
                verdicts = list(pool.map(judge_test, problem.tests))
        else:
            verdicts = [judge_test(t) for t in problem.tests]
        verdicts.sort(key=lambda v: v[0])
        return result_from_verdicts(verdicts)
