"""Problem corpus: load and validate problem sets from a directory tree.

On-disk layout, one directory per problem:

    dataset/problems/<id>/problem.json     id, title, statement, limits
    dataset/problems/<id>/tests/NN.in      zero-padded two-digit index
    dataset/problems/<id>/tests/NN.out
    dataset/problems/<id>/pool/*.cpp       verified-correct solutions
    dataset/problems/<id>/submissions/*.cpp
    dataset/problems/<id>/pool/meta.json        optional submitter/timestamps
    dataset/problems/<id>/submissions/meta.json optional submitter/timestamps

Text files are UTF-8; test inputs/outputs are raw bytes. Loaded datasets are
immutable in practice: nothing in this package mutates them after
construction, so they are safe to share across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

DEFAULT_TIME_LIMIT_MS = 2000
DEFAULT_MEMORY_LIMIT_KB = 262144
DEFAULT_EXCLUSION_WINDOW_HOURS = 24.0

_TEST_FILE_RE = re.compile(r"^(\d{2})\.in$")


class DatasetError(Exception):
    """Structured load error naming the offending path."""

    def __init__(self, message: str, path: Path | str | None = None):
        self.path = str(path) if path is not None else None
        super().__init__(f"{message}" + (f" ({self.path})" if self.path else ""))


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # keep pytest from collecting this as a test class

    index: int
    input: bytes
    expected_output: bytes


@dataclass(frozen=True)
class PoolEntry:
    id: str
    code: str
    submitted_at: datetime | None = None
    provenance: str = "student"  # student | official | community
    submitter_id: str | None = None


@dataclass(frozen=True)
class Submission:
    id: str
    problem_id: str
    code: str
    submitted_at: datetime | None = None
    submitter_id: str | None = None


@dataclass(frozen=True)
class Problem:
    id: str
    title: str
    statement: str
    tests: tuple[TestCase, ...]
    pool: tuple[PoolEntry, ...] = ()
    time_limit_ms: int = DEFAULT_TIME_LIMIT_MS
    memory_limit_kb: int = DEFAULT_MEMORY_LIMIT_KB


@dataclass
class Dataset:
    root: str
    problems: list[Problem]
    submissions: dict[str, list[Submission]]  # problem id -> submissions
    warnings: list[str] = field(default_factory=list)
    pool_verified: bool = False

    def problem(self, problem_id: str) -> Problem:
        for p in self.problems:
            if p.id == problem_id:
                return p
        raise KeyError(problem_id)


@dataclass(frozen=True)
class SubmissionWindow:
    """Exclusion window: a submitter plus the time frame around their submission."""

    submitter_id: str
    start: datetime | None = None
    end: datetime | None = None

    @classmethod
    def around(
        cls, submission: Submission, hours: float = DEFAULT_EXCLUSION_WINDOW_HOURS
    ) -> "SubmissionWindow":
        if submission.submitter_id is None or submission.submitted_at is None:
            return cls(submitter_id=submission.submitter_id or "")
        delta = timedelta(hours=hours)
        return cls(
            submitter_id=submission.submitter_id,
            start=submission.submitted_at - delta,
            end=submission.submitted_at + delta,
        )


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp; a trailing Z is accepted."""
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


def first_submission(series: list[Submission]) -> Submission:
    """Earliest submission of a series; entries without timestamps sort last."""
    if not series:
        raise ValueError("empty submission series")
    far_future = datetime.max.replace(tzinfo=timezone.utc)
    return min(series, key=lambda s: (s.submitted_at or far_future, s.id))


def filter_pool(problem: Problem, exclusion: SubmissionWindow) -> list[PoolEntry]:
    """Pool minus entries by the excluded submitter inside the window.

    Entries without submitter or timestamp metadata are never excluded.
    Order is preserved; the result is always a subset of the input pool.
    """
    kept: list[PoolEntry] = []
    for entry in problem.pool:
        if (
            entry.submitter_id is not None
            and entry.submitter_id == exclusion.submitter_id
            and entry.submitted_at is not None
            and (exclusion.start is None or entry.submitted_at >= exclusion.start)
            and (exclusion.end is None or entry.submitted_at <= exclusion.end)
        ):
            continue
        kept.append(entry)
    return kept


def _load_meta(meta_path: Path, warnings: list[str]) -> dict[str, dict]:
    if not meta_path.exists():
        return {}
    try:
        data = json.loads(meta_path.read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError("meta.json must be an object keyed by filename")
        return data
    except (ValueError, OSError) as exc:
        warnings.append(f"malformed meta file {meta_path}: {exc}")
        return {}


def _meta_fields(
    meta: dict[str, dict], filename: str, warnings: list[str], where: Path
) -> tuple[datetime | None, str | None, str]:
    entry = meta.get(filename, {})
    submitted_at = None
    raw_ts = entry.get("submitted_at")
    if raw_ts:
        try:
            submitted_at = parse_timestamp(raw_ts)
        except ValueError:
            warnings.append(f"bad timestamp for {filename} in {where}")
    return submitted_at, entry.get("submitter_id"), entry.get("provenance", "student")


def _load_tests(tests_dir: Path, problem_dir: Path) -> list[TestCase]:
    if not tests_dir.is_dir():
        raise DatasetError("no test cases", problem_dir)
    cases: list[TestCase] = []
    for in_path in sorted(tests_dir.iterdir()):
        m = _TEST_FILE_RE.match(in_path.name)
        if not m:
            continue
        out_path = tests_dir / f"{m.group(1)}.out"
        if not out_path.exists():
            raise DatasetError(f"test {in_path.name} has no matching .out", out_path)
        cases.append(
            TestCase(
                index=int(m.group(1)),
                input=in_path.read_bytes(),
                expected_output=out_path.read_bytes(),
            )
        )
    if not cases:
        raise DatasetError("no test cases", tests_dir)
    for want, case in enumerate(cases, start=1):
        if case.index != want:
            raise DatasetError(
                f"test indices not contiguous from 1 (found {case.index:02d}, expected {want:02d})",
                tests_dir,
            )
    return cases


def _load_problem(problem_dir: Path, warnings: list[str]) -> tuple[Problem, list[Submission]]:
    manifest = problem_dir / "problem.json"
    if not manifest.exists():
        raise DatasetError("missing manifest problem.json", problem_dir)
    try:
        meta = json.loads(manifest.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise DatasetError(f"unreadable manifest: {exc}", manifest)
    problem_id = meta.get("id") or problem_dir.name
    if problem_id != problem_dir.name:
        warnings.append(
            f"manifest id {problem_id!r} differs from directory {problem_dir.name!r}"
        )

    tests = _load_tests(problem_dir / "tests", problem_dir)

    pool_dir = problem_dir / "pool"
    pool_meta = _load_meta(pool_dir / "meta.json", warnings)
    pool: list[PoolEntry] = []
    if pool_dir.is_dir():
        for src in sorted(pool_dir.glob("*.cpp")):
            code = src.read_text(encoding="utf-8")
            if not code.strip():
                warnings.append(f"empty pool entry skipped: {src}")
                continue
            submitted_at, submitter, provenance = _meta_fields(
                pool_meta, src.name, warnings, pool_dir
            )
            pool.append(
                PoolEntry(
                    id=src.stem,
                    code=code,
                    submitted_at=submitted_at,
                    provenance=provenance,
                    submitter_id=submitter,
                )
            )

    sub_dir = problem_dir / "submissions"
    sub_meta = _load_meta(sub_dir / "meta.json", warnings)
    submissions: list[Submission] = []
    if sub_dir.is_dir():
        for src in sorted(sub_dir.glob("*.cpp")):
            code = src.read_text(encoding="utf-8")
            if not code.strip():
                warnings.append(f"empty submission skipped: {src}")
                continue
            submitted_at, submitter, _ = _meta_fields(
                sub_meta, src.name, warnings, sub_dir
            )
            submissions.append(
                Submission(
                    id=src.stem,
                    problem_id=problem_id,
                    code=code,
                    submitted_at=submitted_at,
                    submitter_id=submitter,
                )
            )

    problem = Problem(
        id=problem_id,
        title=meta.get("title", problem_id),
        statement=meta.get("statement", ""),
        tests=tuple(tests),
        pool=tuple(pool),
        time_limit_ms=int(meta.get("time_limit_ms", DEFAULT_TIME_LIMIT_MS)),
        memory_limit_kb=int(meta.get("memory_limit_kb", DEFAULT_MEMORY_LIMIT_KB)),
    )
    return problem, submissions


def load_dataset(root_path: str | Path, verify_pool: bool = True, judge=None) -> Dataset:
    """Load every problem under ``root_path``; deterministic for fixed bytes.

    Pool entries and submissions are ordered lexicographically by filename.
    With ``verify_pool`` (the default) every pool entry is compiled and run
    against the problem's tests; entries that do not pass everything raise a
    DatasetError, since downstream alignment assumes pool code is correct.
    """
    root = Path(root_path)
    problems_dir = root / "problems"
    if not problems_dir.is_dir():
        raise DatasetError("missing problems/ directory", root)

    warnings: list[str] = []
    problems: list[Problem] = []
    submissions: dict[str, list[Submission]] = {}
    seen: set[str] = set()
    for problem_dir in sorted(p for p in problems_dir.iterdir() if p.is_dir()):
        problem, subs = _load_problem(problem_dir, warnings)
        if problem.id in seen:
            raise DatasetError(f"duplicate problem id {problem.id!r}", problem_dir)
        seen.add(problem.id)
        problems.append(problem)
        submissions[problem.id] = subs

    dataset = Dataset(
        root=str(root), problems=problems, submissions=submissions, warnings=warnings
    )
    if verify_pool:
        verify_dataset_pools(dataset, judge=judge)
    return dataset


def verify_dataset_pools(dataset: Dataset, judge=None) -> None:
    """Compile and run every pool entry; raise on any that is not fully AC."""
    if judge is None:
        from .judge import Judge  # local import: judge depends on this module

        judge = Judge()
    for problem in dataset.problems:
        for entry in problem.pool:
            result = judge.run_tests(entry.code, problem)
            if not result.ac_all:
                raise DatasetError(
                    f"pool entry {entry.id!r} of problem {problem.id!r} failed "
                    f"ingest verification (ac_rate={result.ac_rate:.2f})",
                    Path(dataset.root) / "problems" / problem.id / "pool",
                )
    dataset.pool_verified = True
