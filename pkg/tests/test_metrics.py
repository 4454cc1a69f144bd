"""Aggregation arithmetic and table rendering."""

from __future__ import annotations

import json
import random

import pytest

from debugta.judge import JudgeResult, PerTestResult
from debugta.metrics import RunReport, aggregate, render_table
from debugta.plagiarism import (
    BRANCH_FINAL_CLOSE_TO_STANDARD,
    BRANCH_INCONCLUSIVE,
    PlagiarismVerdict,
    SimilarityTriple,
)
from debugta.simulator import RoundRecord, SessionTranscript


def _judge(ac_rate, ac_all, original=None):
    return JudgeResult(
        per_test=(PerTestResult(1, "AC" if ac_all else "WA", 0, ""),),
        ac_rate=ac_rate,
        ac_all=ac_all,
        original_ac_rate=original,
        original_ac_all=None if original is None else True,
    )


def _verdict(plagiarized):
    return PlagiarismVerdict(
        plagiarized=plagiarized,
        triple=SimilarityTriple(1.0 if plagiarized else 0.2, 0.1, 0.1),
        branch=BRANCH_FINAL_CLOSE_TO_STANDARD if plagiarized else BRANCH_INCONCLUSIVE,
    )


def _transcript(
    session_id,
    problem_id="p1",
    initial=0.0,
    round_scores=(),
    final=None,
    plagiarized=False,
    max_rounds=3,
    tokens=100,
):
    rounds = []
    code = "before"
    for i, score in enumerate(round_scores, start=1):
        rounds.append(
            RoundRecord(
                round_index=i,
                code_before=code,
                suggestions=None,
                code_after=f"after{i}",
                judge_result=_judge(score, score == 100.0),
                prompt_tokens=tokens // 2,
                completion_tokens=tokens // 2,
            )
        )
        code = f"after{i}"
    if final is None:
        final = round_scores[-1] if round_scores else initial
    final_judge = _judge(final, final == 100.0)
    if plagiarized:
        final_judge = _judge(0.0, False, original=final)
    return SessionTranscript(
        session_id=session_id,
        dataset_id="toy",
        problem_id=problem_id,
        submission_id=session_id,
        strategy_id="debugta",
        max_rounds=max_rounds,
        initial_code="before",
        initial_judge=_judge(initial, initial == 100.0),
        rounds=rounds,
        final_code=code,
        final_judge=final_judge,
        plagiarism=_verdict(plagiarized),
        stopped_early=bool(round_scores) and round_scores[-1] == 100.0 and len(round_scores) < max_rounds,
        prompt_tokens=len(rounds) * tokens // 2,
        completion_tokens=len(rounds) * tokens // 2,
        config={"strategy_id": "debugta"},
        config_fingerprint="fp",
        deterministic_timings=True,
    )


def test_mean_of_two_sessions():
    report = aggregate(
        [
            _transcript("a", round_scores=(100.0,)),
            _transcript("b", problem_id="p2", round_scores=(0.0,)),
        ]
    )
    assert report.ac_rate_mean == 50.0
    assert report.ac_all_rate == 50.0
    assert report.n_sessions == 2 and report.n_problems == 2


def test_plagiarized_session_counts_and_contributes_zero():
    transcripts = [
        _transcript("a", round_scores=(100.0,)),
        _transcript("b", round_scores=(100.0,), plagiarized=True),
        _transcript("c", round_scores=(100.0,)),
        _transcript("d", round_scores=(100.0,)),
    ]
    report = aggregate(transcripts)
    assert report.plag_rate == 25.0
    assert report.ac_rate_mean == 75.0
    assert report.ac_all_rate == 75.0


def test_curve_carries_best_so_far_forward():
    report = aggregate([_transcript("a", initial=20.0, round_scores=(100.0,), max_rounds=3)])
    assert report.per_round_curve == [(1, 100.0), (2, 100.0), (3, 100.0)]


def test_curve_uses_best_so_far_not_latest():
    report = aggregate(
        [_transcript("a", initial=70.0, round_scores=(30.0, 100.0), max_rounds=3)]
    )
    assert report.per_round_curve == [(1, 70.0), (2, 100.0), (3, 100.0)]


def test_aggregate_permutation_invariant():
    rng = random.Random(0)
    transcripts = [
        _transcript(f"s{i}", round_scores=(rng.choice((0.0, 50.0, 100.0)),))
        for i in range(9)
    ]
    base = aggregate(transcripts).to_dict()
    for _ in range(5):
        rng.shuffle(transcripts)
        assert aggregate(transcripts).to_dict() == base


def test_aggregate_rejects_empty_and_mixed():
    with pytest.raises(ValueError):
        aggregate([])
    mixed = [_transcript("a"), _transcript("b")]
    mixed[1].strategy_id = "direct_debug"
    with pytest.raises(ValueError, match="one \\(dataset, strategy\\) pair"):
        aggregate(mixed)


def test_report_roundtrip_exact():
    report = aggregate(
        [
            _transcript("a", round_scores=(100.0,)),
            _transcript("b", round_scores=(62.5, 62.5, 62.5)),
        ]
    )
    assert RunReport.from_dict(json.loads(json.dumps(report.to_dict()))) == report


def test_render_table_single_report():
    report = aggregate([_transcript("a", round_scores=(100.0,))])
    json_text, markdown = render_table([report])
    parsed = json.loads(json_text)
    assert parsed["reports"][0]["strategy_id"] == "debugta"
    row = [l for l in markdown.splitlines() if l.startswith("| debugta")][0]
    assert row.split("|")[2].strip() == "100.00"
    assert row.count("|") == 5  # strategy cell + three numeric cells


def test_render_table_footnotes_fingerprint_mismatch():
    r1 = aggregate([_transcript("a", round_scores=(100.0,))])
    r2 = aggregate([_transcript("b", round_scores=(0.0,))])
    r2.strategy_id = "direct_debug"
    r2.config_fingerprint = "other"
    _, markdown = render_table([r1, r2])
    assert "differing configurations" in markdown


def test_tokens_total_summed():
    report = aggregate(
        [
            _transcript("a", round_scores=(100.0,), tokens=100),
            _transcript("b", round_scores=(0.0, 0.0), tokens=100),
        ]
    )
    assert report.tokens_total == 100 + 200
