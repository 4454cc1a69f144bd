#!/usr/bin/env python3
"""A complete teaching session: teacher, simulated student, judge, verdict.

The off-by-one "sum" submission goes through the full loop: the compile probe
finds no syntax errors, the pool is searched, the reference is renamed into
the student's variables, logic suggestions are produced, the simulated
student applies them, and the revision passes every hidden test in round 1.
"""

import json
from pathlib import Path

from debugta.agent import Teacher
from debugta.corpus import load_dataset
from debugta.judge import Judge
from debugta.llmgw import Gateway, MockBackend, usage_report
from debugta.simulator import SessionConfig, StuBot, run_session

ROOT = Path(__file__).resolve().parent.parent

dataset = load_dataset(ROOT / "dataset", verify_pool=False)
problem = dataset.problem("sum")
student = next(s for s in dataset.submissions["sum"] if s.id == "e1")

script = json.loads((ROOT / "configs" / "mock_script.json").read_text())
gateway = Gateway(MockBackend(script), deterministic=True)
judge = Judge()

transcript = run_session(
    problem,
    student.code,
    SessionConfig(max_rounds=3, strategy_id="debugta"),
    Teacher("debugta", gateway, judge),
    StuBot(gateway),
    judge,
    dataset_id="toy",
    submission_id="e1",
    deterministic=True,
)

print(f"initial score: {transcript.initial_judge.ac_rate:.2f}")
for record in transcript.rounds:
    print(f"\n== round {record.round_index} ==")
    for call in record.suggestions.source_trace:
        print(f"  tool: {call.name}")
    for item in record.suggestions.items:
        print(f"  suggestion: {item}")
    print(f"  judged: {record.judge_result.ac_rate:.2f} "
          f"(ac_all={record.judge_result.ac_all})")

print(f"\nstopped early: {transcript.stopped_early}")
print(f"plagiarism verdict: {transcript.plagiarism.plagiarized} "
      f"(branch {transcript.plagiarism.branch})")
print(f"final score: {transcript.final_judge.ac_rate:.2f}")

summary = usage_report(gateway.ledger)
print(f"tokens: {summary.total_tokens} over {summary.calls} calls")
print("\nfull transcript JSON is byte-stable; first lines:")
print("\n".join(transcript.to_json().splitlines()[:8]))
