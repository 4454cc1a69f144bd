#!/usr/bin/env python3
"""Compile and score a seeded wrong-answer submission under the sandbox.

The "max of a list" submission initializes its maximum to zero, so exactly
the three all-negative tests fail: 7/10 passed, AC rate 70.00.
"""

from pathlib import Path

from debugta.corpus import load_dataset
from debugta.judge import Judge

ROOT = Path(__file__).resolve().parent.parent

dataset = load_dataset(ROOT / "dataset", verify_pool=False)
problem = dataset.problem("max")
submission = dataset.submissions["max"][0]
judge = Judge()

print("== compile probe ==")
report = judge.compile(submission.code)
print(f"success={report.success}, diagnostics={report.messages!r}")

print("\n== hidden-test run ==")
result = judge.run_tests(submission.code, problem)
for test in result.per_test:
    print(f"  test {test.index:02d}: {test.verdict}  ({test.wall_time_ms} ms)")
print(f"\nAC rate: {result.ac_rate:.2f}   AC@all: {result.ac_all}")

print("\n== resource limits ==")
looping = "int main(){while(1);}"
tle = judge.run_tests(looping, problem)
print(f"infinite loop verdicts: {[t.verdict for t in tle.per_test[:3]]} ...")
