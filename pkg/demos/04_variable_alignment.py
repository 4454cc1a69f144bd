#!/usr/bin/env python3
"""Variable substitution end to end, driven by the scripted mock backend.

The reference solution uses (n, t, sum); the student writes (M, i, s). The
mock replays the pseudocode conversions and the mapping, the rename is
applied as one parallel substitution, and the judge confirms the renamed
reference still passes every test.
"""

import json
from pathlib import Path

from debugta.align import align, identifier_jaccard
from debugta.corpus import load_dataset
from debugta.judge import Judge
from debugta.llmgw import Gateway, MockBackend

ROOT = Path(__file__).resolve().parent.parent

dataset = load_dataset(ROOT / "dataset", verify_pool=False)
problem = dataset.problem("sum")
s_star = next(e for e in problem.pool if e.id == "s1")
student = next(s for s in dataset.submissions["sum"] if s.id == "e1")

print(f"identifier overlap (Jaccard): "
      f"{identifier_jaccard(s_star.code, student.code):.3f} -> alignment runs\n")

script = json.loads((ROOT / "configs" / "mock_script.json").read_text())
gateway = Gateway(MockBackend(script), deterministic=True)
judge = Judge()

aligned = align(gateway, judge, s_star, student.code, problem)

print(f"mapping used: {aligned.mapping_used.pairs}")
print(f"verified: {aligned.verified}   attempts: {aligned.attempts}   "
      f"fallback: {aligned.fallback}\n")
print("== aligned reference ==")
print(aligned.code)
print("judge on aligned reference:",
      judge.run_tests(aligned.code, problem).ac_rate)
