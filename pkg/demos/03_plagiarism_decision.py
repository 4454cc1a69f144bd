#!/usr/bin/env python3
"""The three-way plagiarism decision over (standard, erroneous, final) code.

Three scenarios: a student who fixes their own program, a student who hands
in the reference verbatim, and a submission that was already nearly identical
to the reference (where the check stands down).
"""

from pathlib import Path

from debugta.corpus import load_dataset
from debugta.plagiarism import PlagiarismConfig, plag_check, seq_ratio

ROOT = Path(__file__).resolve().parent.parent

dataset = load_dataset(ROOT / "dataset", verify_pool=False)
problem = dataset.problem("gcd")
standard = next(e for e in problem.pool if e.id == "g1").code
erroneous = dataset.submissions["gcd"][0].code
# a minimal fix in the student's own style: most of their program survives
honest_fix = erroneous.replace(
    "    if (a % b == 0) {\n        cout << b << endl;\n    } else {\n        cout << 1 << endl;\n    }",
    "    cout << __gcd(a, b) << endl;",
).replace("#include <iostream>", "#include <algorithm>\n#include <iostream>")

config = PlagiarismConfig(tau_sim=0.8, tau_diff=0.1)


def show(label, final):
    verdict = plag_check(standard, erroneous, final, config)
    t = verdict.triple
    print(f"{label}:")
    print(f"  s_SF={t.s_sf:.3f}  s_EF={t.s_ef:.3f}  s_SE={t.s_se:.3f}")
    print(f"  -> plagiarized={verdict.plagiarized} (branch: {verdict.branch})\n")


print(f"token ratio between standard and erroneous: "
      f"{seq_ratio(standard.split(), erroneous.split()):.3f}\n")

show("student fixed their own code", honest_fix)
show("student copied the reference verbatim", standard)
show("student resubmitted unchanged", erroneous)
