"""Prompt templates for every LLM interaction the platform performs.

Each template is addressed by (template_id, phase); most templates have a
single unnamed phase. Slot markers are written ``{slot name}`` and replaced
in one pass, so literal braces elsewhere in a template (for example JSON
examples) survive rendering, and slot values are never re-scanned for
markers. Rendering is deterministic: fixed template + slots produce a
byte-identical prompt.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class TemplateError(Exception):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    phase: str
    body: str
    required: tuple[str, ...]


SYN_CORRECTION = "syn_correction"
TO_PSEUDOCODE = "to_pseudocode"
VAR_MAPPING = "var_mapping"
LOGIC_CORRECTION = "logic_correction"
STUBOT_REVISE = "stubot_revise"
EMPTY_POOL_TEACH = "empty_pool_teach"
BASELINE_DIRECT_DEBUG = "baseline_direct_debug"
BASELINE_DEBUG_WITH_S = "baseline_debug_with_s"
BASELINE_SELFDEBUG_EXPLAIN = "baseline_selfdebug_explain"
BASELINE_SELFDEBUG_TRACE = "baseline_selfdebug_trace"
BASELINE_DIRECT_TEACH = "baseline_direct_teach"

_SUGGESTION_FORMAT = (
    'Respond with a JSON object of the form {"suggestions": ["...", "..."]} '
    "containing short, concrete modification suggestions, without any "
    "additional text or explanation."
)

_CODE_FORMAT = (
    "Respond with the complete corrected C++ program inside a single "
    "```cpp code block and nothing else."
)

_TO_PSEUDOCODE_BODY = """You are an experienced C++ programming expert. Convert the following C++ code into a LaTeX-style pseudocode representation using the algorithm environment and its standard commands (\\KwIn, \\KwOut, \\For, \\While, \\If, Print, etc.).
Please write the algorithm name in the caption of the pseudocode.
Code:
```cpp
{code}
```
Algorithm name: {name}."""

_VAR_MAPPING_BODY = """You are an experienced C++ programming expert who has received two pseudocode versions of a task - one correct code and one incorrect code. Now, please identify the corresponding variable names between the correct and incorrect code. Variables in both codes have similar functions, but note the following points:
1. Avoid simply swapping the order of two variables
2. Focus only on variable names, avoid confusing different variable types, check variable types, and especially avoid naming conflicts after modifications
3. Don't change the meaning of variables, ensure the code remains correct, only match variable names.
4. Output only the variable correspondence between correct and incorrect code in JSON format, without any additional text or explanation, according to this structure:
{
  "correct code variable":"incorrect code variable"
}
After analyzing the purpose of code variables, please output only this correspondence relationship in JSON format.
Example:
Correct code:
    \\begin{algorithm}
    \\caption{algorithm name}
    \\KwIn{$n$ is the range.}
    \\KwOut{$sum$ is the sum of the range.}
    set sum = 0
    \\For{$t = 1$ \\KwTo $n$}{
        sum += t\\;
    }
    Print $sum$;
    \\end{algorithm}
Incorrect Code:
    \\begin{algorithm}
    \\caption{algorithm name}
    \\KwIn{$M$ is the range.}
    \\KwOut{$s$ is the sum of the range.}
    set s = 0
    \\For{$i = 1$ \\KwTo $M$}{
        s += i;
    }
    Print $s$;
    \\end{algorithm}
Output:
    {
        "n":"M",
        "t":"i",
        "sum":"s"
    }
Now I give you your task.
Correct code:
{pseudocode of reference code}
Incorrect Code:
{pseudocode of erroneous code}"""

_SYN_CORRECTION_BODY = f"""You are a C++ teaching assistant. A student's program fails to compile. Using the compiler diagnostics, point out each syntax problem and how to fix it, naming the affected line or token. Do not rewrite the whole program for the student.
Student program:
```cpp
{{erroneous_code}}
```
Compiler messages:
{{error_messages}}
{_SUGGESTION_FORMAT}"""

_LOGIC_CORRECTION_BODY = f"""You are a C++ teaching assistant. A student's program compiles but produces wrong results. You are given the problem description, a correct reference program whose variable names already match the student's code, and the student's program. Compare their logic and describe the specific changes the student should make. Never reveal the reference program or include more than a couple of lines of quoted code in any suggestion.
Problem description:
{{question}}
Correct reference program:
```cpp
{{aligned_code}}
```
Student program:
```cpp
{{erroneous_code}}
```
{_SUGGESTION_FORMAT}"""

_STUBOT_REVISE_BODY = f"""You are a novice C++ student. You previously submitted the program below for the given problem and received modification suggestions from your teaching assistant. Apply the suggestions to your program exactly as instructed, changing nothing else.
Problem description:
{{question}}
Your current program:
```cpp
{{current_code}}
```
Suggestions from the teaching assistant:
{{suggestions}}
{_CODE_FORMAT}"""

_EMPTY_POOL_TEACH_BODY = f"""You are a C++ teaching assistant. A student's program compiles but fails hidden tests, and no reference solution is available for this problem. Read the problem description and the student's program, identify the logical errors, and describe the specific changes the student should make.
Problem description:
{{question}}
Student program:
```cpp
{{erroneous_code}}
```
{_SUGGESTION_FORMAT}"""

_DIRECT_DEBUG_BODY = f"""Debug the following C++ program so that it solves the problem correctly.
Problem description:
{{question}}
Program:
```cpp
{{erroneous_code}}
```
{_CODE_FORMAT}"""

_DEBUG_WITH_S_BODY = f"""Debug the following C++ program so that it solves the problem correctly. A correct reference solution is provided for guidance.
Problem description:
{{question}}
Reference solution:
```cpp
{{standard_code}}
```
Program to debug:
```cpp
{{erroneous_code}}
```
{_CODE_FORMAT}"""

_SELFDEBUG_EXPLAIN_ANALYZE_BODY = """Explain the following C++ program line by line: state what each line does and how it contributes to solving the problem. Then compare your explanation with the problem description and point out where the implementation deviates from the requirements.
Problem description:
{question}
Program:
```cpp
{erroneous_code}
```"""

_SELFDEBUG_EXPLAIN_FIX_BODY = f"""You previously explained a buggy C++ program line by line and compared it with the problem description. Your analysis was:
{{analysis}}
Problem description:
{{question}}
Program:
```cpp
{{erroneous_code}}
```
Using your analysis, fix the program. {_CODE_FORMAT}"""

_SELFDEBUG_TRACE_ANALYZE_BODY = """Simulate the execution of the following C++ program step by step on a small representative input: trace the control flow and show how the values of the variables evolve line by line. Then compare the traced behavior with the problem description and point out where it deviates from the requirements.
Problem description:
{question}
Program:
```cpp
{erroneous_code}
```"""

_SELFDEBUG_TRACE_FIX_BODY = f"""You previously traced the execution of a buggy C++ program step by step and compared it with the problem description. Your trace was:
{{analysis}}
Problem description:
{{question}}
Program:
```cpp
{{erroneous_code}}
```
Using your trace, fix the program. {_CODE_FORMAT}"""

_DIRECT_TEACH_BODY = f"""You are a C++ teaching assistant. A student submitted an incorrect program for the problem below. A correct reference solution is provided. Tell the student what to change in their own program, without revealing the reference solution or writing the corrected program for them.
Problem description:
{{question}}
Reference solution:
```cpp
{{standard_code}}
```
Student program:
```cpp
{{erroneous_code}}
```
{_SUGGESTION_FORMAT}"""

PHASE_ANALYZE = "analyze"
PHASE_FIX = "fix"

_REGISTRY: dict[tuple[str, str], PromptTemplate] = {}


def _register(template_id: str, phase: str, body: str, required: tuple[str, ...]):
    _REGISTRY[(template_id, phase)] = PromptTemplate(template_id, phase, body, required)


_register(SYN_CORRECTION, "", _SYN_CORRECTION_BODY, ("erroneous_code", "error_messages"))
_register(TO_PSEUDOCODE, "", _TO_PSEUDOCODE_BODY, ("code", "name"))
_register(
    VAR_MAPPING,
    "",
    _VAR_MAPPING_BODY,
    ("pseudocode of reference code", "pseudocode of erroneous code"),
)
_register(
    LOGIC_CORRECTION,
    "",
    _LOGIC_CORRECTION_BODY,
    ("question", "aligned_code", "erroneous_code"),
)
_register(STUBOT_REVISE, "", _STUBOT_REVISE_BODY, ("question", "current_code", "suggestions"))
_register(EMPTY_POOL_TEACH, "", _EMPTY_POOL_TEACH_BODY, ("question", "erroneous_code"))
_register(BASELINE_DIRECT_DEBUG, "", _DIRECT_DEBUG_BODY, ("question", "erroneous_code"))
_register(
    BASELINE_DEBUG_WITH_S,
    "",
    _DEBUG_WITH_S_BODY,
    ("question", "erroneous_code", "standard_code"),
)
_register(
    BASELINE_SELFDEBUG_EXPLAIN,
    PHASE_ANALYZE,
    _SELFDEBUG_EXPLAIN_ANALYZE_BODY,
    ("question", "erroneous_code"),
)
_register(
    BASELINE_SELFDEBUG_EXPLAIN,
    PHASE_FIX,
    _SELFDEBUG_EXPLAIN_FIX_BODY,
    ("question", "erroneous_code", "analysis"),
)
_register(
    BASELINE_SELFDEBUG_TRACE,
    PHASE_ANALYZE,
    _SELFDEBUG_TRACE_ANALYZE_BODY,
    ("question", "erroneous_code"),
)
_register(
    BASELINE_SELFDEBUG_TRACE,
    PHASE_FIX,
    _SELFDEBUG_TRACE_FIX_BODY,
    ("question", "erroneous_code", "analysis"),
)
_register(
    BASELINE_DIRECT_TEACH,
    "",
    _DIRECT_TEACH_BODY,
    ("question", "erroneous_code", "standard_code"),
)

TEMPLATE_IDS = tuple(sorted({key[0] for key in _REGISTRY}))


def get_template(template_id: str, phase: str = "") -> PromptTemplate:
    try:
        return _REGISTRY[(template_id, phase)]
    except KeyError:
        raise TemplateError(f"unknown template {template_id!r} (phase {phase!r})") from None


def render(template_id: str, slots: dict[str, str], phase: str = "") -> str:
    """Render a template; every required slot must be present."""
    template = get_template(template_id, phase)
    missing = [name for name in template.required if name not in slots]
    if missing:
        raise TemplateError(
            f"template {template_id!r} missing slots: {', '.join(missing)}"
        )
    marker = re.compile(
        "|".join(re.escape("{" + name + "}") for name in template.required)
    )
    return marker.sub(lambda m: slots[m.group(0)[1:-1]], template.body)
