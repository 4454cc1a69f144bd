"""Agent routing, memory discipline, the leakage guard, and the baselines."""

from __future__ import annotations

import pytest

from debugta.agent import (
    STRATEGIES,
    DebugTeacher,
    Memory,
    MemoryKeyError,
    SuggestionSet,
    longest_shared_run,
    truncate_long_snippets,
    violates_snippet_guard,
)
from debugta.align import AlignedCode, VariableMapping
from debugta.corpus import Problem, TestCase
from debugta.llmgw import UsageLedger

from conftest import make_mock_gateway


def _submission(dataset, problem_id, sub_id):
    return next(s for s in dataset.submissions[problem_id] if s.id == sub_id)


def _teacher(script, judge, ledger=None) -> DebugTeacher:
    return DebugTeacher(make_mock_gateway(script, ledger=ledger), judge)


# -- memory --------------------------------------------------------------------


def test_memory_known_slots_roundtrip():
    memory = Memory()
    memory.write("question", "Q text")
    assert memory.read("question") == "Q text"
    assert memory.has("question")


def test_memory_rejects_unknown_keys():
    memory = Memory()
    with pytest.raises(MemoryKeyError):
        memory.write("scratchpad", "x")
    with pytest.raises(MemoryKeyError):
        memory.read("scratchpad")


def test_memory_absent_reads_are_none_not_empty():
    memory = Memory()
    assert memory.read("error_messages") is None


# -- routing --------------------------------------------------------------------


def test_syntax_bug_routes_through_syntax_branch_only(dataset, judge, demo_script):
    teacher = _teacher(demo_script, judge)
    problem = dataset.problem("sum")
    code = _submission(dataset, "sum", "e2").code
    suggestions = teacher.debug_and_teach(code, problem)
    assert suggestions.kind == "syntax"
    assert suggestions.items
    assert [c.name for c in suggestions.source_trace] == ["compile", "syn_correction"]
    assert teacher.memory.read("suggestions_syntax") is not None
    assert teacher.memory.read("standard_code") is None  # no retrieval happened


def test_logic_bug_routes_through_full_pipeline(dataset, judge, demo_script):
    teacher = _teacher(demo_script, judge)
    problem = dataset.problem("sum")
    code = _submission(dataset, "sum", "e1").code
    suggestions = teacher.debug_and_teach(code, problem)
    assert suggestions.kind == "logic"
    assert [c.name for c in suggestions.source_trace] == [
        "compile",
        "code_search",
        "align",
        "logic_correction",
    ]
    assert teacher.last_s_star is not None and teacher.last_s_star.id == "s1"
    assert teacher.memory.read("aligned_code") is not None


def test_high_jaccard_skips_alignment_calls(dataset, judge, demo_script):
    teacher = _teacher(demo_script, judge)
    problem = dataset.problem("gcd")
    code = _submission(dataset, "gcd", "w1").code
    suggestions = teacher.debug_and_teach(code, problem)
    assert suggestions.kind == "logic"
    names = [c.name for c in suggestions.source_trace]
    assert "align" not in names
    assert names == ["compile", "code_search", "logic_correction"]
    templates_used = {e.template_id for e in teacher.gateway.ledger.entries()}
    assert "to_pseudocode" not in templates_used and "var_mapping" not in templates_used


def test_routing_is_exclusive(dataset, judge, demo_script):
    for sub_id, expected_kind in (("e2", "syntax"), ("e1", "logic")):
        teacher = _teacher(demo_script, judge)
        suggestions = teacher.debug_and_teach(
            _submission(dataset, "sum", sub_id).code, dataset.problem("sum")
        )
        names = {c.name for c in suggestions.source_trace}
        assert ("syn_correction" in names) != ("code_search" in names)
        assert suggestions.kind == expected_kind


def test_empty_pool_degrades_with_warning(judge):
    problem = Problem(
        id="bare",
        title="bare",
        statement="print 7",
        tests=(TestCase(1, b"", b"7\n"),),
        pool=(),
    )
    script = [
        {
            "template_id": "empty_pool_teach",
            "response": '{"suggestions": ["Print 7 instead of 6."]}',
        }
    ]
    teacher = _teacher(script, judge)
    code = "#include <cstdio>\nint main(){printf(\"6\\n\");return 0;}"
    suggestions = teacher.debug_and_teach(code, problem)
    assert suggestions.items == ["Print 7 instead of 6."]
    assert any("pool empty" in w for w in teacher.last_warnings)
    assert [c.name for c in suggestions.source_trace] == ["compile", "empty_pool_teach"]


def test_memory_reads_are_subset_of_template_slots(dataset, judge, demo_script):
    # the logic prompt must carry only aligned code + student code + question
    ledger = UsageLedger()
    teacher = _teacher(demo_script, judge, ledger=ledger)
    problem = dataset.problem("sum")
    teacher.debug_and_teach(_submission(dataset, "sum", "e1").code, problem)
    logic_calls = [e for e in ledger.entries() if e.template_id == "logic_correction"]
    assert logic_calls
    prompt = logic_calls[0].prompt
    assert problem.statement in prompt
    assert teacher.memory.read("error_messages") == ""  # clean compile stored


def test_raw_reference_and_student_code_never_share_a_prompt_unaligned(
    dataset, judge, demo_script
):
    ledger = UsageLedger()
    teacher = _teacher(demo_script, judge, ledger=ledger)
    problem = dataset.problem("sum")
    erroneous = _submission(dataset, "sum", "e1").code
    teacher.debug_and_teach(erroneous, problem)
    s_star = teacher.last_s_star.code
    aligned = teacher.memory.read("aligned_code")
    for entry in ledger.entries():
        if s_star in entry.prompt and erroneous in entry.prompt:
            # only the logic prompt may combine them, and only via S-tilde
            assert entry.template_id == "logic_correction"
            assert aligned in entry.prompt


# -- spec-facing single ops ------------------------------------------------------


def test_syn_correction_requires_messages(dataset, judge, demo_script):
    teacher = _teacher(demo_script, judge)
    with pytest.raises(ValueError, match="non-empty error messages"):
        teacher.syn_correction("int main(){}", "")


def test_syn_correction_stores_items_verbatim(dataset, judge):
    script = [
        {
            "template_id": "syn_correction",
            "response": '{"suggestions": ["Add a semicolon on line 7."]}',
        }
    ]
    teacher = _teacher(script, judge)
    result = teacher.syn_correction("bad code", "main.cpp:7: error: expected ';'")
    assert result.items == ["Add a semicolon on line 7."]
    assert teacher.memory.read("suggestions_syntax") == "Add a semicolon on line 7."


def test_logic_correction_requires_verified_reference(dataset, judge, demo_script):
    teacher = _teacher(demo_script, judge)
    unverified = AlignedCode(
        code="int main(){}", mapping_used=VariableMapping({}), verified=False, attempts=1
    )
    with pytest.raises(ValueError, match="verified"):
        teacher.logic_correction(unverified, "int main(){}", "Q")


# -- leakage guard ----------------------------------------------------------------


REFERENCE_BLOCK = """int main() {
    int acc = 0;
    for (int i = 0; i < n; i++) {
        acc += i;
    }
    return acc;
}"""


def test_longest_shared_run_counts_normalized_lines():
    item = "Change this:\n    int acc = 0;\n  for (int i = 0; i < n; i++) {\nacc += i;\n"
    assert longest_shared_run(item, REFERENCE_BLOCK) == 3


def test_violates_guard_threshold():
    short_quote = "see:\nint acc = 0;\nfor (int i = 0; i < n; i++) {\nacc += i;"
    long_quote = short_quote + "\n}"
    assert not violates_snippet_guard([short_quote], [REFERENCE_BLOCK], 3)
    assert violates_snippet_guard([long_quote], [REFERENCE_BLOCK], 3)


def test_truncate_long_snippets_cuts_to_limit():
    leaked = "Do this:\n" + "\n".join(REFERENCE_BLOCK.splitlines())
    cut = truncate_long_snippets(leaked, [REFERENCE_BLOCK], 3)
    assert not violates_snippet_guard([cut], [REFERENCE_BLOCK], 3)
    assert "[reference code elided]" in cut
    assert cut.startswith("Do this:")


def test_guard_triggers_regeneration_then_truncation(dataset, judge):
    problem = dataset.problem("gcd")
    erroneous = _submission(dataset, "gcd", "w1").code
    g1 = next(e for e in problem.pool if e.id == "g1")
    leaky = {"suggestions": ["Copy this:\n" + g1.code]}
    import json

    script = [
        {"template_id": "logic_correction", "response": json.dumps(leaky)},
    ]
    teacher = _teacher(script, judge)
    suggestions = teacher.debug_and_teach(erroneous, problem)
    # both attempts leaked, so the offending block was truncated mechanically
    assert not violates_snippet_guard(suggestions.items, [g1.code], 3)
    assert any("[reference code elided]" in item for item in suggestions.items)
    logic_calls = [
        c for c in suggestions.source_trace if c.name.startswith("logic_correction")
    ]
    assert [c.name for c in logic_calls] == ["logic_correction", "logic_correction_retry"]


# -- baselines ---------------------------------------------------------------------


def test_direct_debug_returns_full_program(dataset, judge):
    fixed = "#include <iostream>\nint main(){return 0;}\n"
    script = [
        {"template_id": "baseline_direct_debug", "response": f"```cpp\n{fixed}```"}
    ]
    teacher = _teacher(script, judge)
    result = teacher.run_baseline(
        STRATEGIES["direct_debug"], "int broken", dataset.problem("sum")
    )
    assert isinstance(result, str)
    assert result == fixed


def test_debug_with_s_prompt_contains_reference_verbatim(dataset, judge):
    ledger = UsageLedger()
    script = [
        {"template_id": "baseline_debug_with_s", "response": "```cpp\nint main(){}\n```"}
    ]
    teacher = _teacher(script, judge, ledger=ledger)
    problem = dataset.problem("sum")
    erroneous = _submission(dataset, "sum", "e1").code
    teacher.run_baseline(STRATEGIES["debug_with_s"], erroneous, problem)
    assert len(ledger.entries()) == 1  # a single message carries everything
    prompt = ledger.entries()[0].prompt
    assert teacher.last_s_star.code in prompt
    assert erroneous in prompt


def test_selfdebug_explain_chains_two_calls(dataset, judge):
    ledger = UsageLedger()
    script = [
        {
            "template_id": "baseline_selfdebug_explain",
            "phase": "analyze",
            "response": "line 1 reads n; line 2 loops wrongly.",
        },
        {
            "template_id": "baseline_selfdebug_explain",
            "phase": "fix",
            "response": "```cpp\nint main(){return 0;}\n```",
        },
    ]
    teacher = _teacher(script, judge, ledger=ledger)
    result = teacher.run_baseline(
        STRATEGIES["selfdebug_explain"], "int broken;", dataset.problem("sum")
    )
    assert isinstance(result, str)
    entries = ledger.entries()
    assert [e.phase for e in entries] == ["analyze", "fix"]
    assert "line 2 loops wrongly" in entries[1].prompt  # analysis fed forward


def test_selfdebug_trace_chains_two_calls(dataset, judge):
    ledger = UsageLedger()
    script = [
        {
            "template_id": "baseline_selfdebug_trace",
            "phase": "analyze",
            "response": "i=0 ... i=n-1, loop exits early.",
        },
        {
            "template_id": "baseline_selfdebug_trace",
            "phase": "fix",
            "response": "```cpp\nint main(){return 0;}\n```",
        },
    ]
    teacher = _teacher(script, judge, ledger=ledger)
    teacher.run_baseline(STRATEGIES["selfdebug_trace"], "int broken;", dataset.problem("sum"))
    assert len(ledger.entries()) == 2


def test_direct_teach_returns_suggestions(dataset, judge):
    script = [
        {
            "template_id": "baseline_direct_teach",
            "response": '{"suggestions": ["Fix the loop bound."]}',
        }
    ]
    teacher = _teacher(script, judge)
    problem = dataset.problem("sum")
    result = teacher.run_baseline(
        STRATEGIES["direct_teach"], _submission(dataset, "sum", "e1").code, problem
    )
    assert isinstance(result, SuggestionSet)
    assert result.kind == "combined"
    assert teacher.last_s_star is not None


def test_strategy_output_modes_match_contract():
    assert STRATEGIES["direct_debug"].output_mode == "code"
    assert STRATEGIES["debug_with_s"].output_mode == "code"
    assert STRATEGIES["selfdebug_explain"].output_mode == "code"
    assert STRATEGIES["selfdebug_trace"].output_mode == "code"
    assert STRATEGIES["direct_teach"].output_mode == "suggestions"
    assert STRATEGIES["debugta"].output_mode == "suggestions"
