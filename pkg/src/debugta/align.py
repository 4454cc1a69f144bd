"""Variable substitution: rename a reference solution into the student's names.

Both programs are first converted to LaTeX-style pseudocode, an LLM proposes
a correct-name to student-name mapping, the mapping is validated (injective,
capture-free, keys present in the reference), and the rename is applied as
one parallel whole-token substitution. The renamed program must still pass
every test; otherwise the mapping is re-requested a bounded number of times,
and on exhaustion the unmodified reference is returned, which is correct by
construction because pool entries are ingest-verified.

Renaming is name-level, not scope-level: every occurrence of an identifier
is renamed globally. The capture-freedom check plus judge verification guard
against the breakage this could cause.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import templates
from .corpus import PoolEntry, Problem
from .lexing import CPP_KEYWORDS, identifier_set, rename_identifiers
from .llmgw import ChatRequest, Gateway, MalformedModelOutput

DEFAULT_MAX_RETRIES = 2  # mapping re-requests beyond the first attempt
DEFAULT_SKIP_JACCARD = 0.8

# Renaming these can only break the program, never align style.
_NEVER_RENAME = frozenset({"main"}) | CPP_KEYWORDS


class AlignmentFailed(Exception):
    pass


@dataclass(frozen=True)
class VariableMapping:
    pairs: dict[str, str]

    def __bool__(self) -> bool:
        return bool(self.pairs)


@dataclass
class AlignedCode:
    code: str
    mapping_used: VariableMapping
    verified: bool
    attempts: int
    fallback: bool = False
    warnings: list[str] = field(default_factory=list)


def identifier_jaccard(code_a: str, code_b: str) -> float:
    """Jaccard overlap of the two programs' identifier sets (keywords excluded)."""
    ids_a, ids_b = identifier_set(code_a), identifier_set(code_b)
    union = ids_a | ids_b
    if not union:
        return 1.0
    return len(ids_a & ids_b) / len(union)


def should_skip_alignment(
    standard_code: str, erroneous_code: str, threshold: float = DEFAULT_SKIP_JACCARD
) -> bool:
    """Variable names already agree closely enough that renaming adds nothing."""
    return identifier_jaccard(standard_code, erroneous_code) >= threshold


def to_pseudocode(gateway: Gateway, code: str, name: str = "Solution") -> str:
    """LaTeX-style pseudocode for ``code``; comparison substrate only, never executed."""
    if not code.strip():
        raise ValueError("nothing to convert: empty code")
    response = gateway.complete(
        ChatRequest(templates.TO_PSEUDOCODE, slots={"code": code, "name": name})
    )
    if not response.text.strip():
        raise MalformedModelOutput("empty pseudocode reply")
    return response.text


def generate_mapping(gateway: Gateway, pseudo_standard: str, pseudo_erroneous: str) -> dict[str, str]:
    """Raw identifier mapping proposed by the model over the two pseudocodes."""
    if not pseudo_standard.strip() or not pseudo_erroneous.strip():
        raise ValueError("both pseudocode texts must be non-empty")

    def check(data: dict) -> None:
        if not all(isinstance(k, str) and isinstance(v, str) for k, v in data.items()):
            raise MalformedModelOutput("mapping must be a flat string-to-string object")

    try:
        return gateway.complete_json(
            ChatRequest(
                templates.VAR_MAPPING,
                slots={
                    "pseudocode of reference code": pseudo_standard,
                    "pseudocode of erroneous code": pseudo_erroneous,
                },
            ),
            validate=check,
        )
    except MalformedModelOutput as exc:
        raise AlignmentFailed(f"mapping generation failed: {exc}") from exc


def validate_mapping(raw: dict[str, str], standard_code: str) -> tuple[VariableMapping, list[str]]:
    """Enforce mapping invariants, dropping invalid pairs with warnings.

    Kept pairs have distinct keys and values (injective), keys that occur in
    the reference code, and values that cannot capture an identifier left
    unrenamed in the reference.
    """
    source_ids = identifier_set(standard_code)
    warnings: list[str] = []
    kept: dict[str, str] = {}
    used_values: set[str] = set()

    def is_ident(name: str) -> bool:
        return bool(name) and (name[0].isalpha() or name[0] == "_") and all(
            c.isalnum() or c == "_" for c in name
        )

    for key, value in raw.items():
        if not is_ident(key) or not is_ident(value):
            warnings.append(f"dropped non-identifier pair {key!r} -> {value!r}")
            continue
        if key in _NEVER_RENAME or value in _NEVER_RENAME:
            warnings.append(f"dropped reserved-name pair {key!r} -> {value!r}")
            continue
        if key not in source_ids:
            warnings.append(f"dropped pair for {key!r}: not present in reference code")
            continue
        if value in used_values:
            warnings.append(f"dropped pair {key!r} -> {value!r}: target already used")
            continue
        kept[key] = value
        used_values.add(value)

    # Capture check: a target that stays behind as an unrenamed identifier
    # of the reference would merge two distinct variables.
    for key, value in list(kept.items()):
        if value != key and value in source_ids and value not in kept:
            warnings.append(
                f"dropped pair {key!r} -> {value!r}: target collides with an unrenamed identifier"
            )
            del kept[key]

    return VariableMapping(pairs=kept), warnings


def apply_mapping(standard_code: str, mapping: VariableMapping | dict[str, str]) -> str:
    """Simultaneous whole-identifier rename; literals and comments untouched."""
    pairs = mapping.pairs if isinstance(mapping, VariableMapping) else mapping
    effective = {k: v for k, v in pairs.items() if k != v}
    return rename_identifiers(standard_code, effective)


def align(
    gateway: Gateway,
    judge,
    s_star: PoolEntry,
    erroneous_code: str,
    problem: Problem,
    max_retries: int = DEFAULT_MAX_RETRIES,
) -> AlignedCode:
    """Produce a verified rename of ``s_star`` into the student's variable names.

    Always returns code whose judge result is all-AC: either a verified
    renamed program, or the unmodified (ingest-verified) reference when the
    identifier sets already coincide or every mapping attempt failed.
    """
    if identifier_set(s_star.code) == identifier_set(erroneous_code):
        return AlignedCode(
            code=s_star.code, mapping_used=VariableMapping({}), verified=True, attempts=0
        )

    warnings: list[str] = []
    attempts = 0
    try:
        pseudo_standard = to_pseudocode(gateway, s_star.code, name=problem.title)
        pseudo_erroneous = to_pseudocode(gateway, erroneous_code, name=problem.title)
        for attempts in range(1, max_retries + 2):
            raw = generate_mapping(gateway, pseudo_standard, pseudo_erroneous)
            mapping, warns = validate_mapping(raw, s_star.code)
            warnings.extend(warns)
            candidate = apply_mapping(s_star.code, mapping)
            if candidate == s_star.code:
                return AlignedCode(
                    code=s_star.code,
                    mapping_used=mapping,
                    verified=True,
                    attempts=attempts,
                    warnings=warnings,
                )
            result = judge.run_tests(candidate, problem)
            if result.ac_all:
                return AlignedCode(
                    code=candidate,
                    mapping_used=mapping,
                    verified=True,
                    attempts=attempts,
                    warnings=warnings,
                )
            warnings.append(
                f"attempt {attempts}: renamed reference failed verification "
                f"(ac_rate={result.ac_rate:.2f})"
            )
    except (AlignmentFailed, MalformedModelOutput) as exc:
        warnings.append(f"alignment aborted: {exc}")

    return AlignedCode(
        code=s_star.code,
        mapping_used=VariableMapping({}),
        verified=True,
        attempts=attempts,
        fallback=True,
        warnings=warnings,
    )
