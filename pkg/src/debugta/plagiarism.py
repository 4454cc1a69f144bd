"""Plagiarism detection over (standard, erroneous, final) code triples.

Similarity is the Ratcliff-Obershelp ratio 2M/(|a|+|b|) where M is the total
size of matched blocks found by recursively taking the longest common
contiguous block. This is implemented from scratch, with no junk or
popularity heuristics, so results can diverge from library sequence matchers
that enable such heuristics on long inputs. Ties between equally long blocks
resolve to the block starting earliest in the first sequence, then earliest
in the second; because that greedy choice is order-sensitive, the pair is
put into a canonical order first, which makes the ratio symmetric.

The decision takes pairwise similarities between the standard code S, the
erroneous code E, and the final code F, and walks four ordered branches:
an E already close to S disables the check, an F still close to E is the
student's own work, an F close to S (absolutely, or relative to its distance
from E) is plagiarism, and anything else passes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .judge import JudgeResult
from .lexing import lexical_tokens

BRANCH_ERRONEOUS_CLOSE_TO_STANDARD = "erroneous_close_to_standard"
BRANCH_FINAL_CLOSE_TO_ERRONEOUS = "final_close_to_erroneous"
BRANCH_FINAL_CLOSE_TO_STANDARD = "final_close_to_standard"
BRANCH_INCONCLUSIVE = "inconclusive"

DEFAULT_TAU_SIM = 0.8
DEFAULT_TAU_DIFF = 0.1


def _as_tokens(seq) -> list:
    tokens = getattr(seq, "tokens", None)
    if tokens is not None:
        return list(tokens)
    return list(seq)


def _longest_match(a: list, b: list, alo: int, ahi: int, blo: int, bhi: int):
    """Longest contiguous block a[i:i+k] == b[j:j+k] within the windows.

    Among maximal blocks, the one starting earliest in ``a`` wins, then
    earliest in ``b``.
    """
    b2j: dict = {}
    for j in range(blo, bhi):
        b2j.setdefault(b[j], []).append(j)
    besti, bestj, bestk = alo, blo, 0
    j2len: dict[int, int] = {}
    for i in range(alo, ahi):
        newj2len: dict[int, int] = {}
        for j in b2j.get(a[i], ()):
            k = j2len.get(j - 1, 0) + 1
            newj2len[j] = k
            if k > bestk:
                besti, bestj, bestk = i - k + 1, j - k + 1, k
        j2len = newj2len
    return besti, bestj, bestk


def _canonical_key(tokens: list) -> tuple:
    return (len(tokens), [str(t) for t in tokens])


def matching_blocks(a_seq, b_seq) -> list[tuple[int, int, int]]:
    """All matched blocks (i, j, size) from the recursive splitting, sorted.

    The pair is matched in a canonical order internally (block indices are
    mapped back), so the matched total is independent of argument order.
    """
    a, b = _as_tokens(a_seq), _as_tokens(b_seq)
    swapped = _canonical_key(b) < _canonical_key(a)
    if swapped:
        a, b = b, a
    queue = [(0, len(a), 0, len(b))]
    blocks: list[tuple[int, int, int]] = []
    while queue:
        alo, ahi, blo, bhi = queue.pop()
        i, j, k = _longest_match(a, b, alo, ahi, blo, bhi)
        if k:
            blocks.append((i, j, k))
            queue.append((alo, i, blo, j))
            queue.append((i + k, ahi, j + k, bhi))
    if swapped:
        blocks = [(j, i, k) for i, j, k in blocks]
    blocks.sort()
    return blocks


def seq_ratio(a_seq, b_seq) -> float:
    """Ratcliff-Obershelp ratio in [0, 1]; two empty sequences count as identical."""
    a, b = _as_tokens(a_seq), _as_tokens(b_seq)
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    matched = sum(k for _, _, k in matching_blocks(a, b))
    return 2.0 * matched / total


@dataclass(frozen=True)
class SimilarityTriple:
    s_sf: float  # standard vs final
    s_ef: float  # erroneous vs final
    s_se: float  # standard vs erroneous


@dataclass(frozen=True)
class PlagiarismConfig:
    tau_sim: float = DEFAULT_TAU_SIM
    tau_diff: float = DEFAULT_TAU_DIFF

    def __post_init__(self):
        for name in ("tau_sim", "tau_diff"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class PlagiarismVerdict:
    plagiarized: bool
    triple: SimilarityTriple
    branch: str
    tau_sim: float = DEFAULT_TAU_SIM
    tau_diff: float = DEFAULT_TAU_DIFF
    standard_id: str | None = None

    def to_dict(self) -> dict:
        return {
            "plagiarized": self.plagiarized,
            "s_sf": self.triple.s_sf,
            "s_ef": self.triple.s_ef,
            "s_se": self.triple.s_se,
            "branch": self.branch,
            "tau_sim": self.tau_sim,
            "tau_diff": self.tau_diff,
            "standard_id": self.standard_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlagiarismVerdict":
        return cls(
            plagiarized=data["plagiarized"],
            triple=SimilarityTriple(
                s_sf=data["s_sf"], s_ef=data["s_ef"], s_se=data["s_se"]
            ),
            branch=data["branch"],
            tau_sim=data["tau_sim"],
            tau_diff=data["tau_diff"],
            standard_id=data.get("standard_id"),
        )


def decide(triple: SimilarityTriple, config: PlagiarismConfig) -> tuple[bool, str]:
    """Ordered decision over the similarity triple; first true branch fires."""
    if triple.s_se > config.tau_sim:
        return False, BRANCH_ERRONEOUS_CLOSE_TO_STANDARD
    if triple.s_ef > config.tau_sim or triple.s_ef > triple.s_sf:
        return False, BRANCH_FINAL_CLOSE_TO_ERRONEOUS
    if triple.s_sf > config.tau_sim or triple.s_sf > triple.s_ef + config.tau_diff:
        return True, BRANCH_FINAL_CLOSE_TO_STANDARD
    return False, BRANCH_INCONCLUSIVE


def plag_check(
    standard_code: str,
    erroneous_code: str,
    final_code: str,
    config: PlagiarismConfig | None = None,
    standard_id: str | None = None,
) -> PlagiarismVerdict:
    """Tokenize the three programs and run the plagiarism decision."""
    cfg = config or PlagiarismConfig()
    t_s = lexical_tokens(standard_code)
    t_e = lexical_tokens(erroneous_code)
    t_f = lexical_tokens(final_code)
    triple = SimilarityTriple(
        s_sf=seq_ratio(t_s, t_f),
        s_ef=seq_ratio(t_e, t_f),
        s_se=seq_ratio(t_s, t_e),
    )
    plagiarized, branch = decide(triple, cfg)
    return PlagiarismVerdict(
        plagiarized=plagiarized,
        triple=triple,
        branch=branch,
        tau_sim=cfg.tau_sim,
        tau_diff=cfg.tau_diff,
        standard_id=standard_id,
    )


def apply_plag_zeroing(result: JudgeResult, verdict: PlagiarismVerdict) -> JudgeResult:
    """Zero the score of a plagiarized session, keeping originals for audit."""
    if not verdict.plagiarized:
        return result
    return JudgeResult(
        per_test=result.per_test,
        ac_rate=0.0,
        ac_all=False,
        original_ac_rate=result.ac_rate,
        original_ac_all=result.ac_all,
    )
