"""Aggregate session transcripts into dataset-level reports.

The headline numbers mirror the usual online-judge reporting: mean AC rate
(after plagiarism zeroing), the percentage of sessions passing every test,
and the percentage flagged as plagiarized. The per-round curve records the
best judged score reached by each round index, carrying the last value
forward once a session stops, which matches how a student who has passed
stops editing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .simulator import SessionTranscript


@dataclass
class RunReport:
    dataset_id: str
    strategy_id: str
    n_problems: int
    n_sessions: int
    ac_rate_mean: float
    ac_all_rate: float
    plag_rate: float
    tokens_total: int
    per_round_curve: list[tuple[int, float]]
    config_fingerprint: str
    curve_convention: str = "best_so_far"

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "strategy_id": self.strategy_id,
            "n_problems": self.n_problems,
            "n_sessions": self.n_sessions,
            "ac_rate_mean": self.ac_rate_mean,
            "ac_all_rate": self.ac_all_rate,
            "plag_rate": self.plag_rate,
            "tokens_total": self.tokens_total,
            "per_round_curve": [[r, v] for r, v in self.per_round_curve],
            "config_fingerprint": self.config_fingerprint,
            "curve_convention": self.curve_convention,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(
            dataset_id=data["dataset_id"],
            strategy_id=data["strategy_id"],
            n_problems=data["n_problems"],
            n_sessions=data["n_sessions"],
            ac_rate_mean=data["ac_rate_mean"],
            ac_all_rate=data["ac_all_rate"],
            plag_rate=data["plag_rate"],
            tokens_total=data["tokens_total"],
            per_round_curve=[(int(r), float(v)) for r, v in data["per_round_curve"]],
            config_fingerprint=data["config_fingerprint"],
            curve_convention=data.get("curve_convention", "best_so_far"),
        )


def _best_so_far(transcript: SessionTranscript, round_index: int) -> float:
    scores = [transcript.initial_judge.ac_rate]
    for record in transcript.rounds:
        if record.round_index > round_index:
            break
        scores.append(record.judge_result.ac_rate)
    return max(scores)


def aggregate(transcripts: list[SessionTranscript]) -> RunReport:
    """Dataset-level metrics for one (dataset, strategy) batch of sessions."""
    if not transcripts:
        raise ValueError("cannot aggregate an empty transcript list")
    strategies = {t.strategy_id for t in transcripts}
    datasets = {t.dataset_id for t in transcripts}
    if len(strategies) != 1 or len(datasets) != 1:
        raise ValueError(
            f"transcripts must share one (dataset, strategy) pair, "
            f"got datasets={sorted(datasets)} strategies={sorted(strategies)}"
        )
    fingerprints = {t.config_fingerprint for t in transcripts}
    if len(fingerprints) != 1:
        raise ValueError(f"mixed config fingerprints within one run: {sorted(fingerprints)}")

    n = len(transcripts)
    ac_rate_mean = sum(t.final_judge.ac_rate for t in transcripts) / n
    ac_all_rate = 100.0 * sum(1 for t in transcripts if t.final_judge.ac_all) / n
    plag_rate = (
        100.0
        * sum(1 for t in transcripts if t.plagiarism is not None and t.plagiarism.plagiarized)
        / n
    )
    tokens_total = sum(t.tokens_total for t in transcripts)

    max_rounds = max(t.max_rounds for t in transcripts)
    curve = [
        (r, sum(_best_so_far(t, r) for t in transcripts) / n)
        for r in range(1, max_rounds + 1)
    ]

    return RunReport(
        dataset_id=transcripts[0].dataset_id,
        strategy_id=transcripts[0].strategy_id,
        n_problems=len({t.problem_id for t in transcripts}),
        n_sessions=n,
        ac_rate_mean=ac_rate_mean,
        ac_all_rate=ac_all_rate,
        plag_rate=plag_rate,
        tokens_total=tokens_total,
        per_round_curve=curve,
        config_fingerprint=transcripts[0].config_fingerprint,
    )


def render_table(reports: list[RunReport]) -> tuple[str, str]:
    """(json_text, markdown_text) for a list of reports.

    JSON is the source of truth; the markdown table derives from it, one row
    per strategy with an AC Rate / AC@all / Plag. column triple per dataset.
    """
    json_text = json.dumps(
        {"reports": [r.to_dict() for r in reports]}, indent=2, sort_keys=True
    )

    datasets: list[str] = []
    strategies: list[str] = []
    for r in reports:
        if r.dataset_id not in datasets:
            datasets.append(r.dataset_id)
        if r.strategy_id not in strategies:
            strategies.append(r.strategy_id)
    by_key = {(r.dataset_id, r.strategy_id): r for r in reports}

    header = ["Teacher"]
    for ds in datasets:
        header += [f"{ds} AC Rate", f"{ds} AC@all", f"{ds} Plag."]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join("---" for _ in header) + "|",
    ]
    for strat in strategies:
        row = [strat]
        for ds in datasets:
            report = by_key.get((ds, strat))
            if report is None:
                row += ["-", "-", "-"]
            else:
                row += [
                    f"{report.ac_rate_mean:.2f}",
                    f"{report.ac_all_rate:.2f}",
                    f"{report.plag_rate:.2f}",
                ]
        lines.append("| " + " | ".join(row) + " |")

    fingerprints = {r.config_fingerprint for r in reports}
    if len(fingerprints) > 1:
        lines.append("")
        lines.append(
            "Note: reports were produced under differing configurations "
            f"(fingerprints: {', '.join(sorted(fingerprints))})."
        )
    markdown = "\n".join(lines) + "\n"
    return json_text, markdown
