"""Command-line entry points.

    debugta ingest <dir>                       validate a dataset directory
    debugta eval --dataset D --strategy S ...  batch evaluation -> run report
    debugta agent --dataset D --problem P --code F   one-shot suggestions
    debugta plag --standard A --erroneous B --final C  plagiarism verdict
    debugta serve --dataset D --port N         start the session service

Exit codes: 0 success, 1 runtime failure (structured message on stderr),
2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from dataclasses import replace

from .agent import STRATEGIES, Teacher
from .config import AppConfig, ConfigError, load_config, make_agent_config, make_gateway, make_judge
from .corpus import DatasetError, Problem, Submission, SubmissionWindow, filter_pool, load_dataset
from .judge import JudgeEnvironmentError
from .llmgw import GatewayError, UsageLedger, usage_report
from .metrics import aggregate, render_table
from .plagiarism import PlagiarismConfig, plag_check
from .simulator import SessionConfig, StuBot, run_session


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="debugta")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="load and validate a dataset directory")
    p_ingest.add_argument("directory")
    p_ingest.add_argument("--no-verify", action="store_true", help="skip pool verification")

    p_eval = sub.add_parser("eval", help="run sessions over a dataset and report metrics")
    p_eval.add_argument("--dataset", required=True)
    p_eval.add_argument("--strategy", required=True, choices=sorted(STRATEGIES))
    p_eval.add_argument("--rounds", type=int, default=3)
    p_eval.add_argument("--backend", help="TOML config file (llm/judge/... sections)")
    p_eval.add_argument("--out", default="runs")
    p_eval.add_argument("--run-id", default=None)
    p_eval.add_argument("--dataset-id", default=None)
    p_eval.add_argument(
        "--deterministic",
        action="store_true",
        help="zero wall times and derive session ids from inputs (byte-stable output)",
    )

    p_agent = sub.add_parser("agent", help="one-shot suggestions for a program")
    p_agent.add_argument("--dataset", required=True)
    p_agent.add_argument("--problem", required=True)
    p_agent.add_argument("--code", required=True, help="path to the erroneous program")
    p_agent.add_argument("--backend")

    p_plag = sub.add_parser("plag", help="standalone plagiarism check")
    p_plag.add_argument("--standard", required=True)
    p_plag.add_argument("--erroneous", required=True)
    p_plag.add_argument("--final", required=True)
    p_plag.add_argument("--tau-sim", type=float, default=None)
    p_plag.add_argument("--tau-diff", type=float, default=None)
    p_plag.add_argument("--backend")

    p_serve = sub.add_parser("serve", help="start the HTTP session service")
    p_serve.add_argument("--dataset", required=True)
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--backend")
    p_serve.add_argument("--data-dir", default=None)
    p_serve.add_argument("--static", default=None, help="directory of built UI assets")

    return parser


def _config_from(args) -> AppConfig:
    backend = getattr(args, "backend", None)
    return load_config(backend) if backend else load_config()


def problem_for_submission(
    problem: Problem, submission: Submission, window_hours: float
) -> Problem:
    """Copy of the problem with the submitter's same-window pool entries removed,
    so the reference pool never contains the author's own contemporaneous code."""
    if submission.submitter_id is None or submission.submitted_at is None:
        return problem
    window = SubmissionWindow.around(submission, hours=window_hours)
    return replace(problem, pool=tuple(filter_pool(problem, window)))


def _cmd_ingest(args) -> int:
    dataset = load_dataset(args.directory, verify_pool=not args.no_verify)
    n_tests = sum(len(p.tests) for p in dataset.problems)
    n_pool = sum(len(p.pool) for p in dataset.problems)
    n_subs = sum(len(s) for s in dataset.submissions.values())
    print(
        f"ok: {len(dataset.problems)} problems, {n_tests} tests, "
        f"{n_pool} pool entries ({'verified' if dataset.pool_verified else 'unverified'}), "
        f"{n_subs} submissions"
    )
    for warning in dataset.warnings:
        print(f"warning: {warning}")
    return 0


def _cmd_eval(args) -> int:
    config = _config_from(args)
    judge = make_judge(config)
    dataset = load_dataset(
        args.dataset, verify_pool=config.corpus.verify_pool, judge=judge
    )
    dataset_id = args.dataset_id or Path(args.dataset).resolve().name

    ledger = UsageLedger()
    gateway = make_gateway(config.llm, ledger=ledger, deterministic=args.deterministic)
    stubot_section = config.stubot_section()
    if stubot_section is config.llm:
        stubot_gateway = gateway
    else:
        stubot_gateway = make_gateway(
            stubot_section, ledger=ledger, deterministic=args.deterministic
        )
    stubot = StuBot(stubot_gateway)
    plag_cfg = PlagiarismConfig(
        tau_sim=config.plagiarism.tau_sim, tau_diff=config.plagiarism.tau_diff
    )
    session_cfg = SessionConfig(max_rounds=args.rounds, strategy_id=args.strategy)

    run_id = args.run_id or time.strftime("%Y%m%d-%H%M%S")
    run_dir = Path(args.out) / run_id
    sessions_dir = run_dir / "sessions"

    transcripts = []
    for problem in dataset.problems:
        for submission in dataset.submissions.get(problem.id, []):
            teacher = Teacher(args.strategy, gateway, judge, make_agent_config(config))
            transcript = run_session(
                problem_for_submission(
                    problem, submission, config.corpus.exclusion_window_hours
                ),
                submission.code,
                session_cfg,
                teacher,
                stubot,
                judge,
                plag_config=plag_cfg,
                dataset_id=dataset_id,
                submission_id=submission.id,
                deterministic=args.deterministic,
            )
            transcript.save(sessions_dir)
            transcripts.append(transcript)
    if not transcripts:
        print("error: dataset contains no submissions to evaluate", file=sys.stderr)
        return 1

    report = aggregate(transcripts)
    json_text, markdown = render_table([report])
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "report.json").write_text(json_text + "\n", encoding="utf-8")
    (run_dir / "report.md").write_text(markdown, encoding="utf-8")
    usage = usage_report(ledger)
    (run_dir / "usage.json").write_text(
        json.dumps(usage.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(
        f"{dataset_id}/{args.strategy}: AC Rate {report.ac_rate_mean:.2f}, "
        f"AC@all {report.ac_all_rate:.2f}, Plag. {report.plag_rate:.2f} "
        f"({report.n_sessions} sessions, {usage.total_tokens} tokens) -> {run_dir}"
    )
    return 0


def _cmd_agent(args) -> int:
    config = _config_from(args)
    judge = make_judge(config)
    dataset = load_dataset(
        args.dataset, verify_pool=config.corpus.verify_pool, judge=judge
    )
    try:
        problem = dataset.problem(args.problem)
    except KeyError:
        print(f"error: unknown problem {args.problem!r} in {args.dataset}", file=sys.stderr)
        return 1
    code = Path(args.code).read_text(encoding="utf-8")
    gateway = make_gateway(config.llm)
    teacher = Teacher("debugta", gateway, judge, make_agent_config(config))
    suggestions = teacher.agent.debug_and_teach(code, problem)
    print(json.dumps(suggestions.to_dict(), indent=2))
    return 0


def _cmd_plag(args) -> int:
    config = _config_from(args)
    tau_sim = args.tau_sim if args.tau_sim is not None else config.plagiarism.tau_sim
    tau_diff = args.tau_diff if args.tau_diff is not None else config.plagiarism.tau_diff
    verdict = plag_check(
        Path(args.standard).read_text(encoding="utf-8"),
        Path(args.erroneous).read_text(encoding="utf-8"),
        Path(args.final).read_text(encoding="utf-8"),
        PlagiarismConfig(tau_sim=tau_sim, tau_diff=tau_diff),
    )
    print(json.dumps(verdict.to_dict(), indent=2))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = _config_from(args)
    judge = make_judge(config)
    dataset = load_dataset(
        args.dataset, verify_pool=config.corpus.verify_pool, judge=judge
    )
    gateway = make_gateway(config.llm)
    app = create_app(
        dataset,
        judge,
        gateway,
        agent_config=make_agent_config(config),
        data_dir=args.data_dir or config.service.data_dir,
        round_cap=config.service.round_cap,
        bearer_token=config.service.bearer_token,
        static_dir=args.static,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "eval": _cmd_eval,
    "agent": _cmd_agent,
    "plag": _cmd_plag,
    "serve": _cmd_serve,
}


def cli_dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (DatasetError, ConfigError, GatewayError, JudgeEnvironmentError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
