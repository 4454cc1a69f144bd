"""Shared fixtures: the bundled toy corpus, a judge, and mock-script helpers."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from debugta.corpus import load_dataset
from debugta.judge import Judge
from debugta.llmgw import Gateway, MockBackend, UsageLedger

REPO_ROOT = Path(__file__).resolve().parent.parent
DATASET_DIR = REPO_ROOT / "dataset"
DEMO_SCRIPT_PATH = REPO_ROOT / "configs" / "mock_script.json"


@pytest.fixture(scope="session")
def dataset():
    # Verification is exercised separately (ingest test, acceptance 4); the
    # plain fixture skips it so unrelated tests stay fast.
    return load_dataset(DATASET_DIR, verify_pool=False)


@pytest.fixture(scope="session")
def judge():
    return Judge()


@pytest.fixture()
def demo_script() -> list[dict]:
    return json.loads(DEMO_SCRIPT_PATH.read_text(encoding="utf-8"))


def make_mock_gateway(script: list[dict], ledger: UsageLedger | None = None) -> Gateway:
    return Gateway(MockBackend(script), ledger=ledger, deterministic=True)


@pytest.fixture()
def demo_gateway(demo_script):
    return make_mock_gateway(demo_script)
