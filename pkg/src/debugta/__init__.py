"""DebugTA: a debugging-and-teaching agent platform for programming exercises.

The package is organized around the pipeline a teaching assistant follows for
an erroneous student program: probe the compiler, retrieve the most similar
correct solution from the problem's standard-code pool, align its variable
names with the student's, and emit modification suggestions that are checked
against a plagiarism detector. A simulated student closes the loop so teaching
quality can be scored against hidden test cases.

Modules
-------
corpus      problem sets: statements, hidden tests, code pools, submissions
judge       sandboxed compile-and-run harness (AC rate / AC@all scoring)
retrieval   code tokenization and BM25 ranking over the standard-code pool
llmgw       chat-completion gateway (HTTP backend + scripted mock), templates
align       variable substitution: mapping generation, renaming, verification
agent       the teaching agent, its memory, and the baseline strategies
simulator   the simulated student and the multi-round session loop
plagiarism  sequence similarity and the three-way plagiarism decision
metrics     session aggregation into dataset-level reports
interfaces  CLI (debugta ...) and the HTTP session service
"""

__version__ = "0.1.0"
