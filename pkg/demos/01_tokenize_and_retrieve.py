#!/usr/bin/env python3
"""Walk through code tokenization and BM25 pool retrieval.

A student's buggy "sum 1..n" program is matched against the problem's
standard-code pool; the pool entry with the closest token profile wins.
"""

from pathlib import Path

from debugta.corpus import load_dataset
from debugta.retrieval import bm25_rank, code_search, tokenize

ROOT = Path(__file__).resolve().parent.parent

dataset = load_dataset(ROOT / "dataset", verify_pool=False)
problem = dataset.problem("sum")
student = next(s for s in dataset.submissions["sum"] if s.id == "e1")

print("== the student's program ==")
print(student.code)

seq = tokenize(student.code)
print(f"lexical tokens ({len(seq.tokens)}):")
print(" ".join(seq.tokens[:30]), "...")
print()

print("== BM25 over the pool ==")
docs = [tokenize(entry.code) for entry in problem.pool]
for index, score in bm25_rank(seq, docs):
    print(f"  {problem.pool[index].id}: {score:.4f}")

result = code_search(student.code, problem.pool)
print(f"\nretrieved reference: {result.entry.id} (score {result.score:.4f}, "
      f"tokenizer {result.tokenizer_id})")
print(result.entry.code)
