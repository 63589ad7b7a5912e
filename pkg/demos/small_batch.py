"""Batch run over every basis made of length-3 patterns, one per symmetry class."""

import itertools
import sys

from gridcover.perms import Basis, all_perms
from gridcover.pipeline import RunConfig, run_batch

limit = float(sys.argv[1]) if len(sys.argv) > 1 else 20.0
s3 = [tuple(p) for p in all_perms(3)]
bases = [Basis(c) for r in range(1, 7) for c in itertools.combinations(s3, r)]

report = run_batch(bases, RunConfig("1", max_width=3, max_height=3), time_limit=limit)
print(f"{len(report.outcomes)} symmetry classes ({len(report.duplicates)} symmetric duplicates skipped)")
print(report.render())
