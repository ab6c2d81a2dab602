"""Order-preserving fan-out of independent tasks over worker processes."""

import os
from concurrent.futures import ProcessPoolExecutor


def resolve_jobs(jobs=None) -> int:
    """Explicit value, else EHC_LAB_JOBS, else 1."""
    if jobs is None:
        jobs = int(os.environ.get("EHC_LAB_JOBS", "1") or 1)
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    return jobs


def run_chunks(fn, tasks, jobs=1) -> list:
    """Apply fn to every task; results come back in task order whatever `jobs` is."""
    tasks = list(tasks)
    jobs = resolve_jobs(jobs)
    if jobs == 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, *zip(*tasks)))
