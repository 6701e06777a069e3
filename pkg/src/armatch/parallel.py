"""Order-preserving parallel map over picklable tasks.

Results are identical for any worker count: tasks carry their own derived
seeds and the output list is indexed by task position.
"""

from concurrent.futures import ProcessPoolExecutor


def parallel_map(fn, items, jobs=1):
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    chunk = max(1, len(items) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
