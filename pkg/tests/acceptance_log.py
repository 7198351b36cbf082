"""Per-criterion results, printed by the terminal-summary hook in conftest."""

import time
from contextlib import contextmanager

RESULTS: dict[int, tuple[str, float, str]] = {}


@contextmanager
def criterion(number: int, title: str, budget: float | None = None):
    note = {"text": ""}
    t0 = time.perf_counter()
    try:
        yield note
    except BaseException:
        RESULTS[number] = ("FAIL", time.perf_counter() - t0, f"{title}: {note['text']}".rstrip(": "))
        raise
    dt = time.perf_counter() - t0
    if budget is not None and dt > budget:
        RESULTS[number] = ("FAIL", dt, f"{title}: over the {budget:g} s budget")
        raise AssertionError(f"criterion {number} took {dt:.1f} s, budget {budget:g} s")
    RESULTS[number] = ("PASS", dt, f"{title}" + (f": {note['text']}" if note["text"] else ""))


def summary_lines() -> list[str]:
    return [f"criterion {n}: {status:<4} {dt:7.2f} s  {text}" for n, (status, dt, text) in sorted(RESULTS.items())]
