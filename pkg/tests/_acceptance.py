"""Shared registry of acceptance outcomes, reported at the end of the run."""

RESULTS = []


def record(label: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"
    RESULTS.append(line)
    print(line)
