"""Collects one verdict line per acceptance criterion for the run summary."""

LINES: dict[int, str] = {}


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    LINES[number] = line
    print(line)
