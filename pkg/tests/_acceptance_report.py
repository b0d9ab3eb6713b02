"""Collects acceptance-criterion result lines for the terminal summary."""

LINES = []


def record(criterion: int, ok: bool, detail: str) -> bool:
    line = f"[acceptance {criterion:02d}] {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    LINES.append(line)
    return ok
