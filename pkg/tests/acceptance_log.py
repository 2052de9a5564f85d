"""One verdict line per acceptance criterion, echoed in the pytest summary."""

LINES: list[str] = []


def record(number: int, title: str, passed: bool, seconds: float, detail: str = "") -> str:
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}  ({seconds:.1f} s)"
    if detail:
        line += f"  {detail}"
    LINES.append(line)
    print(line)
    return line
