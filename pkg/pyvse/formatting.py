from pyvse.types import ValidationReport, VerificationReport


def item_table(rows: list[tuple[str, str]], headers: tuple[str, str]) -> str:
    if len(rows) == 0:
        raise ValueError("No rows to format")
    left_len = max([len(str(left)) for left, _ in rows] + [len(headers[0])])
    right_len = max([len(str(right)) for _, right in rows] + [len(headers[1])])

    header_line = "-" * left_len + " | " + "-" * right_len

    table = [
        f"| {headers[0]}{' ' * (left_len - len(headers[0]))} | "
        f"{headers[1]}{' ' * (right_len - len(headers[1]))} |",
        f"| {header_line} |",
    ]
    for left, right in rows:
        left_space = " " * (left_len - len(str(left)))
        right_space = " " * (right_len - len(str(right)))
        table.append(f"| {left}{left_space} | {right}{right_space} |")

    return "\n".join(table)


def verification_table(report: VerificationReport) -> str:
    rows = [
        (entry.name, f"{'ok' if entry.ok else 'FAIL'} ({entry.direction})")
        for entry in report.entries
    ]
    return item_table(rows, headers=("Polynomial", "Outcome"))


def validation_table(report: ValidationReport) -> str:
    if report.ok or not report.offending:
        return str(report)
    rows = [(label, f"{count}x") for label, count in sorted(report.offending.items())]
    return item_table(rows, headers=("Label", "Occurrences"))
