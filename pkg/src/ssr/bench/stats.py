"""Accuracy, branch attribution and the 2x2 chi-square test."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from ..errors import DegenerateMarginal

SYMBOLIC = "Symbolic"
FALLBACK = "CoTFallback"


@dataclass(frozen=True)
class ContingencyTable:
    sym_right: int
    sym_wrong: int
    cot_right: int
    cot_wrong: int

    def __post_init__(self) -> None:
        if min(self.cells) < 0:
            raise ValueError("contingency counts must be non-negative")

    @property
    def cells(self) -> tuple[int, int, int, int]:
        return (self.sym_right, self.sym_wrong, self.cot_right, self.cot_wrong)

    @property
    def total(self) -> int:
        return sum(self.cells)

    @classmethod
    def from_records(cls, records: Iterable) -> "ContingencyTable":
        c = [0, 0, 0, 0]
        for r in records:
            c[(0 if r.branch == SYMBOLIC else 2) + (0 if r.correct else 1)] += 1
        return cls(*c)


def chi_square(table: ContingencyTable | Sequence[int]) -> float:
    """Pearson statistic for a 2x2 table, no continuity correction."""
    a, b, c, d = table.cells if isinstance(table, ContingencyTable) else table
    rows = (a + b, c + d)
    cols = (a + c, b + d)
    n = a + b + c + d
    if min(rows) <= 0 or min(cols) <= 0:
        raise DegenerateMarginal(f"zero marginal in table {(a, b, c, d)}")
    stat = 0.0
    for obs, r, k in ((a, 0, 0), (b, 0, 1), (c, 1, 0), (d, 1, 1)):
        exp = rows[r] * cols[k] / n
        stat += (obs - exp) ** 2 / exp
    return stat


def _rate(hits: int, n: int):
    return hits / n if n else None


def summarize(records: Sequence, timings: dict | None = None) -> dict:
    if not records:
        raise ValueError("no records to summarize")
    n = len(records)
    table = ContingencyTable.from_records(records)
    sym = [r for r in records if r.branch == SYMBOLIC]
    cot = [r for r in records if r.branch != SYMBOLIC]
    try:
        chi = chi_square(table)
    except DegenerateMarginal:
        chi = None
    out = {
        "count": n,
        "correct": sum(r.correct for r in records),
        "accuracy": sum(r.correct for r in records) / n,
        "symbolic": {"count": len(sym), "accuracy": _rate(sum(r.correct for r in sym), len(sym))},
        "fallback": {"count": len(cot), "accuracy": _rate(sum(r.correct for r in cot), len(cot))},
        "chains": {
            "forward": _rate(sum(bool(r.forward) for r in sym), len(sym)),
            "backward": _rate(sum(bool(r.backward) for r in sym), len(sym)),
        },
        "contingency": asdict(table),
        "chi_square": chi,
    }
    if timings is not None:
        out["runtime"] = timings
    return out


def format_summary(summary: dict) -> str:
    def pct(x):
        return "-" if x is None else f"{100 * x:.1f}%"

    t = summary["contingency"]
    chi = summary["chi_square"]
    rows = [
        ("problems", str(summary["count"])),
        ("accuracy", pct(summary["accuracy"])),
        ("symbolic", f"{summary['symbolic']['count']} ({pct(summary['symbolic']['accuracy'])})"),
        ("fallback", f"{summary['fallback']['count']} ({pct(summary['fallback']['accuracy'])})"),
        ("forward chains", pct(summary["chains"]["forward"])),
        ("backward chains", pct(summary["chains"]["backward"])),
        ("r/w symbolic", f"{t['sym_right']}/{t['sym_wrong']}"),
        ("r/w fallback", f"{t['cot_right']}/{t['cot_wrong']}"),
        ("chi-square", "-" if chi is None else f"{chi:.2f}"),
    ]
    if "runtime" in summary:
        rows.append(("runtime (s)", f"{summary['runtime'].get('total', 0.0):.2f}"))
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)
