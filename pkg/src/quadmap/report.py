"""Markdown reproduction of the six reference tables with match flags.

Each table shows the transcribed value next to the recomputed one.  Degree
and count columns are compared as integers; residuals, reference values and
differences are compared as exact rationals.  A reference cell that
disagrees with exact arithmetic is flagged, never silently corrected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import golden
from .analysis import (
    AnalysisReport,
    analyze,
    exact_decimal,
    recurrence_residuals,
    reference_diff,
    reference_sequence,
)

OK, MISMATCH, MISSING = "ok", "MISMATCH", "-"


@dataclass
class TableCheck:
    name: str
    header: list[str]
    lines: list[list[str]]
    mismatches: list[str] = field(default_factory=list)

    @property
    def matches(self) -> bool:
        return not self.mismatches

    def markdown(self) -> str:
        out = [f"### {self.name}", "", "| " + " | ".join(self.header) + " |", "|" + "---|" * len(self.header)]
        out += ["| " + " | ".join(row) + " |" for row in self.lines]
        if self.mismatches:
            out += ["", "Mismatches: " + "; ".join(self.mismatches)]
        return "\n".join(out)


def _flag(ok: bool | None) -> str:
    return MISSING if ok is None else (OK if ok else MISMATCH)


def _cmp(a, b) -> bool | None:
    if a is None or b is None or a == "" or b == "":
        return None
    return Fraction(a) == Fraction(b)


def check_degrees(seqs: dict[str, list[int]]) -> TableCheck:
    g = golden.load("degrees")
    tc = TableCheck("Degree sequences", ["N", "d1 ref", "d1", "d2 ref", "d2", "d3 ref", "d3", "growth ref (d1, d2, d3)", "flag"], [])
    for i, row in enumerate(g.rows):
        n = int(row["N"])
        line = [str(n)]
        flags = []
        for k in ("d1", "d2", "d3"):
            got = seqs.get(k, [])
            v = got[i] if i < len(got) else None
            line += [row[k], "" if v is None else str(v)]
            ok = _cmp(row[k], v)
            flags.append(ok)
            if ok is False:
                tc.mismatches.append(f"{k} at N={n}: reference {row[k]}, computed {v}")
            if v is not None:
                gr = float(row[f"{k}^(1/N)"])
                if abs(v ** (1 / n) - gr) > 1e-9:
                    tc.mismatches.append(f"{k}^(1/N) at N={n}: reference {gr}, computed {v ** (1 / n):.11g}")
        line.append(", ".join(row[f"{k}^(1/N)"] for k in ("d1", "d2", "d3")))
        seen = [f for f in flags if f is not None]
        line.append(_flag(all(seen)) if seen else MISSING)
        tc.lines.append(line)
    return tc


def check_fixed_points(counts: dict[int, int]) -> TableCheck:
    g = golden.load("fixed_points")
    tc = TableCheck("Isolated periodic points", ["N", "reference", "isolated ref", "isolated", "growth ref", "growth", "flag"], [])
    for row in g.rows:
        n = int(row["N"])
        v = counts.get(n)
        growth = "" if v is None else (f"{v ** (1 / n):.11f}" if v else "0")
        ok = None if v is None else v == int(row["isolated"])
        if v is not None and v and abs(v ** (1 / n) - float(row["growth"])) > 1e-9:
            ok = False
        if ok is False:
            tc.mismatches.append(f"N={n}: reference {row['isolated']}, computed {v}")
        tc.lines.append([str(n), row["fixed_points"], row["isolated"], "" if v is None else str(v), row["growth"], growth, _flag(ok)])
    return tc


def check_residuals(kind: str, seq: list[int]) -> TableCheck:
    g = golden.load(f"residuals_{kind}")
    rows = recurrence_residuals(seq, kind) if len(seq) >= 4 else []
    tc = TableCheck(f"Recurrence residuals of {kind}", ["N", kind, "recurrence ref", "recurrence", "residual ref", "residual", "flag"], [])
    for i, row in enumerate(g.rows):
        n = int(row["N"])
        r = rows[i] if i < len(rows) else None
        rec = "" if r is None or r.recurrence is None else exact_decimal(r.recurrence)
        res = "" if r is None or r.residual is None else exact_decimal(r.residual)
        oks = [_cmp(row[kind], None if r is None else r.value), _cmp(row["recurrence"], rec), _cmp(row["residual"], res)]
        seen = [o for o in oks if o is not None]
        ok = all(seen) if seen else None
        if ok is False:
            tc.mismatches.append(f"N={n}: reference ({row['recurrence']}, {row['residual']}), computed ({rec}, {res})")
        tc.lines.append([str(n), row[kind], row["recurrence"], rec, row["residual"], res, _flag(ok)])
    return tc


def check_reference(name: str, seq: list[int]) -> TableCheck:
    g = golden.load(f"reference_{name}")
    kind = "d3" if name == "b" else "d2"
    diffs = reference_diff(seq, reference_sequence(name, len(seq))) if len(seq) >= 3 else []
    tc = TableCheck(f"{kind} against reference sequence {name}", ["row", "N ref", kind, f"{name} ref", name, "difference ref", "difference", "flag"], [])
    for i, row in enumerate(g.rows):
        n = i + 1
        d = diffs[i] if i < len(diffs) else None
        ref = "" if d is None else exact_decimal(d.reference)
        diff = "" if d is None else exact_decimal(d.difference)
        oks = [_cmp(row[kind], None if d is None else d.value), _cmp(row[name], ref), _cmp(row["difference"], diff)]
        seen = [o for o in oks if o is not None]
        ok = all(seen) if seen else None
        if row["N"] != str(n):
            tc.mismatches.append(f"row {n}: printed label N={row['N']}")
        if ok is False:
            tc.mismatches.append(f"N={n}: reference ({row[name]}, {row['difference']}), exact ({ref}, {diff})")
        tc.lines.append([str(n), row["N"], "" if d is None else str(d.value), row[name], ref, row["difference"], diff, _flag(ok)])
    return tc


def table_checks(seqs: dict[str, list[int]], counts: dict[int, int]) -> list[TableCheck]:
    return [
        check_fixed_points(counts),
        check_degrees(seqs),
        check_residuals("d2", seqs.get("d2", [])),
        check_residuals("d3", seqs.get("d3", [])),
        check_reference("b", seqs.get("d3", [])),
        check_reference("c", seqs.get("d2", [])),
    ]


def render_markdown(report: AnalysisReport, checks: list[TableCheck] | None = None) -> str:
    checks = checks if checks is not None else table_checks(report.sequences, report.counts)
    out = ["# Degree growth and periodic points: reproduction report", "", f"seed: {report.seed}", ""]
    out += ["## Tables", ""]
    for c in checks:
        out += [c.markdown(), ""]
    out += ["## Questions", "", "| id | proposition | verdict |", "|---|---|---|"]
    for v in report.verdicts:
        out.append(f"| {v.qid} | {v.statement} | {v.summary} |")
    out += ["", "## Constants", ""]
    for k, c in report.cubics.items():
        out.append(f"- {k}: coefficients {list(c.coefficients)}, real roots {[f'{r:.12f}' for r in c.roots]}, max |p(root)| {max(c.residuals):.1e}")
    out.append(f"- 2t^3-3t^2-4t+3 has no rational root (irreducible over Q): {report.irreducible}")
    for k, lc in report.log_concavity.items():
        out.append(f"- {k}: submultiplicative on {lc.pairs_checked} pairs: {lc.submultiplicative}; v_n^(1/n) non-increasing: {lc.roots_decreasing}")
    if report.growth_bracket:
        lo, hi = report.growth_bracket
        out.append(f"- isolated-point growth: latest even n {lo:.4f}, latest odd n {hi:.4f}")
    return "\n".join(out) + "\n"


def golden_report(seed: int = 0) -> tuple[AnalysisReport, list[TableCheck]]:
    seqs = golden.degree_sequences()
    counts = golden.isolated_counts()
    return analyze(seqs, counts, seed), table_checks(seqs, counts)
