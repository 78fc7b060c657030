"""Corpus entries: ``.gc`` files with optional ``.expect`` sidecars.

A sidecar holds ``key = value`` lines; ``#`` starts a comment.  Keys::

    defined, well_branched          true | false
    reason                          exact text of the undefinedness reason
    active, passive, neither        comma-separated participants (may be empty)
    deadlock_free                   pass | fail | skip | inconclusive
    inclusion_fifo, inclusion_bag   pass | fail | skip | inconclusive
    strict_fifo, equality_bag       true | false

A participant counts as active when it is active in some choice and as
passive when it is passive in every choice it takes part in.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .ast import ChorError, GChor
from .semantics import ACTIVE, NEITHER, PASSIVE, SemanticsResult, sem
from .syntax import parse
from .verify import Report, verify

BOOL_KEYS = {"defined", "well_branched", "strict_fifo", "equality_bag"}
LIST_KEYS = {"active", "passive", "neither"}
VERDICT_KEYS = {"deadlock_free", "inclusion_fifo", "inclusion_bag"}
TEXT_KEYS = {"reason"}
KEYS = BOOL_KEYS | LIST_KEYS | VERDICT_KEYS | TEXT_KEYS
VERDICTS = {"pass", "fail", "skip", "inconclusive"}


class ExpectError(ChorError):
    pass


def parse_expect(text: str, where: str = "<expect>") -> dict:
    out: dict = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ExpectError(f"{where}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ExpectError(f"{where}:{n}: unknown key {key!r}")
        if key in out:
            raise ExpectError(f"{where}:{n}: duplicate key {key!r}")
        if key in BOOL_KEYS:
            if value not in ("true", "false"):
                raise ExpectError(f"{where}:{n}: {key} must be true or false")
            out[key] = value == "true"
        elif key in LIST_KEYS:
            out[key] = sorted(p.strip() for p in value.split(",") if p.strip())
        elif key in VERDICT_KEYS:
            if value not in VERDICTS:
                raise ExpectError(f"{where}:{n}: {key} must be one of {sorted(VERDICTS)}")
            out[key] = value
        else:
            out[key] = value
    return out


def roles(res: SemanticsResult) -> dict:
    """Aggregate per-choice roles into active / passive / neither lists."""
    seen: dict = {}
    for report in res.choices:
        for r in report.roles:
            seen.setdefault(r.participant, set()).add(r.role)
    out = {ACTIVE: [], PASSIVE: [], NEITHER: []}
    for p, rs in sorted(seen.items()):
        if NEITHER in rs:
            out[NEITHER].append(p)
        elif ACTIVE in rs:
            out[ACTIVE].append(p)
        else:
            out[PASSIVE].append(p)
    return out


def observed(g: GChor, report: Report, res: Optional[SemanticsResult] = None) -> dict:
    res = res or sem(g)
    out = {"defined": res.defined,
           "reason": "" if res.defined else str(res.reason),
           "well_branched": all(c.well_branched for c in res.choices),
           "deadlock_free": report.deadlock.verdict,
           "inclusion_fifo": report.inclusion.verdict,
           "strict_fifo": report.inclusion.strict}
    out.update(roles(res))
    if report.bag is not None:
        out["inclusion_bag"] = report.bag.verdict
        out["equality_bag"] = report.bag.equality
    return out


@dataclass
class EntryResult:
    path: Path
    report: Optional[Report]
    mismatches: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None and not self.mismatches and self.report is not None and self.report.ok

    def to_json(self, stats: bool = True) -> dict:
        out = {"file": str(self.path), "ok": self.ok}
        if self.report is not None:
            out["report"] = self.report.to_json(stats)
        if self.mismatches:
            out["mismatches"] = [{"key": k, "expected": e, "observed": o}
                                 for k, e, o in self.mismatches]
        if self.error is not None:
            out["error"] = self.error
        return out


def check_entry(path: Path) -> EntryResult:
    path = Path(path)
    try:
        g = parse(path.read_text())
        sidecar = path.with_suffix(".expect")
        expect = parse_expect(sidecar.read_text(), str(sidecar)) if sidecar.exists() else {}
    except (ChorError, OSError) as exc:
        return EntryResult(path, None, error=str(exc))
    report = verify(g, str(path))
    seen = observed(g, report)
    mismatches = [(k, v, seen.get(k)) for k, v in sorted(expect.items()) if seen.get(k) != v]
    return EntryResult(path, report, mismatches)


def corpus_files(path: Path) -> list[Path]:
    path = Path(path)
    return sorted(path.glob("*.gc")) if path.is_dir() else [path]
