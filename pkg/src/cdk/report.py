"""Structured outcomes of law suites."""
from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .errors import CdkError
from .maps import Verdict


def sub_seed(seed: int, *parts) -> int:
    """A 63-bit seed derived from ``seed`` and a path of labels."""
    h = zlib.crc32(repr((seed,) + parts).encode())
    h2 = zlib.adler32(repr(parts + (seed,)).encode())
    return ((h << 31) ^ h2 ^ (seed & 0x7FFFFFFF)) & 0x7FFFFFFFFFFFFFFF


@dataclass(frozen=True)
class Case:
    axiom: str
    trial: int
    ok: bool
    witness: Optional[Tuple[float, ...]] = None
    residual: Optional[float] = None
    seed: int = 0
    note: str = ""

    def to_dict(self) -> dict:
        d = {"axiom": self.axiom, "trial": self.trial, "ok": self.ok,
             "witness": list(self.witness) if self.witness is not None else None,
             "residual": _num(self.residual), "seed": self.seed}
        if self.note:
            d["note"] = self.note
        return d


def _num(x):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return float(x)


@dataclass
class CheckReport:
    suite: str
    cases: List[Case] = field(default_factory=list)
    stages: Dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.cases) and "fail" not in self.stages.values()

    def add(self, axiom: str, trial: int, verdict: Verdict, seed: int = 0) -> Case:
        case = Case(axiom, trial, bool(verdict.equal),
                    None if verdict.equal else verdict.witness,
                    None if verdict.equal else verdict.residual, seed, verdict.note)
        self.cases.append(case)
        return case

    def run(self, axiom: str, trial: int, seed: int, thunk: Callable[[], Verdict]) -> Case:
        """Record ``thunk()``; construction errors become failing cases."""
        try:
            verdict = thunk()
        except CdkError as exc:
            verdict = Verdict(False, None, float("nan"), note=f"{type(exc).__name__}: {exc}")
        return self.add(axiom, trial, verdict, seed)

    def extend(self, other: "CheckReport", prefix: str = "") -> None:
        for c in other.cases:
            self.cases.append(Case(prefix + c.axiom, c.trial, c.ok, c.witness, c.residual,
                                   c.seed, c.note))

    def failures(self) -> List[Case]:
        return [c for c in self.cases if not c.ok]

    def axioms(self) -> List[str]:
        return list(dict.fromkeys(c.axiom for c in self.cases))

    def axiom_passed(self, axiom: str) -> bool:
        return all(c.ok for c in self.cases if c.axiom == axiom)

    def failed_axioms(self) -> List[str]:
        return [a for a in self.axioms() if not self.axiom_passed(a)]

    def to_dict(self) -> dict:
        d = {"suite": self.suite, "passed": self.passed,
             "cases": [c.to_dict() for c in self.cases]}
        if self.stages:
            d["stages"] = dict(self.stages)
        return d

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def summary(self) -> str:
        lines = [f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'}"]
        for stage, status in self.stages.items():
            lines.append(f"  stage {stage}: {status}")
        for a in self.axioms():
            cs = [c for c in self.cases if c.axiom == a]
            bad = [c for c in cs if not c.ok]
            line = f"  {a}: {len(cs) - len(bad)}/{len(cs)}"
            if bad:
                w = bad[0]
                line += f"  first failure trial {w.trial} witness={w.witness} residual={w.residual}"
                if w.note:
                    line += f" ({w.note})"
            lines.append(line)
        return "\n".join(lines)
