"""Identity reports: one residual per identity instance."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .galgebra import GPoly


@dataclass
class Record:
    identity: str
    instance: tuple = ()
    residual: GPoly | None = None
    ok: bool | None = None
    detail: str = ""

    def __post_init__(self):
        if self.ok is None:
            self.ok = self.residual is None or self.residual.is_zero()

    @property
    def label(self) -> str:
        if not self.instance:
            return self.identity
        return "%s[%s]" % (self.identity, ",".join(str(i) for i in self.instance))


@dataclass
class IdentityReport:
    records: list[Record] = field(default_factory=list)

    def add(self, identity, instance=(), residual=None, ok=None, detail="") -> Record:
        rec = Record(identity, tuple(instance), residual, ok, detail)
        self.records.append(rec)
        return rec

    def extend(self, other: "IdentityReport") -> "IdentityReport":
        self.records.extend(other.records)
        return self

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.records)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def failures(self) -> list[Record]:
        return [r for r in self.records if not r.ok]

    def select(self, identity: str) -> list[Record]:
        return [r for r in self.records if r.identity == identity]

    def identities(self) -> list[str]:
        seen = []
        for r in self.records:
            if r.identity not in seen:
                seen.append(r.identity)
        return seen

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def summary(self) -> str:
        bad = self.failures()
        if not bad:
            return f"pass ({len(self.records)} instances)"
        return "fail: " + ", ".join(r.label for r in bad[:5]) + (
            f" (+{len(bad) - 5} more)" if len(bad) > 5 else ""
        )


def sample_points(names: Iterable[str], count: int = 5, seed: int = 0) -> list[dict]:
    """Deterministic rational sample points with small nonzero numerators."""
    names = list(names)
    rng = random.Random(seed)
    points = []
    for _ in range(count):
        pt = {}
        for n in names:
            num = rng.choice([-1, 1]) * rng.randint(1, 9)
            den = rng.randint(1, 4)
            pt[n] = Fraction(num, den)
        points.append(pt)
    return points
