"""Verification report models and the per-suite tally that builds them."""

from typing import Any, Dict, Iterable, List, Optional

from pydantic import BaseModel, ConfigDict


class Failure(BaseModel):
    """One instance whose checked value disagreed with the reference."""

    model_config = ConfigDict(frozen=True)

    suite: str
    instance: Dict[str, Any]
    expected: str
    actual: str


class SuiteSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    instances: int
    failures: int


class VerificationReport(BaseModel):
    """Aggregate of every suite run; passes exactly when there are no failures."""

    tier: str
    seed: int
    max_population: Optional[int] = None
    instances_checked: int
    failures: List[Failure]
    suites: List[SuiteSummary]
    candidate_evaluations: int = 0
    full_scan_evaluations: int = 0
    elapsed: float = 0.0
    lines: List[Dict[str, Any]] = []

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self, include_elapsed: bool = True) -> Dict[str, Any]:
        """Machine-readable summary document; without elapsed it is deterministic for a seed."""
        document: Dict[str, Any] = {
            "tier": self.tier,
            "seed": self.seed,
            "max_population": self.max_population,
            "passed": self.passed,
            "instances_checked": self.instances_checked,
            "failure_count": len(self.failures),
            "suites": [s.model_dump() for s in self.suites],
            "candidate_evaluations": self.candidate_evaluations,
            "full_scan_evaluations": self.full_scan_evaluations,
            "failures": [f.model_dump() for f in self.failures],
        }
        if include_elapsed:
            document["elapsed"] = round(self.elapsed, 3)
        return document


class Tally:
    """Running counts for one suite; partial tallies merge in a fixed order."""

    def __init__(self, name: str, collect_lines: bool = False):
        self.name = name
        self.collect_lines = collect_lines
        self.instances = 0
        self.failures: List[Failure] = []
        self.candidate_evaluations = 0
        self.full_scan_evaluations = 0
        self.lines: List[Dict[str, Any]] = []

    def check(self, ok: bool, instance: Dict[str, Any], expected: Any = True, actual: Any = None):
        """Count one instance and record a failure unless ok."""
        self.note(ok, instance)
        self.require(ok, instance, expected, actual)
        return ok

    def note(self, ok: bool, instance: Dict[str, Any]) -> None:
        self.instances += 1
        if self.collect_lines:
            self.lines.append({"suite": self.name, **instance, "ok": ok})

    def require(
        self, ok: bool, instance: Dict[str, Any], expected: Any = True, actual: Any = None
    ) -> None:
        if not ok:
            self.failures.append(
                Failure(
                    suite=self.name,
                    instance=instance,
                    expected=str(expected),
                    actual=str(actual),
                )
            )

    def merge(self, parts: Iterable["Tally"]) -> "Tally":
        for part in parts:
            self.instances += part.instances
            self.failures.extend(part.failures)
            self.candidate_evaluations += part.candidate_evaluations
            self.full_scan_evaluations += part.full_scan_evaluations
            self.lines.extend(part.lines)
        return self

    def summary(self) -> SuiteSummary:
        return SuiteSummary(name=self.name, instances=self.instances, failures=len(self.failures))


def build_report(
    tallies: List[Tally],
    tier: str,
    seed: int,
    elapsed: float,
    max_population: Optional[int] = None,
) -> VerificationReport:
    return VerificationReport(
        tier=tier,
        seed=seed,
        max_population=max_population,
        instances_checked=sum(t.instances for t in tallies),
        failures=[f for t in tallies for f in t.failures],
        suites=[t.summary() for t in tallies],
        candidate_evaluations=sum(t.candidate_evaluations for t in tallies),
        full_scan_evaluations=sum(t.full_scan_evaluations for t in tallies),
        elapsed=elapsed,
        lines=[line for t in tallies for line in t.lines],
    )
