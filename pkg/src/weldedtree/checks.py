"""Named numerical checks and their aggregation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

from weldedtree.interfaces import WeldedTreeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    """
    One evaluated check: passes when ``value <= limit``.

    Args:
        name: Check identifier
        value: Measured residual or statistic
        limit: Tolerance or bound
        step: Circuit step or level the check refers to, if any
        asserted: False for checks that are only reported
    """

    name: str
    value: float
    limit: float
    step: Optional[int] = None
    asserted: bool = True

    @property
    def passed(self) -> bool:
        return self.value <= self.limit


class VerificationFailed(WeldedTreeError):
    """One or more asserted checks failed."""

    def __init__(self, failures: list[CheckResult]):
        self.failures = failures
        names = ", ".join(sorted({f.name for f in failures}))
        super().__init__(f"{len(failures)} check(s) failed: {names}")


@dataclass
class CheckTable:
    """Accumulates check results and summarizes them per name."""

    results: list[CheckResult] = field(default_factory=list)

    def add(
        self,
        name: str,
        value: float,
        limit: float,
        step: Optional[int] = None,
        asserted: bool = True,
    ) -> CheckResult:
        result = CheckResult(name, float(value), float(limit), step, asserted)
        self.results.append(result)
        return result

    def extend(self, results: Iterable[CheckResult]) -> None:
        self.results.extend(results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if r.asserted and not r.passed]

    @property
    def ok(self) -> bool:
        return not self.failures()

    def summary(self) -> list[tuple[str, float, float, bool, bool]]:
        """Per name: (name, worst value, its limit, all passed, asserted)."""
        worst: dict[str, CheckResult] = {}
        passed: dict[str, bool] = {}
        for r in self.results:
            current = worst.get(r.name)
            if current is None or r.value - r.limit > current.value - current.limit:
                worst[r.name] = r
            passed[r.name] = passed.get(r.name, True) and r.passed
        return [
            (name, r.value, r.limit, passed[name], r.asserted) for name, r in worst.items()
        ]

    def raise_on_failure(self) -> None:
        failures = self.failures()
        if failures:
            for f in failures[:10]:
                logger.error("check %s failed at step %s: %.3g > %.3g", f.name, f.step, f.value, f.limit)
            raise VerificationFailed(failures)
