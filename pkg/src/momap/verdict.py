"""Pass/fail results with residual localization, shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass, field


class PreconditionError(ValueError):
    """An operation was called on data violating its stated precondition."""

    def __init__(self, message: str, failure: Failure | None = None):
        super().__init__(message)
        self.failure = failure


class CrossCheckError(AssertionError):
    """Two independent routes disagreed; always a bug, never a user error."""


@dataclass(frozen=True)
class Failure:
    """One violated identity.

    ``where`` holds 0-based basis indices (a tuple) or a short label;
    ``residual`` is the nonzero left-minus-right value.
    """

    check: str
    where: tuple = ()
    residual: object = None
    detail: str = ""

    def describe(self) -> str:
        loc = ",".join(str(i + 1) for i in self.where) if isinstance(self.where, tuple) else str(self.where)
        text = f"{self.check}"
        if loc:
            text += f" at ({loc})"
        if self.residual is not None:
            text += f": residual {self.residual}"
        if self.detail:
            text += f" [{self.detail}]"
        return text


@dataclass
class Verdict:
    name: str
    failures: list = field(default_factory=list)
    certificates: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok

    def fail(self, check: str, where=(), residual=None, detail: str = "") -> None:
        self.failures.append(Failure(check, where, residual, detail))

    def extend(self, other: Verdict) -> Verdict:
        self.failures.extend(other.failures)
        self.certificates.update(other.certificates)
        return self

    def failed_checks(self) -> set:
        return {f.check for f in self.failures}

    def summary(self) -> str:
        if self.ok:
            return f"{self.name}: ok"
        return f"{self.name}: FAILED " + "; ".join(f.describe() for f in self.failures)
