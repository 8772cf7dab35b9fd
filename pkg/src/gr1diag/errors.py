"""Exception hierarchy shared across the toolchain."""


class Gr1DiagError(Exception):
    """Base class for all errors raised by this package."""


class SpecSyntaxError(Gr1DiagError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line
        self.msg = msg


class UndeclaredProposition(SpecSyntaxError):
    def __init__(self, name: str, line: int):
        super().__init__(line, f"undeclared proposition '{name}'")
        self.name = name


class NextInInitOrGoal(SpecSyntaxError):
    def __init__(self, line: int):
        super().__init__(line, "next() is not allowed in initial conditions or liveness goals")


class UndeclaredRegion(Gr1DiagError):
    pass


class UnknownStatementId(Gr1DiagError):
    pass


class UnknownGoal(Gr1DiagError):
    pass


class NotDeadlocked(Gr1DiagError):
    pass


class NotUnsat(Gr1DiagError):
    pass


class ResourceLimit(Gr1DiagError):
    pass


class AnalysisTimeout(Gr1DiagError):
    def __init__(self, phase: str, budget_ms: int):
        super().__init__(f"analysis exceeded {budget_ms} ms during {phase}")
        self.phase = phase
        self.budget_ms = budget_ms


class StateSpaceTooLarge(Gr1DiagError):
    pass


class SpecRealizable(Gr1DiagError):
    pass


class EnvLivenessUnsupported(Gr1DiagError):
    pass


class NotUnsynthesizable(Gr1DiagError):
    pass


class GoalNotPrevented(Gr1DiagError):
    pass


class DepthExhausted(Gr1DiagError):
    pass


class NotUnsatAtDepth(Gr1DiagError):
    pass


class SessionNotFound(Gr1DiagError):
    pass


class MalformedMove(Gr1DiagError):
    pass
