"""Exception hierarchy shared by all ddqpc modules."""


class DDQPCError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(DDQPCError, ValueError):
    """An input violates a documented precondition (bad coupling, angle, grid...)."""


class NumericalError(DDQPCError, ArithmeticError):
    """A computation produced or received values it cannot handle."""


class NonPhysicalStateError(NumericalError):
    """A density matrix fails positivity or trace checks beyond roundoff.

    ``indices`` lists the offending grid positions when the check ran over a
    trajectory, and is empty for single states.
    """

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(int(i) for i in indices)


class SingularPointError(NumericalError):
    """Evaluation requested exactly at a removable or essential singularity."""


class SweepError(NumericalError):
    """One or more sweep cells failed; ``failures`` holds ``(coords, exc)`` pairs."""

    def __init__(self, failures):
        self.failures = list(failures)
        lines = [f"{len(self.failures)} sweep cell(s) failed:"]
        for (alpha, theta, phi), exc in self.failures:
            lines.append(f"  alpha={alpha!r} theta={theta!r} phi={phi!r}: {exc}")
        super().__init__("\n".join(lines))
