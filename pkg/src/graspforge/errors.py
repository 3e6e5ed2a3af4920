"""Exception types shared across the package."""


class GraspForgeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GraspForgeError):
    """A mesh or document file could not be parsed."""


class EmptyMesh(GraspForgeError):
    """A mesh has no valid triangles after cleanup."""


class EmptySamples(GraspForgeError):
    """An operation requires at least one surface sample point."""


class DegenerateSet(GraspForgeError):
    """A point set is collinear or coincident, so principal axes are undefined."""


class NoCollisionFreeStandoff(GraspForgeError):
    """No collision-free wrist placement was found after clearance escalation."""


class NonFinite(GraspForgeError):
    """Optimization produced a NaN or infinite loss or gradient."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class InvalidTiming(GraspForgeError):
    """Sequence timing has non-positive phase durations or frame rate."""


class ManifestError(GraspForgeError):
    """A dataset manifest is unreadable or structurally invalid."""
