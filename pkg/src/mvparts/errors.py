"""Exception types raised across the package."""


class MVPartsError(Exception):
    """Base class for all package-specific errors."""


# --- geometry ---

class PointAtInfinity(MVPartsError):
    """Homogeneous depth component is (numerically) zero."""


class DegenerateBaseline(MVPartsError):
    """Camera centers coincide; no fundamental matrix exists."""


class NullLine(MVPartsError):
    """Epipolar line is undefined (the point is the epipole)."""


class InsufficientViews(MVPartsError):
    """Fewer than two observations for triangulation."""


class IllConditioned(MVPartsError):
    """Linear triangulation system is numerically degenerate."""


# --- model / serialization ---

class ParseError(MVPartsError):
    """Model or config file could not be parsed."""


class InvariantViolation(MVPartsError):
    """A structural invariant failed; the message names it."""

    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}" if detail else invariant)


class OutOfBounds(MVPartsError):
    """A part position falls outside the score-map extent."""


# --- features ---

class TooSmall(MVPartsError):
    """Image smaller than the minimum feature extent."""


class ChannelMismatch(MVPartsError):
    """Filter channel count differs from the feature channel count."""


# --- distance transform ---

class NonConcave(MVPartsError):
    """Quadratic deformation coefficient is not strictly negative."""


# --- inference ---

class EmptyModel(MVPartsError):
    """Model has no parts or no score maps were supplied."""


class GridMismatch(MVPartsError):
    """Augment grids do not match the score-map grids."""


class LengthMismatch(MVPartsError):
    """Per-part vectors have inconsistent lengths."""


class NoDetection(MVPartsError):
    """A view produced no candidate above the detection threshold."""

    def __init__(self, view):
        self.view = view
        super().__init__(f"no detection in view {view!r}")


# --- learning ---

class EmptyErrors(MVPartsError):
    """A part has no error samples to take a median over."""


class InsufficientSamples(MVPartsError):
    """Fewer samples than clusters requested."""


class EmptyGroup(MVPartsError):
    """A (part, type) group has no training patches."""


# --- evaluation ---

class ZeroLengthGT(MVPartsError):
    """Ground-truth segment has zero length."""


class NoCandidates(MVPartsError):
    """A view has no pose candidates to fuse."""

    def __init__(self, view):
        self.view = view
        super().__init__(f"no candidates for view {view!r}")


# --- synthesis / config ---

class ConfigInvalid(MVPartsError):
    """Scene or run configuration failed validation."""
