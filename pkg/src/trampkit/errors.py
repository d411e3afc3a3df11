"""Exception hierarchy shared across the pipeline."""


class TrampkitError(Exception):
    """Base class for all trampkit errors."""


class UnknownCodeError(TrampkitError):
    """A skill code token is not present in the catalog."""

    def __init__(self, token: str):
        self.token = token
        super().__init__(f"unknown skill code: {token!r}")


class EmptyMaskError(TrampkitError):
    """An operation requiring foreground pixels received an empty mask."""


class DimensionMismatchError(TrampkitError):
    """Frame dimensions do not match the background model."""


class UninitialisedModelError(TrampkitError):
    """The background model has not seen any frame yet."""


class NoTrampolineError(TrampkitError):
    """No row of the frame matched the trampoline hue criteria."""


class TrackTooShortError(TrampkitError):
    """The centroid track has too few samples for minima detection."""


class SegmentationError(TrampkitError):
    """Bounce segmentation failed (fewer than two minima found)."""


class FullContactError(TrampkitError):
    """A segment has no contact-free frames."""


class PoseFormatError(TrampkitError):
    """A pose stream line could not be parsed."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class DegenerateGeometryError(TrampkitError):
    """Angle requested at (nearly) coincident points."""


class ZeroSeparationError(TrampkitError):
    """Shoulder separation never resolved over the routine."""


class FeatureError(TrampkitError):
    """Feature trajectory could not be computed."""


class ShapeMismatchError(TrampkitError):
    """Two trajectories have incompatible shapes."""


class EmptyReferenceSetError(TrampkitError):
    """Classification requested against an empty reference set."""


class InsufficientExamplesError(TrampkitError):
    """A skill does not have enough examples for the evaluation split."""

    def __init__(self, code: str, have: int, need: int):
        self.code = code
        super().__init__(f"skill {code}: {have} examples, need {need}")


class InvalidModelError(TrampkitError):
    """A synthetic skill motion model is malformed."""


class InputError(TrampkitError):
    """Bad user input to a CLI command (missing files, bad flags)."""
