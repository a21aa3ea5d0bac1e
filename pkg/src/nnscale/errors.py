"""Exception types shared across the package.

Grouped by the operation family that raises them; all inherit from
:class:`NnscaleError` so callers can catch package failures broadly.
"""


class NnscaleError(Exception):
    """Base class for all package-specific errors."""


# ---------------------------------------------------------------- operator


class EmptyIndexSet(NnscaleError):
    """No lattice node k/n falls inside the domain on some axis."""


class NonFiniteSample(NnscaleError):
    """A sampled function value is NaN or infinite."""


class DegenerateDenominator(NnscaleError):
    """The truncated kernel sum vanished even after widening the window."""


# ---------------------------------------------------------------- image I/O


class PnmError(NnscaleError):
    """Base class for Netpbm parse failures (I/O-class errors)."""


class MalformedHeader(PnmError):
    """Magic number, dimensions, or header tokens are invalid."""


class UnsupportedMaxval(PnmError):
    """The image declares a maxval other than 255."""


class TruncatedPayload(PnmError):
    """Fewer pixel bytes/tokens than the header promises."""


class FormatMismatch(NnscaleError):
    """Requested serialization format does not fit the channel count."""


class NotColor(NnscaleError):
    """A three-channel raster was required."""


class NotGrayscale(NnscaleError):
    """A single-channel raster was required."""


# ---------------------------------------------------------------- rescaling


class IndivisibleDims(NnscaleError):
    """Image dimensions are not divisible by the downscale factor."""


# ---------------------------------------------------------------- metrics


class DimMismatch(NnscaleError):
    """The two images do not share dimensions and channel count."""


class TooSmall(NnscaleError):
    """Image smaller than the metric's window."""


class NegativeFunction(NnscaleError):
    """A field value probed negative where non-negativity is required."""


# ---------------------------------------------------------------- analysis


class InvalidP(NnscaleError):
    """Norm exponent outside [1, inf]."""


class NonPositiveError(NnscaleError):
    """A rate fit received an error value that is zero or negative."""
