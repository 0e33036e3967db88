"""Exception hierarchy shared by the whole package.

Three branches map onto the CLI exit codes: malformed files or mismatched
rasters (exit 2), data that cannot support the requested computation
(exit 3), and invalid parameters or configuration (exit 4).
"""


class VertsegError(Exception):
    """Base class for every error raised by this package."""


class FormatError(VertsegError, ValueError):
    """Malformed file content or incompatible raster shapes."""


class BadMagic(FormatError):
    """File does not start with the expected magic token."""


class BadHeader(FormatError):
    """Header tokens are missing, non-numeric, or out of range."""


class TruncatedData(FormatError):
    """Payload holds fewer bytes than the header promises."""


class DimensionMismatch(FormatError):
    """Operands do not share the required dimensions."""


class PaletteTooSmall(FormatError):
    """Palette lacks an entry for some label in the label map."""


class DataError(VertsegError, ValueError):
    """Input data cannot support the requested computation."""


class DegenerateData(DataError):
    """Fewer distinct values than clusters requested."""


class SingleClass(DataError):
    """Image is constant, so no threshold can separate two classes."""


class EmptyMask(DataError):
    """A mask required to be non-empty has no foreground."""


class EmptyInput(DataError):
    """An input collection required to be non-empty is empty."""


class ConfigError(VertsegError, ValueError):
    """Invalid parameter value or configuration entry."""


class SpecOverflow(ConfigError):
    """Requested phantom geometry does not fit on the canvas."""


class IndexOutOfRange(ConfigError):
    """Explicit cluster selection points past the last cluster."""


class MissingTruth(ConfigError):
    """Metrics were requested but no reference mask was supplied."""
