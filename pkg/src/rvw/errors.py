"""Exception types raised across the toolkit."""


class RvwError(Exception):
    """Base class for all toolkit errors."""


# --- raster / file I/O ---

class UnsupportedFormat(RvwError):
    """Image file format, bit depth, or channel layout is not supported."""


class MalformedHeader(RvwError):
    """A file or embedded header failed to parse."""


# --- geometry / arithmetic contracts ---

class DimensionMismatch(RvwError):
    """Operands do not share the required dimensions."""


class RoiOutOfBounds(RvwError):
    """ROI rectangle does not lie inside the owning plane."""


class RangeViolation(RvwError):
    """A pixel sum left the 0..255 range where that signals corrupt inputs."""


# --- spectral core ---

class InvalidSigma(RvwError):
    """Gaussian kernel width must be positive."""


class EigenFailure(RvwError):
    """Symmetric eigendecomposition did not converge."""


class SolveFailure(RvwError):
    """A per-block linear system could not be solved."""


# --- codec ---

class QpOutOfRange(RvwError):
    """Quantization parameter outside 0..51."""


class BadTemplate(RvwError):
    """Low-resolution transform template index outside the fixed bank."""


class EncodeOverflow(RvwError):
    """A coefficient level exceeded the binarization cap."""


class CorruptStream(RvwError):
    """An entropy-coded or serialized stream failed to parse."""


class CrcMismatch(RvwError):
    """Packet checksum does not match its contents."""


class UnsupportedVersion(RvwError):
    """Packet version byte is unknown."""


# --- reversible data hiding ---

class CapacityExceeded(RvwError):
    """Payload does not fit the histogram-shift capacity of the cover region."""


class NoZeroBin(RvwError):
    """Cover histogram has no empty bin to shift into."""


class NoCoverRegion(RvwError):
    """No usable non-ROI cover pixels (ROI covers the image or the reserve)."""


class BadVersion(RvwError):
    """Embedded reserve header carries an unknown version."""
