"""Exception types raised across the package."""


class AdaspecError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(AdaspecError, ValueError):
    pass


class ZeroEnergyRegionError(AdaspecError, ValueError):
    """Raised when a spectrogram region sums to zero and cannot be normalized."""


class InfeasiblePlanError(AdaspecError, ValueError):
    """Raised when a window/hop pair of an analysis plan is not a frame."""


class InvalidSegmentError(AdaspecError, ValueError):
    pass


class NotAFrameError(AdaspecError, ValueError):
    """Raised when the overlap-add denominator vanishes inside the reconstructed span."""

    def __init__(self, sample, value):
        self.sample = int(sample)
        self.value = float(value)
        super().__init__(
            f"synthesis denominator {self.value:.3g} below floor at sample {self.sample}"
        )


class WavParseError(AdaspecError, ValueError):
    def __init__(self, message, offset):
        self.offset = int(offset)
        super().__init__(f"{message} (byte offset {self.offset})")


class UnsupportedFormatError(AdaspecError, ValueError):
    pass
