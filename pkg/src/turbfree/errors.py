"""Exception hierarchy.

Every error raised on bad input data derives from :class:`TFIError`, which
lets the CLI map data problems to exit code 1 without catching programming
errors.
"""


class TFIError(Exception):
    """Base class for all data errors raised by turbfree."""


class EmptyStack(TFIError):
    def __init__(self):
        super().__init__("frame stack is empty (m must be >= 1)")


class ShapeMismatch(TFIError):
    """Frame (1-based ``frame_index``) disagrees with the first frame's shape."""

    def __init__(self, frame_index, detail=""):
        self.frame_index = frame_index
        msg = f"frame {frame_index} does not match the stack shape"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class CountOutOfRange(TFIError):
    def __init__(self, frame_index, pixel_index, value, bit_depth):
        self.frame_index = frame_index
        self.pixel_index = pixel_index
        super().__init__(
            f"frame {frame_index}, sample {pixel_index}: count {value} "
            f"outside [0, {2 ** bit_depth - 1}] for {bit_depth}-bit data"
        )


class CCNeedsTwoFrames(TFIError):
    def __init__(self, m):
        super().__init__(f"cross-correlation mode needs at least 2 frames, got {m}")


class NotColor(TFIError):
    def __init__(self, channels):
        super().__init__(f"colour reconstruction needs 3 channels, got {channels}")


class BadDimensions(TFIError):
    pass


class BadMagic(TFIError):
    pass


class TruncatedPayload(TFIError):
    pass


class UnsupportedBitDepth(TFIError):
    pass


class NoFrames(TFIError):
    pass


class UnsupportedFormat(TFIError):
    pass


class ConfigError(TFIError):
    pass
