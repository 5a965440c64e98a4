"""Exception hierarchy shared across the package."""


class OmnispanError(Exception):
    """Base class for every error raised by this package."""


class NonPositiveSpacing(OmnispanError, ValueError):
    """Wheel-group spacing d must be strictly positive."""


class NonPositiveMass(OmnispanError, ValueError):
    """Wheel-group masses must be strictly positive."""


class NonPositiveDt(OmnispanError, ValueError):
    """Time step must be strictly positive."""


class SlipInconsistency(OmnispanError, ValueError):
    """Fixed-spacing drive commanded with unequal lateral group speeds.

    With the spacing held constant, any difference between the left and
    right lateral speeds has nowhere to go but wheel slip.
    """


class SpacingOutOfRange(OmnispanError, ValueError):
    """Spacing outside the rig's mechanical [d_min, d_max] range."""


class DegenerateRoller(OmnispanError, ValueError):
    """A roller angle too close to 90 degrees: the wheel cannot transmit drive."""


class SingularConfiguration(OmnispanError, ValueError):
    """The wheel-to-body map is singular for this roller pattern and spacing."""


class BadWheelIndex(OmnispanError, IndexError):
    """Wheel index outside 1..4."""


class ModeMismatch(OmnispanError, RuntimeError):
    """Operation not valid in the configured simulation mode."""


class UnknownScript(OmnispanError, ValueError):
    """Unrecognized or empty command script."""


class EmptyLog(OmnispanError, ValueError):
    """Metric extraction requires at least one log row."""


class IoFailure(OmnispanError, OSError):
    """Log or config file could not be read or written."""


class ConfigError(OmnispanError, ValueError):
    """Malformed configuration document."""


class PortUnavailable(OmnispanError, OSError):
    """The requested service port could not be bound."""


class MalformedMessage(OmnispanError, ValueError):
    """A wire message did not parse or failed schema validation."""


class DriverSlotBusy(OmnispanError, RuntimeError):
    """A second connection tried to claim the single driver slot."""
