"""Exception types shared across the package."""


class QReservoirError(Exception):
    """Base class for errors raised by this package."""


class CapacityError(QReservoirError):
    """Requested register size exceeds what dense simulation supports."""


class InvalidChannelError(QReservoirError):
    """Kraus operators fail the completeness relation."""


class CorruptedStateError(QReservoirError):
    """Density matrix diagonal is no longer a usable probability vector."""


class DivergenceError(QReservoirError):
    """Recurrently generated target series left its bounded regime."""


class ProfileError(QReservoirError):
    """Noise profile file is malformed or inconsistent."""


class ConfigError(QReservoirError):
    """Experiment configuration is malformed or inconsistent."""
