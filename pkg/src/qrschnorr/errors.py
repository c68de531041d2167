"""Exception types raised across the package."""


class QrSchnorrError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(QrSchnorrError, ValueError):
    """Unsupported or malformed group parameters."""


class EntropyError(QrSchnorrError, RuntimeError):
    """The random source failed to produce output."""


class ParamsMismatchError(QrSchnorrError, ValueError):
    """A key was generated for a different parameter set."""


class RegistryError(QrSchnorrError):
    pass


class KeyConflictError(RegistryError):
    pass


class KeyNotFoundError(RegistryError, LookupError):
    pass


class StorageError(QrSchnorrError, OSError):
    """A file could not be read or written."""


class ProofDecodeError(QrSchnorrError, ValueError):
    """A proof document could not be turned back into a Proof."""


class ProofParseError(ProofDecodeError):
    pass


class ProofSchemaError(ProofDecodeError):
    pass


class ProofEncodingError(ProofDecodeError):
    pass


class QrCapacityError(QrSchnorrError, ValueError):
    pass


class QrDecodeError(QrSchnorrError, ValueError):
    pass
