"""Exception hierarchy shared by every layer of the simulator."""


class PingPongError(Exception):
    """Base class for all simulator errors."""


class InvalidState(PingPongError):
    """A state vector or density matrix violates its structural invariants."""


class NonUnitary(PingPongError):
    """An operator that must be unitary is not."""


class DegenerateState(PingPongError):
    """A forced measurement branch has (numerically) zero probability."""


class InvalidDistribution(PingPongError):
    """Weights that must form a probability distribution do not."""


class DomainError(PingPongError):
    """A scalar parameter lies outside its mathematical domain."""


class InsufficientData(PingPongError):
    """Too few samples for an estimator to be meaningful."""


class AuthFailure(PingPongError):
    """A public-channel message failed tag verification."""


class ChannelLoss(PingPongError):
    """The travel qubit never arrived."""


class ConfigError(PingPongError):
    """A scenario file is missing, malformed or out of domain.

    ``code`` is one of the class constants so callers can branch on the
    failure without parsing the message.
    """

    MISSING_FILE = 'missing_file'
    MALFORMED = 'malformed'
    UNKNOWN_ATTACK = 'unknown_attack'
    OUT_OF_DOMAIN = 'out_of_domain'
    BAD_SWEEP = 'bad_sweep'

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"
