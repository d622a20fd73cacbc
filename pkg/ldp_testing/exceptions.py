class LDPTestingError(Exception):
    """Base class of every error raised by ldp_testing"""


class AlphabetError(LDPTestingError, ValueError):
    """Alphabet size or symbol index outside what an operation accepts"""


class DistributionError(LDPTestingError, ValueError):
    """Probability vector that is negative, unnormalized or zero where division needs it"""


class MechanismMismatch(LDPTestingError, ValueError):
    """Privatized batch produced by a different mechanism than the consumer expects"""


class OutputSpaceTooLarge(LDPTestingError, ValueError):
    """Explicit enumeration requested beyond its size cutoff"""


class ConfigError(LDPTestingError, ValueError):
    """Invalid experiment configuration, instance spec or input file"""


class ContractViolation(LDPTestingError):
    """An internal postcondition or a caller-side precondition of a statistic broke"""


__all__ = (
    'AlphabetError',
    'ConfigError',
    'ContractViolation',
    'DistributionError',
    'LDPTestingError',
    'MechanismMismatch',
    'OutputSpaceTooLarge',
)
