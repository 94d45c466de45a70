"""Exception hierarchy shared by every module in the package."""


class SwarmFsaError(Exception):
    """Base class for all errors raised by this library."""


class CompositeModulus(SwarmFsaError):
    """Field modulus is neither 2 nor an odd prime."""


class ZeroInverse(SwarmFsaError):
    """Multiplicative inverse of 0 requested."""


class WidthMismatch(SwarmFsaError):
    """Byte string has the wrong width for the target field."""


class ParseError(SwarmFsaError):
    """Malformed line in a structured text input."""


class PartialTransition(SwarmFsaError):
    """Transition map is missing at least one (state, symbol) pair."""


class DuplicateTransition(SwarmFsaError):
    """Transition map defines the same (state, symbol) pair twice."""


class UnknownSymbol(SwarmFsaError):
    """Input symbol is not in the automaton alphabet."""


class MissingShares(SwarmFsaError):
    """All-agents reconstruction invoked with fewer than n share lists."""


class NotEnoughShares(SwarmFsaError):
    """Threshold reconstruction invoked with fewer than t+1 share lists."""


class FieldTooSmall(SwarmFsaError):
    """Field modulus must exceed the number of agents."""


class ThresholdViolation(SwarmFsaError):
    """Threshold scheme requires n > 2t >= 2."""


class DuplicateX(SwarmFsaError):
    """Interpolation points contain a repeated x-coordinate."""


class AgentNotInGroup(SwarmFsaError):
    """Agent asked to evaluate a group polynomial for a group it is outside of."""


class BadGroupSize(SwarmFsaError):
    """Seed-sharing group has the wrong cardinality for the scheme."""


class InvalidOneHot(SwarmFsaError):
    """Reconstructed secrets are not exactly one-hot; the run is corrupt."""


class NoFullSubset(SwarmFsaError):
    """No fully-responding subset of size t+1 is available for reconstruction."""


class TickOutOfRange(SwarmFsaError):
    """Corruption tick lies outside the simulated horizon."""


class InsufficientSamples(SwarmFsaError):
    """Statistical test invoked with too few view samples."""


class TooLargeToEnumerate(SwarmFsaError):
    """Exact distribution requested over more randomness than is enumerable."""


class StateFileCorrupt(SwarmFsaError):
    """Persisted state file fails validation."""
