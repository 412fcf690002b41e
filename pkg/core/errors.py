class RankforgeError(Exception):
    """Base class for every error raised by rankforge."""


class LeadingZero(RankforgeError):
    pass


class InsufficientOrder(RankforgeError):
    def __init__(self, requested, available, what="series"):
        self.requested = requested
        self.available = available
        super().__init__(f"{what}: order {requested} requested but only known below {available}")


class NonIntegralExponent(RankforgeError):
    pass


class NonIntegralPrefix(RankforgeError):
    pass


class PoleAtTerm(RankforgeError):
    pass


class ZeroTheta(RankforgeError):
    pass


class UnknownTerm(RankforgeError):
    pass


class OutOfRange(RankforgeError):
    pass


class InsufficientTable(RankforgeError):
    pass


class Unsupported(RankforgeError):
    pass


class UnknownIdentity(RankforgeError):
    pass


class UnknownSeries(RankforgeError):
    pass


class ConfigError(RankforgeError):
    pass


class FixtureError(RankforgeError):
    pass
