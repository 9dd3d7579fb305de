"""Exception types raised across the package."""


class SumCompError(ValueError):
    pass


class NotCoprime(SumCompError):
    pass


class EmptyLambda(SumCompError):
    pass


class ValueNotRepresentable(SumCompError):
    pass


class NotPerfectSquare(SumCompError):
    pass


class UnknownPreset(SumCompError):
    pass


class DegenerateConstellation(SumCompError):
    pass


class ZeroChannel(SumCompError):
    pass


class ZeroTrueValue(SumCompError):
    pass


class OutOfAsymptoticRegime(SumCompError):
    pass


class ConfigError(SumCompError):
    pass
