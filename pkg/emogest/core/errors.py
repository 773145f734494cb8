""" Exception classes raised throughout emogest."""


class EmogestError(Exception):
    """ Base class of every error raised on purpose by this package."""
    pass


class InvalidInputError(EmogestError, ValueError):
    """ An argument has the wrong shape, range, or content."""

    @classmethod
    def shape_mismatch(cls, name, expected, actual):
        msg = "Shape '{}' of '{}' must match the expected shape '{}'"
        return cls(msg.format(tuple(actual), name, tuple(expected)))

    @classmethod
    def out_of_range(cls, name, value, low, high):
        msg = "'{}' is {} but must lie in [{}, {}]"
        return cls(msg.format(name, value, low, high))

    @classmethod
    def empty(cls, name):
        return cls("'{}' must not be empty".format(name))

    @classmethod
    def not_finite(cls, name):
        return cls("'{}' contains NaN or Inf values".format(name))


class SingularInputError(InvalidInputError):
    """ A rotation parameterization has no unique orthonormalization."""

    @classmethod
    def degenerate_rot6d(cls, which):
        msg = "6D rotation is degenerate: {} has (near) zero norm"
        return cls(msg.format(which))


class ConfigurationError(EmogestError):
    """ The configuration, corpus or checkpoint cannot support the request."""

    @classmethod
    def mismatch(cls, what, keys):
        msg = "{} does not match the expected configuration for: {}"
        return cls(msg.format(what, ', '.join(sorted(keys))))

    @classmethod
    def missing_factor(cls, factor, detail):
        msg = "No valid quadruple can be built: the {} factor is missing ({})"
        return cls(msg.format(factor, detail))

    @classmethod
    def unknown_key(cls, key, filename):
        msg = "Unknown configuration key '{}' in '{}'"
        return cls(msg.format(key, filename))


class NumericalError(EmogestError, ArithmeticError):
    """ A computation produced values that cannot be repaired."""

    @classmethod
    def non_finite_loss(cls, name, step):
        msg = "Loss '{}' became non-finite at step {}"
        return cls(msg.format(name, step))

    @classmethod
    def covariance(cls, detail):
        msg = "Feature covariance cannot be repaired: {}"
        return cls(msg.format(detail))
