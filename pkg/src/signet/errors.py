"""Exception hierarchy.

``DataError`` subclasses describe problems with input data or with the state
the data leads to; the CLI maps them to exit code 2. ``UsageError`` subclasses
describe bad invocations and map to exit code 1.
"""


class SignetError(Exception):
    pass


class DataError(SignetError):
    pass


class UsageError(SignetError):
    pass


# graph-core
class ConflictingSign(DataError):
    def __init__(self, pair):
        super().__init__(f"conflicting signs for pair {pair}")
        self.pair = pair


class SelfLoop(DataError):
    def __init__(self, pair):
        super().__init__(f"self-loop on pair {pair}")
        self.pair = pair


class UnknownUser(DataError):
    def __init__(self, user):
        super().__init__(f"unknown user {user!r}")
        self.user = user


class InvalidSign(DataError):
    pass


class InvalidMask(DataError):
    pass


# data-io
class MalformedRecord(DataError):
    def __init__(self, line, reason=""):
        msg = f"malformed record at line {line}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.line = line


class NegativeCount(DataError):
    pass


class OutOfRangeScore(DataError):
    pass


class DuplicateRating(DataError):
    def __init__(self, user, item):
        super().__init__(f"duplicate rating for user {user!r}, item {item!r}")
        self.user = user
        self.item = item


class InfeasibleConfig(DataError):
    pass


# features
class MissingSource(DataError):
    pass


# learn
class DidNotConverge(DataError):
    def __init__(self, iterations, grad_norm):
        super().__init__(
            f"no convergence after {iterations} iterations (gradient norm {grad_norm:.3e})"
        )
        self.iterations = iterations
        self.grad_norm = grad_norm


class DegenerateDesign(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class EmptyData(DataError):
    pass


# eval
class TooFewExamples(DataError):
    pass


class SingleClass(DataError):
    pass


class LengthMismatch(DataError):
    pass


class InfeasibleSubsample(DataError):
    pass


# theory-stats
class DegenerateSamples(DataError):
    pass


class TooFewObservations(DataError):
    pass


class NoEligibleControl(DataError):
    pass


class TooFewPairs(DataError):
    pass


class TooFewUsers(DataError):
    pass


# cli
class UnknownVerb(UsageError):
    pass


class ConfigInvalid(UsageError):
    def __init__(self, field, reason):
        super().__init__(f"invalid config field {field!r}: {reason}")
        self.field = field
