"""Exception types shared across the package."""


class LocentError(Exception):
    """Base class for all locent errors."""


class InvalidAutomaton(LocentError):
    """Automaton failed normalization/range validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class SymbolOutOfRange(LocentError):
    pass


class SingularSystem(LocentError):
    """(I - M) could not be inverted to the required residual."""


class ZeroMassPrefix(LocentError):
    pass


class ZeroMassInfix(LocentError):
    pass


class NondeterministicUnsupported(LocentError):
    """Exact next-symbol/global entropy needs a deterministic automaton."""


class BudgetExceeded(LocentError):
    pass


class ZeroTotalMass(LocentError):
    pass


class SizesExceedCorpus(LocentError):
    pass


class SampleLengthCapExceeded(LocentError):
    pass


class InvalidWindowSize(LocentError):
    pass


class EmptyCorpusWindows(LocentError):
    pass


class ZeroProbabilityEvent(LocentError):
    pass


class DegenerateInput(LocentError):
    pass
