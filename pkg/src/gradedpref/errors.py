"""Exception hierarchy shared by every module of the package."""


class GradedPrefError(Exception):
    """Base class for all errors raised by gradedpref."""


class InvalidCardinality(GradedPrefError, ValueError):
    pass


class UnknownElement(GradedPrefError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown element"


class ChainValidationError(GradedPrefError, ValueError):
    """A custom monoid table breaks one of the MTL-chain laws.

    ``law`` names the failed law and ``witness`` holds the offending labels.
    """

    def __init__(self, law, witness):
        self.law = law
        self.witness = tuple(witness)
        super().__init__(f"{law} fails at {self.witness}")


class FormulaSyntaxError(GradedPrefError, ValueError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class ZeroStrictCut(FormulaSyntaxError):
    pass


class DegenerateCut(GradedPrefError, ValueError):
    pass


class NestingViolation(GradedPrefError, ValueError):
    pass


class ModelError(GradedPrefError, ValueError):
    pass


class UnboundVariable(ModelError):
    pass


class UnsupportedModality(ModelError):
    pass


class NotAnEquivalence(ModelError):
    pass


class LayeredModelError(ModelError):
    pass


class BudgetExceeded(GradedPrefError, RuntimeError):
    def __init__(self, cardinality, budget):
        self.cardinality = cardinality
        self.budget = budget
        super().__init__(
            f"exhaustive enumeration needs {cardinality} candidates, budget is {budget}"
        )


class NotExpressible(GradedPrefError, ValueError):
    pass


class ProofFormatError(GradedPrefError, ValueError):
    pass


class DocumentError(GradedPrefError, ValueError):
    pass
