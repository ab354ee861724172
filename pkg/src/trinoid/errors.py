"""Exception hierarchy. Every error carries a short ``kind`` tag used in JSON reports."""


class TrinoidError(Exception):
    kind = "error"

    def to_json(self):
        out = {"error": self.kind, "message": str(self)}
        out.update(getattr(self, "details", {}) or {})
        return out


class DomainError(TrinoidError, ValueError):
    kind = "domain"


class PoleError(DomainError):
    kind = "pole"


class SignAssumptionError(DomainError):
    kind = "sign-assumption"


class DegenerateInputError(TrinoidError, ValueError):
    kind = "degenerate-input"


class ParityError(TrinoidError, ValueError):
    kind = "parity-violation"


class ResonanceError(TrinoidError, ArithmeticError):
    kind = "resonance"

    def __init__(self, k, msg=None):
        self.k = k
        self.details = {"k": k}
        super().__init__(msg or f"U({k}) = 0: resonant exponent at k={k}")


class ConvergenceError(TrinoidError, ArithmeticError):
    kind = "convergence"

    def __init__(self, msg, partial=None, **details):
        self.partial = partial
        self.details = details
        super().__init__(msg)


class TruncationError(ConvergenceError):
    kind = "truncation"


class IntegrationError(TrinoidError, ArithmeticError):
    kind = "integration"

    def __init__(self, msg, location=None):
        self.location = location
        if location is not None:
            self.details = {"location": [location.real, location.imag]}
        super().__init__(msg)


class ReducibleError(TrinoidError, ArithmeticError):
    kind = "reducible"


class CertificationError(TrinoidError):
    kind = "certification-failure"


class SignConditionError(CertificationError):
    """Coefficient signs at t0 are not strict and equal."""

    kind = "sign-condition"
