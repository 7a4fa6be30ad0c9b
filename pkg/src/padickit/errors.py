"""Exception hierarchy shared by every module."""


class PadicError(Exception):
    """Base class for library errors."""


class PrimeMismatchError(PadicError, ValueError):
    def __init__(self, p, q):
        super().__init__(f"prime mismatch: {p} != {q}")
        self.primes = (p, q)


class PrecisionError(PadicError, ArithmeticError):
    """The answer depends on digits that are not known."""


class PadicZeroDivisionError(PadicError, ZeroDivisionError):
    pass


class HypothesisError(PadicError, ValueError):
    """A mathematical precondition failed.

    ``hypothesis`` names the violated condition so front ends can report it.
    """

    def __init__(self, hypothesis, detail=""):
        msg = f"hypothesis violated: {hypothesis}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.hypothesis = hypothesis


class NormAxiomError(HypothesisError):
    def __init__(self, detail=""):
        super().__init__("oracle violates norm axioms", detail)


class ConvergenceError(HypothesisError):
    def __init__(self, detail=""):
        super().__init__("cannot certify convergence", detail)


class NoRootError(PadicError, ValueError):
    def __init__(self, reason):
        super().__init__(f"no root: {reason}")
        self.reason = reason


class NotAPowerError(PadicError, ValueError):
    """``|x|_p`` is not an n-th power of p, so x has no n-th root."""
