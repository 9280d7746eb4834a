"""Exception hierarchy shared by the kernel modules.

Negative answers of decision procedures (not derivable, not a member, not
realizable) are returned as ``None``/``False``; exceptions are reserved for
malformed input and violated preconditions.
"""


class KernelError(Exception):
    """Base class. ``path`` locates the offending node inside a tree, if any."""

    def __init__(self, message="", path=None):
        super().__init__(message)
        self.path = tuple(path) if path is not None else None

    def __str__(self):
        msg = super().__str__()
        if self.path is not None:
            loc = "/".join(str(i) for i in self.path) or "root"
            return f"{type(self).__name__} at node {loc}: {msg}"
        return f"{type(self).__name__}: {msg}"


class LengthMismatch(KernelError):
    pass


class UnboundVariable(KernelError):
    pass


class SizeMismatch(KernelError):
    pass


class NotInCategory(KernelError):
    pass


class Unsupported(KernelError):
    pass


class RuleDisabled(KernelError):
    pass


class ArityMismatch(KernelError):
    pass


class ContextClash(KernelError):
    pass


class MalformedNode(KernelError):
    pass


class UnknownConstant(KernelError):
    pass


class TermTypeError(KernelError, TypeError):
    pass


class UnknownAxiom(KernelError):
    pass


class NonDerivableSide(KernelError):
    pass


class NotDerivable(KernelError):
    pass


class SignatureMismatch(KernelError):
    pass


class NotPurelyFunctional(KernelError):
    pass


class StructureUnverified(KernelError):
    pass


class IndexOutOfRange(KernelError):
    pass


class ParseError(KernelError):
    pass
