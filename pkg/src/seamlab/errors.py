"""Exception hierarchy shared by every module."""


class SeamlabError(Exception):
    """Base class for all toolkit errors."""


class PoleError(SeamlabError, ValueError):
    """Evaluation requested at a pole."""


class DomainError(SeamlabError, ValueError):
    """Argument outside the domain on which an operation is defined."""


class NonConvergent(SeamlabError, ArithmeticError):
    """Refinement budget exhausted before the error target was met."""


class DivergentTail(NonConvergent):
    """Sampled integrand tails grow instead of decaying."""


class OutsideStrip(SeamlabError, ValueError):
    """Transform evaluated outside its (measured) convergence strip."""

    def __init__(self, message, strip=None):
        super().__init__(message)
        self.strip = strip


class IndentationOverlap(SeamlabError):
    """Boundary zeros too close together (or to a corner) to indent disjointly."""


class NonRectifiable(SeamlabError):
    """Adaptive argument tracking exceeded its depth limit."""


class AmbiguousWinding(SeamlabError):
    """Total argument change is not close to a multiple of 2*pi."""


class PoleAtZeroOfPN(PoleError):
    """Seam ratio evaluated at a zero of the spectral determinant."""


class DegenerateUnit(SeamlabError, ValueError):
    """A normalizing unit vanishes where it must be zero-free."""


class ConfigError(SeamlabError, ValueError):
    """Invalid run configuration; carries the offending field and line."""

    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.field = field
        self.line = line
