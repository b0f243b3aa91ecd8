"""Exception hierarchy shared by all modules."""


class MvCheckError(Exception):
    """Base class for every error raised by the package."""


class LatticeError(MvCheckError, ValueError):
    """A lattice description failed validation.

    ``kind`` is one of ``malformed``, ``not-a-lattice``, ``not-distributive``,
    ``negation-not-de-morgan`` or ``negation-not-involutive``.
    """

    def __init__(self, kind, message):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class LatticeMismatchError(MvCheckError, ValueError):
    """Two values from different lattices were combined."""


class FormatError(MvCheckError, ValueError):
    """Malformed input text or file; carries an optional position."""

    def __init__(self, message, line=None, column=None, source=None):
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:{column}:" if column is not None else f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line
        self.column = column
        self.source = source


class FormulaError(FormatError):
    """Formula syntax error or reference to an unknown atom/constant."""


class ModelError(MvCheckError, ValueError):
    """A transition system, automaton or property is inconsistent."""


class AlphabetMismatchError(ModelError):
    """Automaton alphabet does not match the letters it is fed."""


class TerminalStateError(ModelError):
    """An omega-check met a reachable state without outgoing transitions."""

    def __init__(self, states):
        shown = ", ".join(map(str, list(states)[:5]))
        super().__init__(
            f"reachable terminal state(s) {shown}; "
            "use stutter completion to add self-loops")
        self.states = tuple(states)


class ResourceExhaustedError(MvCheckError, RuntimeError):
    """A construction exceeded its configured state budget."""
