"""Exception types shared across the package."""


class ClusterGTError(Exception):
    """Base class for all library errors."""


class ScenarioError(ClusterGTError):
    """Malformed scenario input; carries file/line context when available."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(loc + message)
        self.path = path
        self.line = line


class TooManyUncertainEdges(ClusterGTError):
    """Exhaustive edge-realization enumeration would exceed the hard cap."""


class TooLarge(ClusterGTError):
    """Instance exceeds a documented size guard."""


class NotATree(ClusterGTError):
    """Ensemble violates the refinement (formation-tree) condition.

    ``levels`` holds the first offending 1-based level pair ``(i, i+1)``.
    """

    def __init__(self, level_a, level_b, detail=""):
        self.levels = (level_a, level_b)
        msg = f"levels {level_a} -> {level_b} are not a refinement"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class UnknownNode(ClusterGTError):
    """Requested cluster is not a node of the formation tree."""


class KMismatch(ClusterGTError):
    """Declared infection count does not match the oracle's ground truth."""


class SearchExhausted(ClusterGTError):
    """Matrix search hit its node budget before proving optimality.

    ``t_reached`` is the smallest row count for which a feasible (but not
    necessarily optimal) assignment was found, if any.
    """

    def __init__(self, t_reached=None):
        self.t_reached = t_reached
        super().__init__(f"search budget exhausted (best feasible T={t_reached})")


class UnrecognizedResultVector(ClusterGTError):
    """Observed test outcome is outside the decode table (model violation)."""


class PreconditionViolated(ClusterGTError):
    """Arguments fall outside an operation's stated precondition."""
