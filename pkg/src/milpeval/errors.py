"""Exception types shared across the toolkit.

Everything raised on purpose derives from MilpEvalError so callers can
catch toolkit failures without swallowing programming errors.
"""


class MilpEvalError(Exception):
    pass


class MalformedFile(MilpEvalError):
    """Instance file cannot be parsed. Carries 1-based line position."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(f"{message}{loc}")


class UnsupportedConstruct(MilpEvalError):
    """File is well-formed but uses a construct outside the linear MILP subset."""

    def __init__(self, construct, line=None):
        self.construct = construct
        self.line = line
        loc = f" (line {line})" if line is not None else ""
        super().__init__(f"unsupported construct: {construct}{loc}")


class UnknownFormat(MilpEvalError):
    pass


class EmptyGraph(MilpEvalError):
    pass


class NoEdges(MilpEvalError):
    pass


class EmptySample(MilpEvalError):
    pass


class InvalidBins(MilpEvalError):
    pass


class TooFewRows(MilpEvalError):
    pass


class InvalidK(MilpEvalError):
    pass


class EmptySet(MilpEvalError):
    pass


class EmptyTestSet(MilpEvalError):
    pass


class TooFewRecords(MilpEvalError):
    pass


class ZeroBaselineNodes(MilpEvalError):
    pass


class SolverNotFound(MilpEvalError):
    pass


class InvalidSolverConfig(MilpEvalError):
    pass


class UnknownParameter(MilpEvalError):
    pass


class UnrecognizedLog(MilpEvalError):
    pass


class EmptyTuningSet(MilpEvalError):
    pass


class UnknownStrategy(MilpEvalError):
    pass


class InvalidSpace(MilpEvalError):
    pass


class InvalidConfig(MilpEvalError):
    pass
