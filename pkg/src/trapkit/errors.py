"""Exception hierarchy shared by every trapkit module."""


class TrapkitError(Exception):
    """Base class for all trapkit errors."""


class ParseError(TrapkitError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class ValidationError(TrapkitError, ValueError):
    """A value violates a type invariant (index range, free-BDD property, ...)."""

    def __init__(self, message, component=None):
        self.component = component
        prefix = f"component {component}: " if component is not None else ""
        super().__init__(prefix + message)


class GuardError(TrapkitError):
    """A size guard was exceeded; the message names the guard."""

    def __init__(self, guard, limit, actual, hint=None):
        self.guard = guard
        self.limit = limit
        self.actual = actual
        msg = f"{guard} guard exceeded ({actual} > {limit})"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)


class BudgetExceeded(TrapkitError):
    """The generic backtracking search ran out of its assignment budget."""

    def __init__(self, budget, component=None):
        self.budget = budget
        self.component = component
        where = f" on component {component}" if component is not None else ""
        super().__init__(f"search budget of {budget} assignments exceeded{where}")


class IntegrityError(TrapkitError):
    """A double-DNF local has phi0(x) == phi1(x) at some input x."""

    def __init__(self, component, config):
        self.component = component
        self.config = config
        which = f" of component {component}" if component is not None else ""
        super().__init__(f"double-DNF{which} is inconsistent at {config}")
