"""Exception types shared across the package.

ConfigError maps to CLI exit code 2, DataError (and subclasses) to exit
code 3.
"""


class ConfigError(ValueError):
    """Invalid parameter or configuration value."""


class DataError(RuntimeError):
    """Input data is missing, unreadable, or inconsistent."""


class FormatError(DataError):
    """Structurally invalid input file (wrong shape, cross references)."""


class ParseError(DataError):
    """Unparseable content, with the offending location when known."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        if column is not None:
            where += f" (column {column})"
        super().__init__(f"{where}: {message}" if where else message)
