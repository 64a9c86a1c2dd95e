"""Exception types raised by this package.

API-misuse problems (bad argument ranges, empty row lists) raise plain
ValueError; everything tied to data files, schemas or model files raises a
CartError subclass so callers can map them to exit codes in one place.
"""


class CartError(Exception):
    """Base class for data, schema and model errors."""


class ShapeError(CartError):
    """A dataset, row or cell has an impossible or mismatched shape."""


class BoundsError(CartError):
    """A row or column index lies outside the dataset."""


class ColumnNotFoundError(CartError):
    """A column name is absent from the header."""

    def __init__(self, name):
        super().__init__(f"column not found: {name!r}")
        self.name = name


class CsvFormatError(CartError):
    """A CSV file violates the expected record structure."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(CartError):
    """Column kinds/roles are inconsistent with the requested operation."""


class LabelError(CartError):
    """The success label cannot be derived from the given score column."""


class ModelFormatError(CartError):
    """Serialized model text does not conform to the model format."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            where = f"line {line}" if column is None else f"line {line}, col {column}"
            message = f"{message} ({where})"
        super().__init__(message)
        self.line = line
        self.column = column


class ModelVersionError(ModelFormatError):
    """Serialized model carries an unsupported format version."""
