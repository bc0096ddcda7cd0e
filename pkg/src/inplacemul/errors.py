"""Exception hierarchy shared by every kernel."""


class InplaceError(Exception):
    pass


class ZeroInverse(InplaceError, ZeroDivisionError):
    pass


class NoSuchRoot(InplaceError):
    pass


class ShapeMismatch(InplaceError, ValueError):
    pass


class OverlappingViews(InplaceError, ValueError):
    pass


class UnsupportedCharacteristic(InplaceError, ValueError):
    pass


class ParseError(InplaceError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ZeroRow(InplaceError, ValueError):
    def __init__(self, which, row):
        self.which = which
        self.row = row
        super().__init__(f"{which} has an all-zero row at index {row}")


class ZeroColumn(InplaceError, ValueError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"mu has an all-zero column at index {column}")


class RankDeficientPair(InplaceError, ValueError):
    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"column pair {pair} of mu2 does not have rank 2")


class SingularBlock(InplaceError, ValueError):
    pass
