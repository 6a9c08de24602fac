"""Exception hierarchy. The CLI prints the class name of any HGBSError."""


class HGBSError(Exception):
    pass


class ModulusMismatch(HGBSError):
    pass


class DivisionByZero(HGBSError, ZeroDivisionError):
    pass


class DuplicateAbscissa(HGBSError):
    pass


class InsufficientShares(HGBSError):
    pass


class DuplicateOwner(HGBSError):
    pass


class AsymmetricResult(HGBSError):
    pass


class IdWidthExceedsField(HGBSError):
    pass


class OutOfRange(HGBSError):
    pass


class OrderOutOfRange(HGBSError):
    pass


class GridMismatch(HGBSError):
    pass


class SameNode(HGBSError):
    pass


class OrderTruncated(HGBSError):
    pass


class NoRelayExists(HGBSError):
    pass


class ParamDomain(HGBSError, ValueError):
    pass


class ZoneOutOfRange(HGBSError):
    pass


class FormatError(HGBSError):
    """Deployment document is malformed or has an unknown format_version."""
