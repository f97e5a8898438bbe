"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """An enumeration budget, table cap, or resource budget was exceeded.

    Raised before partial results are returned; callers can treat it as
    "this request is too large for the exact/desk-scale machinery".
    """


class NoSharedEdgeError(ValueError):
    """Two closed words have disjoint edge sets, so they cannot be merged."""
