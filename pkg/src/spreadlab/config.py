"""Global enumeration cap.

Every routine that materialises a point set or an element list checks its
size against the cap first. The cap can be overridden with the
``SPREADLAB_CAP`` environment variable or temporarily with :func:`cap`.
"""

import os
from contextlib import contextmanager

DEFAULT_CAP = 10**6

_override = None


class CapExceeded(ValueError):
    """Raised when an enumeration would exceed the configured cap."""


def get_cap() -> int:
    if _override is not None:
        return _override
    env = os.environ.get("SPREADLAB_CAP")
    if env:
        return int(env)
    return DEFAULT_CAP


def check_cap(count: int, what: str = "enumeration") -> None:
    limit = get_cap()
    if count > limit:
        raise CapExceeded(f"{what} of size {count} exceeds cap {limit}")


@contextmanager
def cap(value: int):
    global _override
    old = _override
    _override = value
    try:
        yield
    finally:
        _override = old
