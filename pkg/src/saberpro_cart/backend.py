"""Split-kernel backend selection.

Two interchangeable implementations of the hot split-search kernels exist:

* ``saberpro_cart._core`` -- compiled (Cython) extension, built at install
  time when a C toolchain is available;
* ``saberpro_cart._core_py`` -- pure-Python fallback, always available.

Both expose ``numeric_best`` and ``categorical_best`` with the same signature
and are required to return bit-identical results; the compiled one is simply
faster.  Selection happens once at import, preferring the compiled module.
The ``SABERPRO_CART_BACKEND`` environment variable (``auto``, ``compiled``
or ``python``) overrides the default, and :func:`set_backend` /
:func:`use_backend` switch at runtime (mainly for benchmarks and tests).
"""

from __future__ import annotations

import contextlib
import os

from . import _core_py

try:  # pragma: no cover - exercised only when the extension failed to build
    from . import _core
except ImportError:  # pragma: no cover
    _core = None

COMPILED = "compiled"
PYTHON = "python"

_MODULES = {PYTHON: _core_py}
if _core is not None:
    _MODULES[COMPILED] = _core


def available_backends() -> tuple[str, ...]:
    """Names of the backends importable in this installation."""
    names = [PYTHON]
    if _core is not None:
        names.insert(0, COMPILED)
    return tuple(names)


def _initial() -> str:
    choice = os.environ.get("SABERPRO_CART_BACKEND", "auto").strip().lower()
    if choice == COMPILED:
        if _core is None:
            raise ImportError(
                "SABERPRO_CART_BACKEND=compiled but the compiled extension "
                "is not installed"
            )
        return COMPILED
    if choice == PYTHON:
        return PYTHON
    if choice not in ("", "auto"):
        raise ValueError(
            f"unknown SABERPRO_CART_BACKEND value {choice!r}; "
            "expected 'auto', 'compiled' or 'python'"
        )
    return COMPILED if _core is not None else PYTHON


_active = _initial()


def active_backend() -> str:
    """Name of the backend currently in use."""
    return _active


def set_backend(name: str) -> None:
    """Switch kernels to *name* (one of :func:`available_backends`)."""
    global _active
    if name not in _MODULES:
        raise ValueError(
            f"backend {name!r} not available; have {available_backends()}"
        )
    _active = name


@contextlib.contextmanager
def use_backend(name: str):
    """Context manager running the enclosed code on backend *name*."""
    previous = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def kernels():
    """The module providing ``numeric_best`` / ``categorical_best``."""
    return _MODULES[_active]
