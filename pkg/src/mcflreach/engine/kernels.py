"""Kernel selection: the compiled extension when present, else pure Python."""

from __future__ import annotations

from . import _saturate_py

try:
    from . import _saturate_cy
except ImportError:  # extension not built
    _saturate_cy = None

_KERNELS = {"py": _saturate_py}
if _saturate_cy is not None:
    _KERNELS["cy"] = _saturate_cy


def available_kernels() -> tuple[str, ...]:
    return tuple(sorted(_KERNELS))


def default_kernel() -> str:
    return "cy" if "cy" in _KERNELS else "py"


def get_kernel(name: str | None = None):
    if name is None:
        name = default_kernel()
    try:
        return _KERNELS[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel {name!r}; available: {available_kernels()}"
        ) from None
