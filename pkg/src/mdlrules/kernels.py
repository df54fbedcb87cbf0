"""Backend selection for the search kernels.

The compiled extension is used when it was built; set ``MDLRULES_PURE_PYTHON=1``
to force the numpy fallback. Both return identical results.
"""
import importlib
import os

from . import _fallback

BACKENDS = ("cython", "python")


def load(name: str):
    if name == "python":
        return _fallback
    if name == "cython":
        return importlib.import_module("mdlrules._kernels")
    raise ValueError(f"unknown backend {name!r}")


def available() -> list[str]:
    names = []
    for name in BACKENDS:
        try:
            load(name)
        except ImportError:
            continue
        names.append(name)
    return names


if os.environ.get("MDLRULES_PURE_PYTHON"):
    BACKEND = "python"
    impl = _fallback
else:
    try:
        impl = load("cython")
        BACKEND = "cython"
    except ImportError:
        impl = _fallback
        BACKEND = "python"

class_counts = impl.class_counts
subtract_and_count = impl.subtract_and_count
block_lengths = impl.block_lengths
