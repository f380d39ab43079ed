"""Evaluation backend selection.

The compiled kernel (``nandscape.kernels._native``, built from Cython) is used
when importable; otherwise the numpy backend takes over. Both produce
bit-identical truth tables, so simulation outputs do not depend on which one
is active. Set ``NANDSCAPE_BACKEND=python`` or ``=native`` to force a choice
(forcing ``native`` raises if the extension is missing).
"""

from __future__ import annotations

import os
import sys

from .plan import EvalPlan
from . import pure

__all__ = ["EvalPlan", "BACKEND", "evaluate_plan", "available_backends"]

_forced = os.environ.get("NANDSCAPE_BACKEND", "").strip().lower()

BACKEND = "python"
evaluate_plan = pure.evaluate_plan

if _forced in ("python", "pure"):
    pass
elif _forced in ("", "native"):
    # packed-word unpacking in the wrapper assumes little-endian layout
    if sys.byteorder == "little":
        try:
            from . import native as _native_mod

            BACKEND = "native"
            evaluate_plan = _native_mod.evaluate_plan
        except ImportError:
            if _forced == "native":
                raise
    elif _forced == "native":
        raise ImportError("native backend requires a little-endian platform")
else:
    raise ValueError(f"unknown NANDSCAPE_BACKEND value: {_forced!r}")


def available_backends() -> tuple[str, ...]:
    names = ["python"]
    try:
        from . import native  # noqa: F401

        names.append("native")
    except ImportError:
        pass
    return tuple(names)
