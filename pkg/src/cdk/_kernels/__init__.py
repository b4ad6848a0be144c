"""Batch evaluation kernels for compiled expression programs.

The compiled Cython kernel is used when it has been built; otherwise the
pure-Python interpreter in :mod:`cdk._kernels.pure` is selected.  Setting
``CDK_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import pure

BACKEND = "python"
run_program = pure.run_program

if not os.environ.get("CDK_PURE_PYTHON"):
    try:
        from . import _evalcore
    except ImportError:  # extension not built
        _evalcore = None
    else:
        run_program = _evalcore.run_program
        BACKEND = "cython"


def backends():
    """Available ``name -> run_program`` pairs, fallback first."""
    out = {"python": pure.run_program}
    try:
        from . import _evalcore as core
    except ImportError:
        return out
    out["cython"] = core.run_program
    return out
