"""Hot kernels, compiled when available.

The Cython build (``_ckernels``) is used unless it is missing or the
environment variable ``EXEDEC_LAB_PURE_PYTHON`` is set to a non-empty value,
in which case the pure-Python fallback in ``_pykernels`` is loaded.
``BACKEND`` names the implementation that was picked.
"""

import os

if os.environ.get("EXEDEC_LAB_PURE_PYTHON"):
    from ._pykernels import common_prefix, lcs_length, levenshtein, scanl1, zip_with

    BACKEND = "python"
else:
    try:
        from ._ckernels import common_prefix, lcs_length, levenshtein, scanl1, zip_with

        BACKEND = "cython"
    except ImportError:
        from ._pykernels import common_prefix, lcs_length, levenshtein, scanl1, zip_with

        BACKEND = "python"

__all__ = ["BACKEND", "common_prefix", "lcs_length", "levenshtein", "scanl1", "zip_with"]
