"""Kernel backend chosen at import: compiled Cython if built, numpy otherwise.

Set ``GSQC_BACKEND=python`` to force the numpy fallback.
"""

import os

BACKEND = "python"
if os.environ.get("GSQC_BACKEND", "").lower() != "python":
    try:
        from gsqc._kernels import csr_matmat, csr_matvec

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from gsqc._fallback import csr_matmat, csr_matvec

__all__ = ["BACKEND", "csr_matvec", "csr_matmat"]
