"""Hot-kernel backend selection.

The compiled Cython core is picked up when built; otherwise the numpy
fallback is used.  Override with CIPFLOW_KERNELS=python|compiled.
"""

import os

_choice = os.environ.get("CIPFLOW_KERNELS", "auto")
if _choice not in ("auto", "python", "compiled"):
    raise RuntimeError(f"CIPFLOW_KERNELS must be auto, python or compiled, got {_choice!r}")

if _choice == "python":
    from . import _kernels_numpy as _impl
    backend = "python"
else:
    try:
        from . import _kernels as _impl
        backend = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        from . import _kernels_numpy as _impl
        backend = "python"

conv_volume = _impl.conv_volume
face_jump = _impl.face_jump
boundary_normal = _impl.boundary_normal
