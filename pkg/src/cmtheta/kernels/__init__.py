"""Backend selection for the theta summation kernel.

The compiled extension is used when present; setting CMTHETA_DISABLE_EXT in
the environment (to any nonempty value) forces the numpy fallback.
"""

import os

from . import reference

if os.environ.get("CMTHETA_DISABLE_EXT"):
    _impl = reference
else:
    try:
        from . import _speed as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = reference

theta_sum = _impl.theta_sum
BACKEND = _impl.BACKEND


def backend_name() -> str:
    return BACKEND
