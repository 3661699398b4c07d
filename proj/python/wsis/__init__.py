"""Wind-plus-storage system simulator with hierarchical learning control.

The compiled extension `_wsis` carries the full surface; this package simply
re-exports it.
"""

from ._wsis import *  # noqa: F401,F403
from ._wsis import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
