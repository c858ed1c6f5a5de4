"""Cache-aware BFS recommendations, cache placement and hit-ratio experiments."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, schema_version  # noqa: F401
