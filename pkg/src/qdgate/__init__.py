"""Three-qubit controlled-phase gate on coupled quantum dots."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("qdgate")
except PackageNotFoundError:
    __version__ = "0.0.0"
