from ._version import __version__  # noqa
from .core import Pipeline, RunConfig  # noqa
