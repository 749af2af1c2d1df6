"""Spectra, degree certificates, branches and eigenpair maps for
L x + s N(x) = lambda C x on the unit sphere."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, SpherebranchError  # noqa: F401
