"""Kitaev quantum wire: BdG spectra, Majorana profiles and lead transport."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
