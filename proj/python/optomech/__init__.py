"""Linearized cavity optomechanics: spectra, pulse responses and fits.

Thin re-export of the compiled module. All frequencies are angular (rad/s);
multiply plain Hz by 2*pi on the way in.
"""

from ._optomech import *  # noqa: F401,F403
from ._optomech import __version__  # noqa: F401
