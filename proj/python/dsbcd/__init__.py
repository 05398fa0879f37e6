from ._dsbcd import *  # noqa: F401,F403
