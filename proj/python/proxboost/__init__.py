from ._proxboost import *  # noqa: F401,F403
from ._proxboost import __doc__  # noqa: F401
