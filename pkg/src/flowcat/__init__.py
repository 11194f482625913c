"""Finite flows: tensor products, limits, colimits and the internal hom."""

from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all
from .diagram import *  # noqa: F401,F403
from .diagram import __all__ as _diagram_all
from .hom import *  # noqa: F401,F403
from .hom import __all__ as _hom_all
from .monoidal import *  # noqa: F401,F403
from .monoidal import __all__ as _monoidal_all
from .pushout_product import *  # noqa: F401,F403
from .pushout_product import __all__ as _pp_all
from .textio import *  # noqa: F401,F403
from .textio import __all__ as _textio_all

__all__ = _core_all + _monoidal_all + _diagram_all + _hom_all + _pp_all + _textio_all
__version__ = "0.1.0"
