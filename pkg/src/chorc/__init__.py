"""chorc: semantics, projection and verification of loop-free global choreographies."""
from .ast import ChorError, Cho, ControlPoint, GChor, Interaction, Par, Seq, Zero
from .syntax import ChorSyntaxError, parse, pretty
from .semantics import Defined, Undefined, sem

__all__ = ["ChorError", "ChorSyntaxError", "Cho", "ControlPoint", "Defined", "GChor",
           "Interaction", "Par", "Seq", "Undefined", "Zero", "parse", "pretty", "sem"]
__version__ = "0.1.0"
