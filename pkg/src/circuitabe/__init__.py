"""Key-policy ABE for layered monotone boolean circuits, built on a leveled
multilinear-map abstraction with an insecure exponent-table reference
backend.  For verification, study, and reduction simulation only: nothing
in this package protects real data.
"""

from .circuit import AND, NOT, OR, Circuit, Gate
from .kpabe import NotSatisfied, decrypt, derive_wire, encrypt, keygen, setup
from .mlmap import ExponentBackend, GroupDescriptor, LevelledElement, group_setup
from .sizebound import BoundedBackend, BudgetExceeded, GrowthProfile, default_profile

__version__ = "0.1.0"

__all__ = [
    "AND",
    "NOT",
    "OR",
    "Circuit",
    "Gate",
    "NotSatisfied",
    "setup",
    "encrypt",
    "keygen",
    "decrypt",
    "derive_wire",
    "GroupDescriptor",
    "LevelledElement",
    "ExponentBackend",
    "group_setup",
    "GrowthProfile",
    "BoundedBackend",
    "BudgetExceeded",
    "default_profile",
    "__version__",
]
