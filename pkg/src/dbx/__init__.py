"""Double-base binary expansions, univoque base pairs and their symbolic images."""
from .errors import DomainError, NumericError, PreconditionError
from .expand import BasePair, Mode, Region, run_algorithm
from .phimap import phi_forward, phi_inverse
from .seqcore import EpSeq
from .verdict import Tri, Verdict

__version__ = "0.1.0"

__all__ = [
    "BasePair",
    "DomainError",
    "EpSeq",
    "Mode",
    "NumericError",
    "PreconditionError",
    "Region",
    "Tri",
    "Verdict",
    "phi_forward",
    "phi_inverse",
    "run_algorithm",
]
