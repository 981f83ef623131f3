"""Left-passage probabilities for critical percolation on odd strips.

Exact link-pattern transfer matrices, symplectic-character closed forms,
product-formula enumeration constants, the spin-chain route to large
widths, Schramm's continuum formula, and a Monte Carlo hull sampler,
behind one `tlstrip` command line tool.
"""

from .combinat import asm_count, csscpp_count, vsasm_count
from .linkpat import LinkPattern, enumerate_link_patterns
from .observables import (
    PassageProfile,
    pb_formula,
    pb_hom,
    pbhat_formula,
    pbhat_hom,
    pleft_profile,
)
from .schramm import pb_amplitude, pbhat_amplitude, schramm_pleft
from .transfer import Q_PERCOLATION, W_ISOTROPIC, SpectralPoint

__version__ = "0.1.0"

__all__ = [
    "LinkPattern",
    "PassageProfile",
    "Q_PERCOLATION",
    "SpectralPoint",
    "W_ISOTROPIC",
    "__version__",
    "asm_count",
    "csscpp_count",
    "enumerate_link_patterns",
    "pb_amplitude",
    "pb_formula",
    "pb_hom",
    "pbhat_amplitude",
    "pbhat_formula",
    "pbhat_hom",
    "pleft_profile",
    "schramm_pleft",
    "vsasm_count",
]
