"""Exact lattice arithmetic for wedge-square lifting on Lambda = wedge^2 Z^4.

The public surface is re-exported here; submodules hold the details.
"""

from .crystal import (
    FCrystalH1,
    frobenius_image_profile,
    is_crystal_morphism,
    smith_valuations,
    wedge_crystal_check,
    xi_twist,
)
from .errors import (
    InvalidInput,
    InvariantViolation,
    Obstruction,
    ObstructionAtEll,
    ResourceBound,
    SearchExhausted,
    WedgeLatError,
)
from .lift import IsogenyData, LiftResult, lift_so_to_sl, prime_to_ell_lift, principal_isogeny_data
from .mukai import (
    BField,
    MukaiVector,
    TwistedLattice,
    ZigzagCertificate,
    exp_b,
    is_filtered,
    mukai_pairing,
    reflexive_twisted_isometry,
    verify,
    zigzag_factorize,
)
from .reflections import CDDecomposition, Reflection, cd_decompose, cd_decompose_prime_to_ell, spinor_norm
from .scalars import (
    QuadScalar,
    SquareClass,
    WittRing,
    WittScalar,
    class_in_local_units,
    local_integrality,
    square_class,
)
from .wedge import AdmissibleBasis, admissibility_degree, gram_lambda, poincare_duality, wedge_square

__version__ = "0.1.0"

__all__ = [
    "AdmissibleBasis",
    "BField",
    "CDDecomposition",
    "FCrystalH1",
    "InvalidInput",
    "InvariantViolation",
    "IsogenyData",
    "LiftResult",
    "MukaiVector",
    "Obstruction",
    "ObstructionAtEll",
    "QuadScalar",
    "Reflection",
    "ResourceBound",
    "SearchExhausted",
    "SquareClass",
    "TwistedLattice",
    "WedgeLatError",
    "WittRing",
    "WittScalar",
    "ZigzagCertificate",
    "admissibility_degree",
    "cd_decompose",
    "cd_decompose_prime_to_ell",
    "class_in_local_units",
    "exp_b",
    "frobenius_image_profile",
    "gram_lambda",
    "is_crystal_morphism",
    "is_filtered",
    "lift_so_to_sl",
    "local_integrality",
    "mukai_pairing",
    "poincare_duality",
    "prime_to_ell_lift",
    "principal_isogeny_data",
    "reflexive_twisted_isometry",
    "smith_valuations",
    "spinor_norm",
    "square_class",
    "verify",
    "wedge_crystal_check",
    "wedge_square",
    "xi_twist",
    "zigzag_factorize",
]
