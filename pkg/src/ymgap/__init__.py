"""Truncated second quantization, ordering calculus, and Yang-Mills energy spectra."""

__version__ = "0.1.0"

from .fock import (
    FockBasis,
    FockOperator,
    annihilation_matrix,
    coherent_vector,
    creation_matrix,
    enumerate_basis,
    number_operator,
)
from .quantize import coherent_matrix_element, galerkin_compress, quantize, toeplitz_quantize
from .symbols import (
    Ordering,
    PolySymbol,
    convert_ordering,
    diff,
    restrict_modes,
    star,
    star_antinormal,
    star_normal,
    star_weyl,
    weierstrass_transform,
)
from .yangmills import (
    GaugeAlgebra,
    Lattice,
    ModeBasis,
    abelian_algebra,
    build_mode_basis,
    energy_functional,
    energy_polynomial,
    killing_constant,
    su2_algebra,
    su3_algebra,
)
