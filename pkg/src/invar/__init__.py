"""invar: Hilbert ideals of p-group representations over finite fields.

Library layout mirrors the pipeline: ffield (exact F_{p^k} arithmetic),
mpoly (sparse polynomials and Hasse derivations), gbasis (Buchberger,
colength, complete-intersection test), gaction (matrix groups acting on
polynomials), nakajima (layered structure search), hilbert (brute-force
oracle and constructive generators), cli (spec files and reports).
"""

__version__ = "0.1.0"

from .ffield import FieldElement, FieldSpec, field_create
from .gaction import GroupElement, GroupTable, act, group_closure, orbit_product, trace
from .gbasis import (GroebnerBasis, MonomialOrder, colength, groebner, ideal_equal,
                     is_complete_intersection, normal_form)
from .hilbert import (HilbertIdealResult, ci_generators, hilbert_ideal_bruteforce,
                      invariants_of_degree, polynomiality_report)
from .mpoly import Polynomial, RingSpec, hasse_composite, hasse_derivative
from .nakajima import find_sequence, is_nakajima_classic, verify_structure
