"""gaugebench: a numerical workbench for gauge-field constructions.

Subpackages cover Lie-algebra bases (liealg), derivation-based differential
forms on matrix algebras (ncforms), matrix-model connections (ncgauge),
lattice Yang-Mills-Higgs fields (latticeymh), transitive Lie algebroids
(algebroid), finite spectral triples (spectral), grid gravitation (gravity),
action minimization (optimize), and the verification/driver layer (verify,
driver, report, cli).
"""

from .liealg import LieData, structure_constants, su_basis, validate_lie_data

__all__ = [
    "LieData",
    "structure_constants",
    "su_basis",
    "validate_lie_data",
]

__version__ = "0.1.0"
