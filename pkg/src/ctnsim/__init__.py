"""Clifford-augmented MPS simulation with entanglement cooling."""

from .ctn import CoolingPolicy, CoolingReport, CTNState, ctn_to_statevector, new_ctn
from .exceptions import (CtnError, DimensionMismatch, PauliParseError,
                         SizeGuard, ValidationError)
from .gateclasses import (GateClassTable, double_coset_classes,
                          enumerate_symplectic, get_table, lift_representative)
from .mps import MPS, TruncationPolicy, bond_entropy, fidelity, product_state, to_statevector
from .pauli import PauliString, format_pauli, pauli_commutes, pauli_multiply, pauli_parse
from .tableau import (CliffordGate, CliffordTableau, apply_tableau_to_statevector,
                      cascade_circuit, conjugate_pauli, random_clifford,
                      synthesize, tableau_compose, tableau_to_unitary)
from .theory import (TheoremInstance, purity_formula, purity_oracle,
                     theorem_witness, verify_theorem_report)

__all__ = [
    "CtnError", "DimensionMismatch", "PauliParseError", "SizeGuard", "ValidationError",
    "PauliString", "format_pauli", "pauli_commutes", "pauli_multiply", "pauli_parse",
    "CliffordGate", "CliffordTableau", "apply_tableau_to_statevector",
    "cascade_circuit", "conjugate_pauli", "random_clifford",
    "synthesize", "tableau_compose", "tableau_to_unitary",
    "MPS", "TruncationPolicy", "bond_entropy", "fidelity", "product_state",
    "to_statevector",
    "CoolingPolicy", "CoolingReport", "CTNState", "ctn_to_statevector", "new_ctn",
    "GateClassTable", "double_coset_classes", "enumerate_symplectic",
    "get_table", "lift_representative",
    "TheoremInstance", "purity_formula", "purity_oracle", "theorem_witness",
    "verify_theorem_report",
]

__version__ = "0.1.0"
