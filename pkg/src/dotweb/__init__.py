"""Entanglement dynamics of N cavity-coupled spin qubits with equal pairwise coupling."""

from .errors import DegenerateDivision, DotwebError, InvalidPair, InvalidSpin, ShapeError, SizeLimit
from .measures import (
    EntanglementReport,
    PairKind,
    SpinKind,
    TwoQubitDensity,
    concurrence,
    entanglement_of_formation,
    reduced_same,
    reduced_updown,
    report,
    residual_tangle,
    tangle,
    von_neumann_entropy,
)
from .sector import SchmidtSpectrum, SectorState, SystemConfig, b_coeff, binom, evolve, gamma, schmidt

__version__ = "0.1.0"
