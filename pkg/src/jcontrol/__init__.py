"""Spectral, coupling and resonance analysis of Jaynes-Cummings control."""
from .chain import ChainReport, Verdict, build_c0, certify, check_connected
from .coupling import TransitionEdge, coupled_pairs, h1_element, h2_element
from .model import (
    LevelIndex,
    MixingCoefficients,
    ModelParams,
    eigenvector_coeffs,
    energy,
    f,
    mixing,
    taylor_energy,
)
from .resonance import (
    Family,
    SingularPoint,
    enumerate_singular,
    g1_crossing,
    g2_crossing,
    resonance_scan,
    solve_s2,
)

__version__ = "0.1.0"
