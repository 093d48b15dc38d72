"""Lossy linear-optical transformations by unitary dilation, and two-photon
interference through the resulting circuits."""

__version__ = "0.1.0"

from .circuit import (Element, Netlist, compile_netlist, coupler, decompose, element_matrix,
                      lossy_mzi_netlist, parse, phase, serialize)
from .dilation import (DilatedUnitary, GainError, LossyTransform, dilate, loss_parameter,
                       lossy_beamsplitter)
from .experiment import (CountsModel, ScanConfig, ScanResult, crossing_loss, run_scan,
                         synthesize_counts, visibility)
from .fock import oracle_coincidence
from .linalg import SvdFactors, dagger, is_unitary, multiply, permanent, spectral_norm, svd
from .quantum import (CoincidenceMap, PhotonPairSource, TwoPhotonState, coincidence,
                      coincidence_map, mutual_coherence, p12_closed, p13_closed)
