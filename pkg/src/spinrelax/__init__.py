"""Exact dynamics of long-range Ising models.

Correlators of the Ising Hamiltonian with power-law couplings, evolved from
states diagonal in the sigma^x product basis, reduce to products of cosines
that can be evaluated for lattices with millions of sites. The package
provides lattices and couplings, the correlator formulas, thermodynamic-limit
bounds, two-spin tomography and a brute-force oracle for small systems.
"""
from ._backend import get_backend, get_threads, set_backend, set_threads
from .bounds import (bound_correlator, bound_p_minus, bound_p_plus, cutoff_radii, decay_regime,
                     exponents, tau_bound, tri_constants, validity_threshold)
from .dynamics import (CorrelatorSeries, InitialMoments, corr_ppp, corr_xx, corr_xy, corr_xz, corr_yy,
                       corr_yz, corr_zz, evaluate_series, one_spin_x, one_spin_y, p_minus, p_plus, p_z,
                       recurrence_scan, relaxation_time)
from .errors import (InconsistentMomentsError, InvalidArgumentError, ResourceLimitError, SpinRelaxError,
                     UnsupportedError)
from .lattice import (CouplingMatrix, Lattice, LatticeKind, build_lattice, dense_couplings, pair_distance,
                      power_law_couplings)
from .signedlog import SignedLogValue
from .tomography import jz2_theta, moments_at, offdiag_moduli, purity, rho_one, rho_two

__version__ = "0.1.0"
