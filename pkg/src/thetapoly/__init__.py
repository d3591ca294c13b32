"""Exact and numerical tools for the theta-function polynomial families T_n^(k)."""

from .errors import (ArityMismatch, DivisionByZero, InconsistentSystem, InexactDivision,
                     InvariantBreach, NearSingularity, PoleAtPoint, PoleAtSpecialization,
                     SingularInterpolation, ThetaPolyError)
from .scalars import ONE, ZERO, ZETA, Rat, RatFunZeta
from .multipoly import MPoly, MRat, det_bareiss, vandermonde
from .kernel import (ETA, XI, KIndex, SigmaOp, base_T, block_T, duality_check, general_T,
                     general_U, hs_check, shift_law_T, shift_law_U, sigma_hat, tau)
from .pde import OmegaCoeffs, apply_omega, apply_omega_dual, build_coeffs, ct_lemma_check, recursion_check_eer
from .lattice import TauLattice, bilinear_residual, bst_check, lattice_verify
from .elliptic import EllipticCtx, verify_identity, verify_schroedinger

__version__ = "0.1.0"
