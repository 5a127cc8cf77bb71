"""
Shortcuts to adiabaticity for two-level systems and harmonic traps, built
from interaction pictures: adiabatic and superadiabatic frames,
counterdiabatic terms, Z-rotation and lab-frame variants, a unitary
two-level propagator and a split-operator trap solver.
"""

from .adiabatic import (AdiabaticFrame, build_frame, cd_term_0, cd_term_01, cd_term_1, cd_term_1_closed_form,
                        iterate, superadiabatic_frames)
from .errors import (BoxOverflow, DegenerateHamiltonian, GridMismatch, GridTooCoarse, IncompleteBasis, InvalidRamp,
                     InvalidSchedule, NormDrift, PhaseBranchError, StepUnderflow)
from .harmonic import (ErmakovSolution, Grid1D, GridWavefunction, QuinticRamp, dilate, ermakov_oracle,
                       expansion_suite, final_excitation, ground_state, make_ramp, propagate_grid)
from .pictures import (FrameGenerator, ZRotationShortcut, adiabatic_frame_generator, cd_lab_frame,
                       cd_only_lab_frame, diagonal_phase_frame, ip_transform, resonant_cd_only, rwa_lab_frame,
                       superadiabatic_product_frame, z_rotation_shortcut)
from .propagate import TwoLevelTrajectory, eigen_populations, fidelity, populations, propagate
from .protocols import LAB_PROTOCOLS, TWO_LEVEL_PROTOCOLS, ProtocolSet, run_lab_protocol
from .schedules import (CallableSchedule, ConstantSchedule, DriveSchedule, FourierSchedule, LzSchedule,
                        TabulatedSchedule, lz_schedule, theta_derivatives)
from .su2 import SIGMA_X, SIGMA_Y, SIGMA_Z, SphereCoords, Su2Coords, cart_to_sphere, eigensystem, sphere_to_cart

__version__ = "0.1.0"
