"""Gap spectra of m.alpha mod 1 over lattice points of dilated convex bodies,
the lattice function F(M, t), and first return times of toral translations."""
from .circleset import GapReport, RationalBeta, spectrum
from .geometry import AxisBox, Ball, PolytopeH, unit_box
from .latticecore import LatticeBasis, F_value, slater_basis, steinhaus_basis
from .reals import LinearForm, RandomGen, sqrt_form

__version__ = "0.1.0"

__all__ = [
    "AxisBox", "Ball", "F_value", "GapReport", "LatticeBasis", "LinearForm", "PolytopeH",
    "RandomGen", "RationalBeta", "slater_basis", "spectrum", "sqrt_form", "steinhaus_basis",
    "unit_box",
]
