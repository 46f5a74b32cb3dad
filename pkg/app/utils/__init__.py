from app.utils.linalg import SquareMatrix, determinant, gram, leverage_scores
from app.utils.symfun import PolynomialCoeffs, elem_sym, elem_sym_prefix, interpolate
from app.utils.rng import make_rng, trial_seed
from app.utils.time_utils import utc_now, format_timestamp, Stopwatch

__all__ = [
    "SquareMatrix",
    "determinant",
    "gram",
    "leverage_scores",
    "PolynomialCoeffs",
    "elem_sym",
    "elem_sym_prefix",
    "interpolate",
    "make_rng",
    "trial_seed",
    "utc_now",
    "format_timestamp",
    "Stopwatch"
]
