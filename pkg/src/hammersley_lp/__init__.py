"""L_p-discrepancy of digit shifted, symmetrized and folded Hammersley point sets."""
from .numerics import Dyadic
from .pointset import (
    PointSet,
    ShiftVector,
    fold,
    hammersley,
    parse_shift,
    shift_balance,
    shifted_hammersley,
    symmetrize,
    symmetrize_tilde,
)
from .discrepancy import (
    CellGrid,
    LpResult,
    build_cell_grid,
    count_box,
    l2_warnock,
    local_discrepancy,
    lp_cellwise,
    lp_monte_carlo,
)

__version__ = "0.1.0"
