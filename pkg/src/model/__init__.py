"""Online lasso models, the eta ladder and frozen snapshots."""

from .ladder import (
    ModelLadder,
    ModelSnapshot,
    online_update,
    predict,
    predict_batch,
    select_eta,
    snapshot,
)
from .lasso import (
    GramStats,
    LassoState,
    cd_sweep,
    eta_grid,
    fit_path,
    lasso_objective,
    soft_threshold,
)

__all__ = [
    "GramStats",
    "LassoState",
    "ModelLadder",
    "ModelSnapshot",
    "cd_sweep",
    "eta_grid",
    "fit_path",
    "lasso_objective",
    "online_update",
    "predict",
    "predict_batch",
    "select_eta",
    "snapshot",
    "soft_threshold",
]
