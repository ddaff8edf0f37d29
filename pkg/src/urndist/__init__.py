"""urndist: draw-by-draw distances between categorical count assemblages.

Assemblages are modeled as urns: each record is a draw updating a
Dirichlet-categorical posterior per time interval, the Hellinger distance
between two scopes' posterior means is recorded after every draw, the draw
order is Monte Carlo permuted, and the pooled values are summarized by a
KDE mode and an HPD credible region.
"""

from .density import (DensitySummary, hpd_region, kde, mode_estimate,
                      summarize)
from .engine import (PhiSample, PhiTable, RunConfig, permute_indices,
                     run_all, run_ordered, run_permutation)
from .errors import (ConfigError, EmptyIntervalError, InfiniteDivergenceError,
                     InsufficientDataError, OutsideWindowError, ParseError,
                     UrndistError, ValidationError)
from .kernels import active_backend, available_backends
from .metrics import SQRT2, Metric, hellinger, kl_divergence
from .posterior import PosteriorState, new_state
from .records import (FindRecord, StudyWindow, TemporalSpread,
                      map_to_intervals, parse_categories, parse_records,
                      scan_records, spread_records)
from .scopes import ScopeDefinition, scope_mean_unweighted, scope_mean_weighted

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DensitySummary", "EmptyIntervalError", "FindRecord",
    "InfiniteDivergenceError", "InsufficientDataError", "Metric",
    "OutsideWindowError", "ParseError", "PhiSample", "PhiTable",
    "PosteriorState", "RunConfig", "SQRT2", "ScopeDefinition", "StudyWindow",
    "TemporalSpread", "UrndistError", "ValidationError", "active_backend",
    "available_backends", "hellinger", "hpd_region", "kde", "kl_divergence",
    "map_to_intervals", "mode_estimate", "new_state", "parse_categories",
    "parse_records", "permute_indices", "run_all", "run_ordered",
    "run_permutation", "scan_records", "scope_mean_unweighted",
    "scope_mean_weighted", "spread_records", "summarize", "__version__",
]
