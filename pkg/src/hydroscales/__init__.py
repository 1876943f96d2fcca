"""Multi-scale time series features and unsupervised-forest clustering.

Long daily records are aggregated to nine temporal resolutions, each
derived series is summarised by 23 scale-free features, and per
(series type, resolution) slice the feature rows are clustered with an
unsupervised random forest (proximity + k-medoids + silhouettes) and the
features ranked by Gini importance.
"""

__version__ = "0.1.0"

from .clustering import (  # noqa: F401
    ClusterResult,
    SweepResult,
    dissimilarity_from_proximity,
    pam,
    silhouette,
    sweep_k,
)
from .config import RunConfig, read_config  # noqa: F401
from .decomposition import Decomposition, loess_smooth, stl_decompose, stl_features  # noqa: F401
from .features import (  # noqa: F401
    FEATURE_NAMES,
    FeatureMatrix,
    FeatureRow,
    FeatureVector,
    compute_features,
    feature_correlations,
    summarize_means,
)
from .forest import (  # noqa: F401
    ContrastDataset,
    Forest,
    gini_importance,
    make_contrast,
    proximity,
    train_forest,
)
from .ingest import DatasetManifest, ManifestEntry, ingest, read_manifest  # noqa: F401
from .series import (  # noqa: F401
    CalendarMonths,
    FixedBlock,
    ResolutionSpec,
    SemiMonth,
    TimeSeries,
    aggregate,
    default_resolutions,
    derive_resolutions,
    difference,
    standardize,
)
from .spectral import ArModel, fit_ar, spectral_entropy  # noqa: F401
