"""Band distance for time series: a data-driven, shape-sensitive distance
metric, with baseline distances, k-medoids clustering, spectral and seasonal
preprocessing, and a simulation harness."""

from .core import (
    DistanceMatrix,
    LabeledDataset,
    Partition,
    TimeSeriesSet,
    read_matrix_csv,
    validate_set,
    write_matrix_csv,
)
from .bands import (
    Band,
    ContainmentTable,
    band_distance_matrix,
    band_distance_pair,
    bandwise_similarity,
    build_containment,
    naive_band_distance_matrix,
)
from .baselines import (
    build_equidepth_ranges,
    lp_distance_matrix,
    pidist_distance_matrix,
    pidist_similarity,
)
from .clustering import (
    KMedoidsConfig,
    adjusted_rand_index,
    kmeans,
    kmedoids,
    rand_index,
)
from .spectral import daniell_smooth, periodogram, stft, vectorize_stft
from .seasonal import SeasonalSurface, fit_seasonal, remove_seasonal
from .simulation import (
    ArmaSpec,
    ComparisonResult,
    MvnClassSpec,
    compare_methods,
    sample_mvn,
    simulate_arma,
    simulation_a_run,
    simulation_b_run,
    simulation_c_run,
)

__version__ = "0.1.0"
