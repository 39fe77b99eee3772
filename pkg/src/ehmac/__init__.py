"""Energy-harvesting Gaussian MAC: battery simulation, throughput and capacity-bound regions."""

from .arrivals import (
    ArrivalModel,
    bernoulli,
    build_fully_correlated,
    build_iid_product,
    build_joint,
    mean_arrival,
    sample_path,
)
from .battery import BatteryState, Trajectory, simulate_trajectory, step
from .errors import (
    AdmissibilityError,
    EnumerationBudgetError,
    PolymatroidError,
    QuadratureError,
    ScenarioError,
)
from .gaussmi import (
    EPI_CONSTANT,
    InputSpec,
    epi_loose_bound,
    epi_lower_bound,
    mixture_awgn_mi,
    sum_uniform_awgn_mi,
)
from .policies import (
    PolicySpec,
    allocate,
    check_admissibility,
    exact_output_entropy,
    fixed_fraction_rate,
)
from .regions import (
    GapReport,
    RateRegion,
    SetFunction,
    awgn_outer,
    gap_report,
    inner_tx,
    inner_txrx,
    is_submodular,
    region_contains,
    setfn_distance,
    shifted_region,
    sum_rate,
    vertex,
)
from .throughput import (
    ThroughputEstimate,
    concavity_split_check,
    exact_throughput,
    mc_throughput,
    supadditivity_check,
    throughput_set_function,
)

__version__ = "0.1.0"
