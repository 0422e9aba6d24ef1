"""Dynamic flow scheduling simulator for multihomed video CDN peering servers."""

from .analysis import InfoGainTable, SampleSet, entropy, info_gain_table, information_gain
from .flow import (
    BackgroundProfile,
    BottleneckSet,
    ThroughputSolution,
    detect_bottlenecks,
    diurnal_profile,
    max_throughput,
    max_total,
    residual_capacity,
    residual_vector,
)
from .parameters import (
    InfoView,
    ParameterVector,
    compute_parameters,
    degrade_client_info,
    degrade_link_info,
)
from .routing import (
    Footprint,
    Path,
    PathTable,
    build_path_table,
    footprint,
    link_cost,
    setup_stats,
    shortest_path,
)
from .scheduler import (
    Combination,
    ControlPlaneConfig,
    IpSampler,
    RequestTrace,
    SelectionResult,
    param_performance_gain,
    run_control_plane,
    select_strategy,
)
from .strategy import (
    GainReport,
    Strategy,
    enumerate_strategies,
    optimal_strategy,
    performance_gain,
    strategy_from_letters,
    strategy_to_letters,
)
from .topology import (
    Link,
    MultihomeSetup,
    Topology,
    assign_capacities,
    generate_transit_stub,
    generate_waxman,
    load_topology,
    sample_multihome_setup,
    save_topology,
)

__version__ = "0.1.0"

__all__ = [
    "BackgroundProfile", "BottleneckSet", "Combination", "ControlPlaneConfig",
    "Footprint", "GainReport", "InfoGainTable", "InfoView", "IpSampler", "Link",
    "MultihomeSetup", "ParameterVector", "Path", "PathTable", "RequestTrace",
    "SampleSet", "SelectionResult", "Strategy", "ThroughputSolution", "Topology",
    "assign_capacities", "build_path_table", "compute_parameters",
    "degrade_client_info", "degrade_link_info", "detect_bottlenecks",
    "diurnal_profile", "entropy", "enumerate_strategies", "footprint",
    "generate_transit_stub", "generate_waxman", "info_gain_table",
    "information_gain", "link_cost", "load_topology", "max_throughput",
    "max_total", "optimal_strategy", "param_performance_gain",
    "performance_gain", "residual_capacity", "residual_vector",
    "run_control_plane", "sample_multihome_setup", "save_topology",
    "select_strategy", "setup_stats", "shortest_path", "strategy_from_letters",
    "strategy_to_letters",
]
